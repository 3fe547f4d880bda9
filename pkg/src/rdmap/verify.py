"""Reproducible property suites behind the `verify` CLI subcommand.

Each suite turns one mathematical claim into a seeded trial loop and an
aggregate report.  A record's `violation` is the signed excess over the
suite tolerance, so violation <= 0 is a pass and `failures` counts records
with violation > 0; `worst_violation` is the running maximum.  Everything is
deterministic given (seed, trials, dims, a_grid): per-trial generators are
seeded as seed + trial index and all draws come from them.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channels import (
    MeasurementPartition,
    cyclic_twirl,
    dephasing_map,
    lueders_map,
    mixing_map,
    modified_coarse_map,
)
from .errors import ValidationError
from .measures import closed_form_measure, tsallis_relative_entropy
from .oracle import OracleConfig, minimize_over_free_states

DEFAULT_A_GRID = (0.3, 0.5, 0.8, 1.0, 1.2, 1.5, 2.0)
SUITE_NAMES = ("theorem1", "axioms", "theorem2", "piani", "continuity")

# theorem1 runs a cheap oracle first and only escalates the rare trial whose
# gap is not already far below the pass threshold; keeps the full suite
# inside its wall-clock budget on one core.
GAP_TOL = 1e-5
ESCALATE_ABOVE = 3e-6
FAST_TOL = 1e-8
FAST_MAX_ITER = {2: 450, 3: 750, 4: 1100}
ESCALATED_CONFIG = dict(restarts=3, max_iterations=6000, tol=1e-12)


@dataclass
class SuiteReport:
    suite: str
    trials: int
    failures: int
    worst_violation: float
    records: list = field(default_factory=list)
    wall_time_s: float = 0.0

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "worst_violation": self.worst_violation,
            "wall_time_s": self.wall_time_s,
            "records": self.records,
        }


def _finish(suite: str, trials: int, records: list, t0: float) -> SuiteReport:
    violations = [r["violation"] for r in records if r.get("violation") is not None]
    return SuiteReport(
        suite=suite,
        trials=trials,
        failures=sum(1 for v in violations if v > 0),
        worst_violation=max(violations) if violations else float("-inf"),
        records=records,
        wall_time_s=time.perf_counter() - t0,
    )


def random_partition(d: int, rng, coarse: bool = False) -> MeasurementPartition:
    """Shuffle the basis indices, cut at a uniformly drawn set of positions.

    coarse=True rejects the all-singleton outcome and redraws, so at least
    one block has rank > 1 (at d=2 that forces the single-block partition).
    """
    while True:
        perm = rng.permutation(d)
        ncuts = int(rng.integers(0, d))
        cuts = np.sort(rng.choice(np.arange(1, d), size=ncuts, replace=False))
        blocks = np.split(perm, cuts)
        if coarse and len(blocks) == d:
            continue
        return MeasurementPartition(d, [b.tolist() for b in blocks])


def _random_unitary(d: int, rng) -> np.ndarray:
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(G)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _block_diagonal_unitary(partition: MeasurementPartition, rng) -> np.ndarray:
    U = np.zeros((partition.dim, partition.dim), dtype=complex)
    for block in partition.blocks:
        sub = _random_unitary(len(block), rng)
        for r, i in enumerate(block):
            for c, j in enumerate(block):
                U[i, j] = sub[r, c]
    return U


def _free_unitary(name: str, d: int, rng, partition) -> np.ndarray:
    """A unitary commuting with the named map, drawn at random.

    dephasing: permutation times diagonal phases; lueders/modified:
    block-diagonal in the partition; twirl: a group element; mixing: any
    unitary at all.
    """
    if name == "dephasing":
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=d))
        return np.diag(phases)[:, rng.permutation(d)]
    if name in ("lueders", "modified"):
        return _block_diagonal_unitary(partition, rng)
    if name == "twirl":
        C = np.zeros((d, d), dtype=complex)
        for i in range(d):
            C[(i + 1) % d, i] = 1.0
        return np.linalg.matrix_power(C, int(rng.integers(0, d)))
    if name == "mixing":
        return _random_unitary(d, rng)
    raise ValidationError(f"no free-unitary family for map {name!r}")


def _builtin_families(d: int, rng):
    """The five built-in map families; Lueders and modified share one random
    coarse partition so their trials are directly comparable."""
    coarse = random_partition(d, rng, coarse=True)
    return coarse, [
        ("dephasing", dephasing_map(MeasurementPartition.singletons(d))),
        ("lueders", lueders_map(coarse)),
        ("modified", modified_coarse_map(coarse)),
        ("twirl", cyclic_twirl(d)),
        ("mixing", mixing_map(d)),
    ]


def _density_ok(M: np.ndarray) -> bool:
    try:
        linalg.validate_density(M)
        return True
    except ValidationError:
        return False


def suite_theorem1(dims, a_grid, trials: int, seed: int,
                   tol: float = GAP_TOL) -> SuiteReport:
    """Closed form vs oracle on random states, every built-in map, the full
    a grid.  Every 10th trial replaces rho by its image under the map, so
    fixed points (where both sides must vanish) are always exercised.
    Records carry the minimizer's density-validation verdict and fixed-point
    residual alongside the gap."""
    dims = [int(d) for d in dims]
    if not set(dims) <= {2, 3, 4}:
        raise ValidationError(f"oracle-backed dims are limited to 2..4, got {dims}")
    a_grid = [float(a) for a in a_grid]
    t0 = time.perf_counter()
    records = []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        for d in dims:
            rho_base = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
            _, families = _builtin_families(d, rng)
            for name, rdm in families:
                rho = rdm.apply(rho_base) if t % 10 == 0 else rho_base
                for a in a_grid:
                    rep = closed_form_measure(rho, rdm, a)
                    oseed = int(rng.integers(2**31))
                    fast = OracleConfig(restarts=1,
                                        max_iterations=FAST_MAX_ITER[d],
                                        tol=FAST_TOL, seed=oseed)
                    res = minimize_over_free_states(rho, rdm, a, fast)
                    escalated = False
                    if abs(res.gap_to_closed_form) > ESCALATE_ABOVE:
                        res = minimize_over_free_states(
                            rho, rdm, a,
                            OracleConfig(seed=oseed + 1, **ESCALATED_CONFIG))
                        escalated = True
                    records.append({
                        "trial": t, "seed": s, "dim": d, "map": name, "a": a,
                        "fixed": t % 10 == 0,
                        "closed": rep.value,
                        "oracle": res.value,
                        "gap": res.gap_to_closed_form,
                        "escalated": escalated,
                        "restarts_agreeing": res.restarts_agreeing,
                        "sigma_ok": _density_ok(rep.sigma_star),
                        "sigma_fp_residual": rep.fixed_point_residual,
                        "violation": abs(res.gap_to_closed_form) - tol,
                    })
    return _finish("theorem1", trials, records, t0)


def suite_axioms(trials: int, seed: int, tol: float = 1e-9) -> SuiteReport:
    """Faithfulness, free-unitary invariance, convexity, and monotonicity
    under an enumerated free-operation family (the map itself, a free
    unitary, and a random mixture of free unitaries)."""
    t0 = time.perf_counter()
    records = []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        d = 2 + t % 3
        a = DEFAULT_A_GRID[t % len(DEFAULT_A_GRID)]
        coarse, families = _builtin_families(d, rng)
        name, rdm = families[t % len(families)]
        common = {"trial": t, "seed": s, "dim": d, "map": name, "a": a}

        tau = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
        v_free = closed_form_measure(rdm.apply(tau), rdm, a).value
        records.append({**common, "kind": "faithfulness", "value": v_free,
                        "violation": v_free - tol})

        rho = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
        v_rho = closed_form_measure(rho, rdm, a).value
        U = _free_unitary(name, d, rng, coarse)
        v_rot = closed_form_measure(U @ rho @ U.conj().T, rdm, a).value
        records.append({**common, "kind": "invariance",
                        "value": abs(v_rot - v_rho),
                        "violation": abs(v_rot - v_rho) - tol})

        # monotone family: E itself, one free unitary, one random mixture of
        # free unitaries (a free instrument with forgotten outcomes)
        mixes = [_free_unitary(name, d, rng, coarse) for _ in range(3)]
        probs = rng.dirichlet(np.ones(len(mixes)))
        lam_rho = sum(p * (U @ rho @ U.conj().T) for p, U in zip(probs, mixes))
        for op_name, out in (("map", rdm.apply(rho)),
                             ("free_unitary", U @ rho @ U.conj().T),
                             ("instrument", lam_rho)):
            v_out = closed_form_measure(out, rdm, a).value
            records.append({**common, "kind": f"monotone_{op_name}",
                            "value": v_out - v_rho,
                            "violation": v_out - v_rho - tol})

        rho2 = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
        p = float(rng.uniform())
        v1 = v_rho
        v2 = closed_form_measure(rho2, rdm, a).value
        v_mix = closed_form_measure(p * rho + (1 - p) * rho2, rdm, a).value
        excess = v_mix - (p * v1 + (1 - p) * v2)
        records.append({**common, "kind": "convexity", "value": excess,
                        "violation": excess - tol})
    return _finish("axioms", trials, records, t0)


def suite_theorem2(dims, a_grid, trials: int, seed: int,
                   tol: float = 1e-9) -> SuiteReport:
    """Fine dephasing vs the modified coarse estimate: mu^fine <= mu^modified
    on random states and coarse partitions, plus the composition identities
    fine.modified = modified.fine = modified at the superoperator level.
    The minimum observed slack is left in the records as data."""
    dims = [int(d) for d in dims]
    if not set(dims) <= {3, 4, 5, 6}:
        raise ValidationError(f"coarse partitions need dims in 3..6, got {dims}")
    a_grid = [float(a) for a in a_grid]
    t0 = time.perf_counter()
    records = []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        for d in dims:
            rho = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
            coarse = random_partition(d, rng, coarse=True)
            fine = dephasing_map(MeasurementPartition.singletons(d))
            modified = modified_coarse_map(coarse)

            r1 = float(np.linalg.norm(fine.superop @ modified.superop - modified.superop))
            r2 = float(np.linalg.norm(modified.superop @ fine.superop - modified.superop))
            records.append({"trial": t, "seed": s, "dim": d,
                            "blocks": [list(b) for b in coarse.blocks],
                            "kind": "compose", "value": max(r1, r2),
                            "violation": max(r1, r2) - 1e-10})

            for a in a_grid:
                mu_fine = closed_form_measure(rho, fine, a).value
                mu_mod = closed_form_measure(rho, modified, a).value
                records.append({"trial": t, "seed": s, "dim": d, "a": a,
                                "blocks": [list(b) for b in coarse.blocks],
                                "kind": "inequality",
                                "mu_fine": mu_fine, "mu_modified": mu_mod,
                                "slack": mu_mod - mu_fine,
                                "violation": mu_fine - mu_mod - tol})
    return _finish("theorem2", trials, records, t0)


def suite_piani_demo(trials: int, seed: int, tol: float = 1e-9) -> SuiteReport:
    """Distance to the dephased state vs distance to the coarsely measured
    state.  At a = 1 the fine measurement is provably farther and the
    suite counts violations; at other a the signed difference is recorded
    as data without failing the suite."""
    t0 = time.perf_counter()
    records = []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        d = 3 + t % 4
        a = DEFAULT_A_GRID[t % len(DEFAULT_A_GRID)]
        rho = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
        coarse = random_partition(d, rng, coarse=True)
        fine = dephasing_map(MeasurementPartition.singletons(d))
        lueders = lueders_map(coarse)
        d_fine = tsallis_relative_entropy(rho, fine.apply(rho), a)
        d_coarse = tsallis_relative_entropy(rho, lueders.apply(rho), a)
        diff = d_fine - d_coarse
        records.append({
            "trial": t, "seed": s, "dim": d, "a": a,
            "blocks": [list(b) for b in coarse.blocks],
            "d_fine": d_fine, "d_coarse": d_coarse, "difference": diff,
            "counted": a == 1.0,
            "violation": (-diff - tol) if a == 1.0 else None,
        })
    return _finish("piani", trials, records, t0)


def suite_continuity_a1(trials: int, seed: int, tol: float = 1e-3) -> SuiteReport:
    """Both a != 1 branches evaluated at 1 +- 1e-4 must land within 1e-3 of
    the exact a = 1 value.  Every 4th trial uses a fixed point, where all
    three values are ~0."""
    t0 = time.perf_counter()
    records = []
    for t in range(trials):
        s = seed + t
        rng = np.random.default_rng(s)
        d = 2 + t % 2
        _, families = _builtin_families(d, rng)
        name, rdm = families[t % len(families)]
        rho = linalg.random_density_matrix(d, d, seed=int(rng.integers(2**31)))
        if t % 4 == 0:
            rho = rdm.apply(rho)
        v0 = closed_form_measure(rho, rdm, 1.0).value
        vm = closed_form_measure(rho, rdm, 1.0 - 1e-4).value
        vp = closed_form_measure(rho, rdm, 1.0 + 1e-4).value
        dev = max(abs(vm - v0), abs(vp - v0))
        records.append({"trial": t, "seed": s, "dim": d, "map": name,
                        "fixed": t % 4 == 0,
                        "value_at_1": v0, "below": vm, "above": vp,
                        "deviation": dev, "violation": dev - tol})
    return _finish("continuity", trials, records, t0)


def run_suite(name: str, dims=None, a_grid=None, trials: int | None = None,
              seed: int = 0, tol: float | None = None) -> SuiteReport:
    """Dispatch by suite name with per-suite defaults matching the
    acceptance runs."""
    if name not in SUITE_NAMES:
        raise ValidationError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    grid = list(a_grid) if a_grid else list(DEFAULT_A_GRID)
    kw = {} if tol is None else {"tol": tol}
    if name == "theorem1":
        return suite_theorem1(dims or [2, 3, 4], grid, trials or 50, seed, **kw)
    if name == "axioms":
        return suite_axioms(trials or 200, seed, **kw)
    if name == "theorem2":
        return suite_theorem2(dims or [3, 4, 5, 6], grid, trials or 200, seed, **kw)
    if name == "piani":
        return suite_piani_demo(trials or 200, seed, **kw)
    return suite_continuity_a1(trials or 100, seed, **kw)
