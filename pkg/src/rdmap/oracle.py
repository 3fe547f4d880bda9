"""Brute-force minimization oracle for certifying the closed form.

Minimizes S~_a(rho|sigma) over sigma in Fix(E) by derivative-free search on
an unconstrained parameterization of the fixed points.  Idempotency makes
sigma = E(tau) surjective onto Fix(E) as tau ranges over all states, so a
full d x d Ginibre-style factor G with tau = GG^dag / Tr(GG^dag) reaches
every candidate.  The search path shares nothing with the closed-form
evaluation; agreement between the two is evidence, not circularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .channels import ResourceDestroyingMap, unvec, vec
from .errors import NoFiniteObjective, ValidationError
from .measures import (
    SUPPORT_LEAK_TOL,
    closed_form_measure,
    tsallis_relative_entropy,
    validate_order,
)

AGREEMENT_WINDOW = 1e-6


@dataclass
class OracleConfig:
    """Search budget: seeded random restarts, per-restart iteration cap, and
    the objective-spread tolerance that stops the simplex."""

    restarts: int = 20
    max_iterations: int = 2000
    tol: float = 1e-10
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError(f"restarts must be >= 1, got {self.restarts}")
        if not self.tol > 0:
            raise ValidationError(f"tolerance must be positive, got {self.tol}")
        if self.max_iterations < 1:
            raise ValidationError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass
class OracleResult:
    value: float
    sigma_min: np.ndarray
    gap_to_closed_form: float
    restarts_agreeing: int


def parameterize_free_state(x: np.ndarray, rdm: ResourceDestroyingMap) -> np.ndarray:
    """Map a real vector of length 2d^2 to a fixed point of the channel.

    x packs Re(G) then Im(G); tau = GG^dag / Tr(GG^dag), falling back to the
    maximally mixed state when the trace underflows, and the output is E(tau).
    Redundant (many x per sigma) but unconstrained and map-agnostic.
    """
    d = rdm.dim
    z = np.asarray(x, dtype=float)
    if z.size != 2 * d * d:
        raise ValidationError(f"expected {2 * d * d} parameters, got {z.size}")
    G = (z[: d * d] + 1j * z[d * d :]).reshape(d, d)
    gram = G @ G.conj().T
    tr = float(gram.trace().real)
    if tr < 1e-14:
        tau = np.eye(d, dtype=complex) / d
    else:
        tau = gram / tr
    return rdm.apply(tau)


def simplex_minimize(f, x0: np.ndarray, config: OracleConfig,
                     initial_step: float = 0.5):
    """Nelder-Mead with the dimension-adaptive coefficients of Gao and Han.

    Stops when the objective spread over the simplex drops below config.tol
    or at the iteration cap.  Deterministic given x0; +inf objective values
    are legal and act as barriers (they sort last and repel the simplex).
    Returns (best point, best value).
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.size
    alpha = 1.0
    gamma = 1.0 + 2.0 / n
    beta = 0.75 - 1.0 / (2.0 * n)
    delta = 1.0 - 1.0 / n

    verts = np.tile(x0, (n + 1, 1))
    for i in range(n):
        verts[i + 1, i] += initial_step
    fs = np.array([f(v) for v in verts])

    for _ in range(config.max_iterations):
        order = np.argsort(fs, kind="stable")
        verts, fs = verts[order], fs[order]
        # inf - inf is nan when the whole simplex sits on the barrier;
        # keep iterating in that case rather than declaring convergence.
        if math.isfinite(fs[-1]) and fs[-1] - fs[0] < config.tol:
            break
        centroid = verts[:-1].mean(axis=0)
        xr = centroid + alpha * (centroid - verts[-1])
        fr = f(xr)
        if fr < fs[0]:
            xe = centroid + gamma * (xr - centroid)
            fe = f(xe)
            if fe < fr:
                verts[-1], fs[-1] = xe, fe
            else:
                verts[-1], fs[-1] = xr, fr
        elif fr < fs[-2]:
            verts[-1], fs[-1] = xr, fr
        else:
            if fr < fs[-1]:
                xc = centroid + beta * (xr - centroid)
                fc = f(xc)
                accepted = fc <= fr
            else:
                xc = centroid - beta * (centroid - verts[-1])
                fc = f(xc)
                accepted = fc < fs[-1]
            if accepted:
                verts[-1], fs[-1] = xc, fc
            else:
                for i in range(1, n + 1):
                    verts[i] = verts[0] + delta * (verts[i] - verts[0])
                    fs[i] = f(verts[i])
    i = int(np.argmin(fs))
    return verts[i].copy(), float(fs[i])


def _free_state_objective(rho: np.ndarray, rdm: ResourceDestroyingMap, a: float):
    """Objective x -> S~_a(rho | parameterize_free_state(x)), fused.

    Hot path for the search: one superoperator matvec and one eigh per call,
    with the entropy assembled from eigenvector weights instead of full
    matrix powers.  Mirrors tsallis_relative_entropy's support conventions
    exactly; a unit test pins the two together to 1e-12.
    """
    d = rdm.dim
    S = rdm.superop
    A = np.asarray(rho, dtype=complex)
    mixed = np.eye(d, dtype=complex) / d
    if a == 1.0:
        base = float(np.trace(A @ linalg.matrix_log(A)).real)
        R = None
    else:
        base = 0.0
        R = linalg.matrix_power(A, a)

    def objective(x: np.ndarray) -> float:
        G = (x[: d * d] + 1j * x[d * d :]).reshape(d, d)
        gram = G @ G.conj().T
        tr = gram.trace().real
        tau = mixed if tr < 1e-14 else gram / tr
        sig = unvec(S @ vec(tau))
        sig = (sig + sig.conj().T) / 2.0
        w, V = np.linalg.eigh(sig)
        w = np.clip(w, 0.0, None)
        cut = linalg.SUPPORT_CUTOFF * w[-1]
        pos = w > cut
        if a >= 1.0 and not pos.all():
            K = V[:, ~pos]
            leak = float(np.einsum("ij,ij->j", K.conj(), A @ K).real.sum())
            if leak > SUPPORT_LEAK_TOL:
                return math.inf
        if a == 1.0:
            Vp = V[:, pos]
            q = np.einsum("ij,ij->j", Vp.conj(), A @ Vp).real
            return base - float((q * np.log(w[pos])).sum())
        keep = w > 0.0 if a < 1.0 else pos
        Vp = V[:, keep]
        q = np.einsum("ij,ij->j", Vp.conj(), R @ Vp).real
        T = float((w[keep] ** (1.0 - a) * q).sum())
        return (max(T, 0.0) ** (1.0 / a) - 1.0) / (a - 1.0)

    return objective


def minimize_over_free_states(rho: np.ndarray, rdm: ResourceDestroyingMap,
                              a: float, config: OracleConfig | None = None) -> OracleResult:
    """Direct numerical minimization of the distance to the free set.

    Runs the simplex from `restarts` seeded random starts; each restart is
    polished by a second simplex rebuilt at its endpoint with a shrunken
    initial step, which recovers from degenerate collapse.  The winning
    point is re-evaluated
    through tsallis_relative_entropy (not the fused objective) and compared
    with the closed form.  restarts_agreeing counts restarts whose best value
    landed within 1e-6 of the winner, making flaky convergence visible.
    """
    a = validate_order(a)
    if config is None:
        config = OracleConfig()
    d = rdm.dim
    objective = _free_state_objective(rho, rdm, a)
    rng = np.random.default_rng(config.seed)
    starts = rng.standard_normal((config.restarts, 2 * d * d))

    best_x = None
    best_f = math.inf
    finals = []
    for x0 in starts:
        x, fx = simplex_minimize(objective, x0, config)
        x, fx = simplex_minimize(objective, x, config, initial_step=0.05)
        finals.append(fx)
        if fx < best_f:
            best_x, best_f = x, fx
    if not math.isfinite(best_f):
        raise NoFiniteObjective(
            f"objective was +inf at every evaluation (a={a}); "
            "support pathology in the free set"
        )

    sigma = parameterize_free_state(best_x, rdm)
    value = tsallis_relative_entropy(rho, sigma, a)
    closed = closed_form_measure(rho, rdm, a).value
    agreeing = sum(1 for fx in finals if fx <= best_f + AGREEMENT_WINDOW)
    return OracleResult(value=value, sigma_min=sigma,
                        gap_to_closed_form=value - closed,
                        restarts_agreeing=agreeing)
