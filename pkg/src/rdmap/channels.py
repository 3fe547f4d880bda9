"""CPTP maps, their adjoints, and the built-in resource-destroying maps.

Channels are stored in Kraus form; the d^2 x d^2 superoperator (column-major
vectorization, S = sum_i conj(K_i) (x) K_i) is derived on demand and is the
canonical representation for map equality and idempotency checks, since
Kraus decompositions are not unique.  Channels are immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    NotAGroup,
    NotFineGrained,
    NotIdempotent,
    NotUnital,
    NotUnitary,
    ValidationError,
)

IDEMPOTENCY_TOL = 1e-9
UNITALITY_TOL = 1e-10
TRACE_PRESERVING_TOL = 1e-10
UNITARY_TOL = 1e-10
GROUP_CLOSURE_TOL = 1e-9


def vec(M: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(M).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(v.size)))
    return np.asarray(v).reshape(d, d, order="F")


def kraus_to_superop(kraus: Sequence[np.ndarray]) -> np.ndarray:
    d = kraus[0].shape[0]
    S = np.zeros((d * d, d * d), dtype=complex)
    for K in kraus:
        S += np.kron(K.conj(), K)
    return S


class QuantumChannel:
    """A completely positive map given by Kraus operators {K_i}.

    Complete positivity holds by construction.  Trace preservation is not
    enforced here (adjoints of non-unital channels break it); the
    constructors and `certify_rdm` check it where required.
    """

    def __init__(self, kraus: Iterable[np.ndarray]):
        ops = tuple(np.array(K, dtype=complex) for K in kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        for K in ops:
            if K.ndim != 2 or K.shape != (d, d):
                raise DimensionMismatch(
                    f"Kraus operators must all be {d}x{d}, got shape {K.shape}"
                )
        for K in ops:
            K.setflags(write=False)
        self._kraus = ops
        self._dim = d
        self._superop = None

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def kraus(self) -> tuple:
        return self._kraus

    @property
    def superop(self) -> np.ndarray:
        """d^2 x d^2 column-stacking superoperator (cached)."""
        if self._superop is None:
            S = kraus_to_superop(self._kraus)
            S.setflags(write=False)
            self._superop = S
        return self._superop

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """sum_i K_i rho K_i^dag."""
        A = np.asarray(rho, dtype=complex)
        if A.shape != (self._dim, self._dim):
            raise DimensionMismatch(
                f"state has shape {A.shape}, channel acts on {self._dim}x{self._dim}"
            )
        out = np.zeros_like(A)
        for K in self._kraus:
            out += K @ A @ linalg.dagger(K)
        return out

    def adjoint(self) -> "QuantumChannel":
        """The map with Kraus {K_i^dag}; unital iff self is trace preserving,
        trace preserving iff self is unital."""
        return QuantumChannel([linalg.dagger(K) for K in self._kraus])

    def compose(self, other: "QuantumChannel") -> "QuantumChannel":
        """self after other: (self . other)(rho) = self(other(rho))."""
        if other.dim != self._dim:
            raise DimensionMismatch(
                f"cannot compose dimension {self._dim} with {other.dim}"
            )
        return QuantumChannel([A @ B for A in self._kraus for B in other.kraus])

    def trace_preserving_residual(self) -> float:
        acc = np.zeros((self._dim, self._dim), dtype=complex)
        for K in self._kraus:
            acc += linalg.dagger(K) @ K
        return linalg.frobenius(acc - np.eye(self._dim))

    def unitality_residual(self) -> float:
        return linalg.frobenius(self.apply(np.eye(self._dim, dtype=complex)) - np.eye(self._dim))


class ResourceDestroyingMap(QuantumChannel):
    """A certified idempotent, unital, trace-preserving channel.

    Built through `certify_rdm` or the named constructors; carries the
    measured certification residuals and, when available, the wire-format
    descriptor it was built from.
    """

    def __init__(self, kraus, idempotency_residual: float, unitality_residual: float,
                 descriptor: dict | None = None):
        super().__init__(kraus)
        self.idempotency_residual = idempotency_residual
        self.unitality_residual_ = unitality_residual
        self.descriptor = descriptor


def certify_rdm(channel: QuantumChannel, descriptor: dict | None = None) -> ResourceDestroyingMap:
    """Certify idempotency and unitality of a channel.

    Idempotency is checked on the superoperator, ||S^2 - S||_F <= 1e-9 (the
    looser tolerance absorbs round-off from squaring); unitality as
    ||E(I) - I||_F <= 1e-10.  Raises NotIdempotent or NotUnital with the
    measured residual.
    """
    tp = channel.trace_preserving_residual()
    if tp > TRACE_PRESERVING_TOL:
        raise ValidationError(f"trace-preservation residual {tp:.3e} exceeds {TRACE_PRESERVING_TOL:.0e}")
    S = channel.superop
    idem = float(np.linalg.norm(S @ S - S))
    if idem > IDEMPOTENCY_TOL:
        raise NotIdempotent(f"||S^2 - S|| = {idem:.3e} exceeds {IDEMPOTENCY_TOL:.0e}")
    unital = channel.unitality_residual()
    if unital > UNITALITY_TOL:
        raise NotUnital(f"||E(I) - I|| = {unital:.3e} exceeds {UNITALITY_TOL:.0e}")
    return ResourceDestroyingMap(channel.kraus, idem, unital, descriptor)


@dataclass(frozen=True)
class MeasurementPartition:
    """A partition of the computational-basis indices {0,...,d-1} into blocks.

    Blocks are disjoint, nonempty, and cover every index; block sizes are the
    degeneracies of the corresponding coarse projectors.
    """

    dim: int
    blocks: tuple

    def __init__(self, dim: int, blocks: Iterable[Iterable[int]]):
        normalized = tuple(tuple(sorted(int(i) for i in b)) for b in blocks)
        seen = [i for b in normalized for i in b]
        if any(len(b) == 0 for b in normalized):
            raise ValidationError("partition blocks must be nonempty")
        if sorted(seen) != list(range(dim)):
            raise ValidationError(
                f"blocks must disjointly cover 0..{dim - 1}, got {normalized}"
            )
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "blocks", normalized)

    @classmethod
    def singletons(cls, dim: int) -> "MeasurementPartition":
        return cls(dim, [[i] for i in range(dim)])

    @classmethod
    def single_block(cls, dim: int) -> "MeasurementPartition":
        return cls(dim, [list(range(dim))])

    @property
    def degeneracies(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def is_fine_grained(self) -> bool:
        return all(n == 1 for n in self.degeneracies)

    def projectors(self) -> list:
        """Block projectors L_j = sum_{i in I_j} |e_i><e_i|."""
        out = []
        for block in self.blocks:
            L = np.zeros((self.dim, self.dim), dtype=complex)
            for i in block:
                L[i, i] = 1.0
            out.append(L)
        return out


def dephasing_map(partition: MeasurementPartition) -> ResourceDestroyingMap:
    """Fine-grained projective measurement: rho -> sum_i P_i rho P_i.

    Requires an all-singleton partition; the fixed points are the states
    diagonal in the computational basis.
    """
    if not partition.is_fine_grained():
        raise NotFineGrained(
            f"dephasing needs singleton blocks, got degeneracies {partition.degeneracies}"
        )
    desc = {"type": "dephasing", "dim": partition.dim,
            "partition": [list(b) for b in partition.blocks]}
    return certify_rdm(QuantumChannel(partition.projectors()), desc)


def lueders_map(partition: MeasurementPartition) -> ResourceDestroyingMap:
    """Coarse-grained projective (Lueders) measurement: rho -> sum_j L_j rho L_j."""
    desc = {"type": "lueders", "dim": partition.dim,
            "partition": [list(b) for b in partition.blocks]}
    return certify_rdm(QuantumChannel(partition.projectors()), desc)


def modified_coarse_map(partition: MeasurementPartition) -> ResourceDestroyingMap:
    """Coarse measurement with maximally mixed block updates:
    rho -> sum_j Tr(rho L_j) L_j / n_j.

    Kraus form {|e_k><e_l| / sqrt(n_j) : k, l in I_j}, which realizes the same
    action and keeps the map CP-certified like every other channel here.
    """
    kraus = []
    for block in partition.blocks:
        n = len(block)
        for k in block:
            for l in block:
                K = np.zeros((partition.dim, partition.dim), dtype=complex)
                K[k, l] = 1.0 / np.sqrt(n)
                kraus.append(K)
    desc = {"type": "modified", "dim": partition.dim,
            "partition": [list(b) for b in partition.blocks]}
    return certify_rdm(QuantumChannel(kraus), desc)


def _match_up_to_phase(target: np.ndarray, candidates: Sequence[np.ndarray], tol: float) -> bool:
    for U in candidates:
        overlap = complex(np.trace(linalg.dagger(U) @ target))
        if abs(overlap) < 1e-12:
            continue
        phase = overlap / abs(overlap)
        if linalg.frobenius(target - phase * U) <= tol:
            return True
    return False


def twirling_map(unitaries: Sequence[np.ndarray]) -> ResourceDestroyingMap:
    """Finite-group twirl: rho -> (1/|G|) sum_g U_g rho U_g^dag.

    Each element must be unitary and the set closed under products and
    inverses (up to global phase, which is invisible at the channel level);
    a non-closed set silently breaks idempotency, so it is a hard error.
    """
    ops = [np.asarray(U, dtype=complex) for U in unitaries]
    if not ops:
        raise ValidationError("twirling needs at least one unitary")
    d = ops[0].shape[0]
    for U in ops:
        if U.shape != (d, d):
            raise DimensionMismatch(f"unitaries must all be {d}x{d}, got {U.shape}")
        res = linalg.frobenius(linalg.dagger(U) @ U - np.eye(d))
        if res > UNITARY_TOL:
            raise NotUnitary(f"||U^dag U - I|| = {res:.3e} exceeds {UNITARY_TOL:.0e}")
    for U in ops:
        for V in ops:
            if not _match_up_to_phase(U @ V, ops, GROUP_CLOSURE_TOL):
                raise NotAGroup("set is not closed under products")
        if not _match_up_to_phase(linalg.dagger(U), ops, GROUP_CLOSURE_TOL):
            raise NotAGroup("set is not closed under inverses")
    n = len(ops)
    desc = {"type": "twirl", "dim": d,
            "unitaries": [linalg.matrix_to_json(U) for U in ops]}
    return certify_rdm(QuantumChannel([U / np.sqrt(n) for U in ops]), desc)


def mixing_map(d: int) -> ResourceDestroyingMap:
    """Complete mixing: rho -> Tr(rho) I/d.  Kraus {|i><j| / sqrt(d)}."""
    if d < 2:
        raise ValidationError(f"mixing map needs dimension >= 2, got {d}")
    kraus = []
    for i in range(d):
        for j in range(d):
            K = np.zeros((d, d), dtype=complex)
            K[i, j] = 1.0 / np.sqrt(d)
            kraus.append(K)
    return certify_rdm(QuantumChannel(kraus), {"type": "mixing", "dim": d})


def cyclic_twirl(d: int) -> ResourceDestroyingMap:
    """Twirl over the cyclic shift group {C^k} with C: e_i -> e_{i+1 mod d}."""
    C = np.zeros((d, d), dtype=complex)
    for i in range(d):
        C[(i + 1) % d, i] = 1.0
    return twirling_map([np.linalg.matrix_power(C, k) for k in range(d)])


def map_from_json(obj: dict) -> ResourceDestroyingMap:
    """Build a certified map from the wire format

    {"type": "dephasing"|"lueders"|"modified"|"twirl"|"mixing"|"kraus",
     "dim": d, "partition": [[...], ...], "unitaries": [matrix, ...],
     "operators": [matrix, ...]}
    """
    try:
        kind = obj["type"]
        d = int(obj["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed map object: {exc}") from None
    if kind in ("dephasing", "lueders", "modified"):
        if "partition" not in obj:
            raise ValidationError(f"map type {kind!r} needs a partition")
        partition = MeasurementPartition(d, obj["partition"])
        builder = {"dephasing": dephasing_map, "lueders": lueders_map,
                   "modified": modified_coarse_map}[kind]
        return builder(partition)
    if kind == "twirl":
        if "unitaries" not in obj:
            raise ValidationError("map type 'twirl' needs unitaries")
        return twirling_map([linalg.matrix_from_json(u) for u in obj["unitaries"]])
    if kind == "mixing":
        return mixing_map(d)
    if kind == "kraus":
        if "operators" not in obj:
            raise ValidationError("map type 'kraus' needs operators")
        ops = [linalg.matrix_from_json(k) for k in obj["operators"]]
        desc = {"type": "kraus", "dim": d,
                "operators": [linalg.matrix_to_json(K) for K in ops]}
        return certify_rdm(QuantumChannel(ops), desc)
    raise ValidationError(f"unknown map type {kind!r}")


def map_to_json(rdm: ResourceDestroyingMap) -> dict:
    """Wire-format descriptor of a certified map."""
    if rdm.descriptor is not None:
        return rdm.descriptor
    return {"type": "kraus", "dim": rdm.dim,
            "operators": [linalg.matrix_to_json(K) for K in rdm.kraus]}
