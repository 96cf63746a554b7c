"""Hilbert-space belief states, projector questions and conditionalization.

All matrices are dense ``complex128`` numpy arrays. Probabilities use the
standard Born rule ``<psi|P|psi>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CollapseError, ConditioningError, DomainError, PreconditionError, RankError

MAX_DIM = 64
NORM_TOL = 1e-12
GRAM_SCHMIDT_TOL = 1e-12
PROJECTOR_TOL = 1e-10
PROB_FLOOR = 1e-12


def _check_dim(dim: int) -> None:
    if not 1 <= dim <= MAX_DIM:
        raise DomainError(f"dimension {dim} outside 1..{MAX_DIM}")


class StateVector:
    __slots__ = ("amplitudes",)

    def __init__(self, amplitudes: Iterable[complex], normalize: bool = False):
        amps = np.asarray(list(amplitudes) if not isinstance(amplitudes, np.ndarray) else amplitudes,
                          dtype=np.complex128).reshape(-1)
        _check_dim(amps.size)
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        norm = np.linalg.norm(amps)
        if normalize:
            if norm < NORM_TOL:
                raise DomainError("cannot normalize the zero vector")
            amps = amps / norm
        elif abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state vector has norm {norm!r}, expected 1")
        amps.setflags(write=False)
        self.amplitudes = amps

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __repr__(self) -> str:
        return f"StateVector({self.amplitudes.tolist()})"


class LinOperator:
    __slots__ = ("matrix",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"operator must be square, got shape {m.shape}")
        _check_dim(m.shape[0])
        if not np.all(np.isfinite(m)):
            raise DomainError("operator entries must be finite")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def adjoint(self) -> "LinOperator":
        return LinOperator(self.matrix.conj().T)


class Projector(LinOperator):
    """Self-adjoint idempotent operator, checked on construction."""

    __slots__ = ()

    def __init__(self, matrix):
        super().__init__(matrix)
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > PROJECTOR_TOL:
            raise DomainError("projector is not self-adjoint")
        if np.max(np.abs(m @ m - m)) > PROJECTOR_TOL:
            raise DomainError("projector is not idempotent")

    def complement(self) -> "Projector":
        return Projector(np.eye(self.dim) - self.matrix)


@dataclass(frozen=True)
class ClassicalDistribution:
    weights: Mapping[str, float]

    def __post_init__(self):
        w = {k: float(v) for k, v in self.weights.items()}
        if any(v < 0 or not np.isfinite(v) for v in w.values()):
            raise DomainError("weights must be finite and non-negative")
        if abs(sum(w.values()) - 1.0) > 1e-12:
            raise DomainError(f"weights sum to {sum(w.values())!r}, expected 1")
        object.__setattr__(self, "weights", w)

    def measure(self, event: Iterable[str]) -> float:
        event = set(event)
        unknown = event - set(self.weights)
        if unknown:
            raise DomainError(f"unknown world {sorted(unknown)[0]!r}")
        return sum(self.weights[k] for k in event)

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.weights.items())))


def _same_dim(*ops) -> int:
    dims = {op.dim for op in ops}
    if len(dims) != 1:
        raise DomainError(f"dimension mismatch: {sorted(dims)}")
    return dims.pop()


def make_projector(vectors: Sequence[Iterable[complex]]) -> Projector:
    """Projector onto the span of ``vectors`` via modified Gram-Schmidt.

    A vector whose component orthogonal to the earlier ones is below
    ``GRAM_SCHMIDT_TOL`` relative to its own norm is rejected.
    """
    if not vectors:
        raise RankError("spanning set is empty")
    cols = [np.asarray(list(v), dtype=np.complex128).reshape(-1) for v in vectors]
    dim = cols[0].size
    _check_dim(dim)
    if any(c.size != dim for c in cols):
        raise DomainError("spanning vectors have different lengths")
    basis: list[np.ndarray] = []
    for k, v in enumerate(cols):
        norm = np.linalg.norm(v)
        if norm < GRAM_SCHMIDT_TOL:
            raise RankError(f"spanning vector {k} is zero")
        u = v.copy()
        for b in basis:
            u = u - np.vdot(b, u) * b
        rest = np.linalg.norm(u)
        if rest < GRAM_SCHMIDT_TOL * norm:
            raise RankError(f"spanning vector {k} is linearly dependent on the previous ones")
        basis.append(u / rest)
    p = sum(np.outer(b, b.conj()) for b in basis)
    return Projector(p)


def born_prob(psi: StateVector, p: LinOperator) -> float:
    _same_dim(psi, p)
    a = psi.amplitudes
    val = np.vdot(a, p.matrix @ a).real
    return float(min(1.0, max(0.0, val)))


def collapse(psi: StateVector, p: Projector) -> StateVector:
    prob = born_prob(psi, p)
    if prob <= PROB_FLOOR:
        raise CollapseError(f"cannot collapse onto a subspace of probability {prob!r}")
    v = p.matrix @ psi.amplitudes
    return StateVector(v / np.linalg.norm(v))


def luders_conditional(psi: StateVector, a: Projector, b: Projector) -> float:
    """<psi|A B A|psi> / <psi|A|psi>."""
    _same_dim(psi, a, b)
    pa = born_prob(psi, a)
    if pa <= PROB_FLOOR:
        raise ConditioningError(f"conditioning on a question with probability {pa!r}")
    v = a.matrix @ psi.amplitudes
    return float(np.vdot(v, b.matrix @ v).real / pa)


def general_conditional(psi: StateVector, a: LinOperator, b: Projector) -> float:
    """<psi|A† B A|psi> / <psi|A† A|psi> for an arbitrary operator A."""
    _same_dim(psi, a, b)
    v = a.matrix @ psi.amplitudes
    denom = np.vdot(v, v).real
    if denom <= PROB_FLOOR:
        raise ConditioningError(f"<psi|A†A|psi> = {denom!r} is too small to condition on")
    return float(np.vdot(v, b.matrix @ v).real / denom)


def bayes_conditional(rho: ClassicalDistribution, a: Iterable[str], b: Iterable[str]) -> float:
    a, b = set(a), set(b)
    pa = rho.measure(a)
    if pa <= 0:
        raise ConditioningError("conditioning on an event of probability 0")
    return rho.measure(a & b) / pa


def sequential_prob(psi: StateVector, chain: Sequence[LinOperator]) -> float:
    """||P_k ... P_1 psi||^2, applying ``chain`` in list order."""
    if not chain:
        raise PreconditionError("chain must contain at least one projector")
    _same_dim(psi, *chain)
    v = psi.amplitudes
    for p in chain:
        v = p.matrix @ v
    return float(np.vdot(v, v).real)


@dataclass(frozen=True)
class OrderEffectReport:
    """Joint answer probabilities for both question orders.

    Keys follow answer order: ``"AyBn"`` is A asked first and answered yes,
    then B answered no. ``differences`` is keyed by ``"AyBn"`` and holds
    p(A then B) - p(B then A) for the same pair of answers.
    """

    a_first: dict
    b_first: dict
    differences: dict
    commutator_norm: float
    qq_discrepancy: float

    @property
    def max_difference(self) -> float:
        return max(abs(v) for v in self.differences.values())

    def to_dict(self) -> dict:
        return {
            "a_first": dict(self.a_first),
            "b_first": dict(self.b_first),
            "differences": dict(self.differences),
            "commutator_norm": self.commutator_norm,
            "qq_discrepancy": self.qq_discrepancy,
        }


def commutator_norm(a: LinOperator, b: LinOperator) -> float:
    _same_dim(a, b)
    return float(np.max(np.abs(a.matrix @ b.matrix - b.matrix @ a.matrix)))


def order_effect_report(psi: StateVector, a: Projector, b: Projector) -> OrderEffectReport:
    _same_dim(psi, a, b)
    answers = {"y": a, "n": a.complement()}, {"y": b, "n": b.complement()}
    a_first, b_first, diffs = {}, {}, {}
    for x in "yn":
        for y in "yn":
            pa, pb = answers[0][x], answers[1][y]
            a_first[f"A{x}B{y}"] = sequential_prob(psi, [pa, pb])
            b_first[f"B{y}A{x}"] = sequential_prob(psi, [pb, pa])
            diffs[f"A{x}B{y}"] = a_first[f"A{x}B{y}"] - b_first[f"B{y}A{x}"]
    q = (a_first["AyBn"] + a_first["AnBy"]) - (b_first["ByAn"] + b_first["BnAy"])
    return OrderEffectReport(a_first, b_first, diffs, commutator_norm(a, b), q)


def induced_distribution(psi: StateVector) -> ClassicalDistribution:
    """|amplitude|^2 over basis labels ``"0"``, ``"1"``, ..."""
    p = np.abs(psi.amplitudes) ** 2
    p = p / p.sum()
    return ClassicalDistribution({str(i): float(v) for i, v in enumerate(p)})


def diagonal_projector(dim: int, support: Iterable[int]) -> Projector:
    d = np.zeros(dim)
    d[list(support)] = 1.0
    return Projector(np.diag(d))
