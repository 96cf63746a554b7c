"""Possible-worlds update semantics with a Veltman-style ``might`` test.

An information state is a ``frozenset`` of live worlds; the empty set is the
absurd state. Assertions eliminate worlds, ``might`` either passes the state
through unchanged or crashes it to the empty set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .algebra import GENERAL, PROPOSITION, EpistemicOperator, StateSpace
from .errors import CapacityError, DomainError, PreconditionError

InfoState = frozenset
ABSURD: frozenset = frozenset()

MAX_LIFT_WORLDS = 12

COHERENT = "coherent"
ABSURD_VERDICT = "absurd"


@dataclass(frozen=True)
class WorldModel:
    worlds: tuple
    valuation: Mapping[str, frozenset]

    def __init__(self, worlds: Iterable[str], valuation: Mapping[str, Iterable[str]]):
        worlds = tuple(worlds)
        if len(set(worlds)) != len(worlds):
            raise DomainError("world identifiers must be unique")
        known = set(worlds)
        val = {}
        for atom, ws in valuation.items():
            ws = frozenset(ws)
            stray = ws - known
            if stray:
                raise DomainError(f"atom {atom!r} is true at unknown world {sorted(stray)[0]!r}")
            val[atom] = ws
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "valuation", val)

    @property
    def atoms(self) -> tuple[str, ...]:
        return tuple(self.valuation)

    def full_state(self) -> frozenset:
        return frozenset(self.worlds)

    def __hash__(self) -> int:
        return hash((self.worlds, tuple(sorted(self.valuation.items(), key=lambda kv: kv[0]))))


# ---------------------------------------------------------------- formulas

class StaticFormula:
    pass


@dataclass(frozen=True)
class Atom(StaticFormula):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not(StaticFormula):
    arg: StaticFormula

    def __str__(self) -> str:
        return f"¬{self.arg}"


@dataclass(frozen=True)
class And(StaticFormula):
    left: StaticFormula
    right: StaticFormula

    def __str__(self) -> str:
        return f"({self.left} ∧ {self.right})"


@dataclass(frozen=True)
class Or(StaticFormula):
    left: StaticFormula
    right: StaticFormula

    def __str__(self) -> str:
        return f"({self.left} ∨ {self.right})"


def atoms_of(phi: StaticFormula) -> set[str]:
    if isinstance(phi, Atom):
        return {phi.name}
    if isinstance(phi, Not):
        return atoms_of(phi.arg)
    return atoms_of(phi.left) | atoms_of(phi.right)


def truth_set(model, phi: StaticFormula) -> frozenset:
    """Worlds of ``model`` where the static formula ``phi`` holds."""
    if isinstance(phi, Atom):
        try:
            return model.valuation[phi.name]
        except KeyError:
            raise DomainError(f"unknown atom {phi.name!r}") from None
    if isinstance(phi, Not):
        return frozenset(model.worlds) - truth_set(model, phi.arg)
    if isinstance(phi, And):
        return truth_set(model, phi.left) & truth_set(model, phi.right)
    if isinstance(phi, Or):
        return truth_set(model, phi.left) | truth_set(model, phi.right)
    raise DomainError(f"not a static formula: {phi!r}")


class DynamicFormula:
    """An utterance: something that maps information states to states."""

    #: Whether the lifted operator is claimed to be a proposition.
    claimed_class = GENERAL

    def run(self, model, state: frozenset) -> frozenset:
        raise NotImplementedError


@dataclass(frozen=True)
class Assert(DynamicFormula):
    phi: StaticFormula
    claimed_class = PROPOSITION

    def run(self, model, state):
        return state & truth_set(model, self.phi)

    def __str__(self) -> str:
        return f"{self.phi}"


@dataclass(frozen=True)
class Might(DynamicFormula):
    phi: StaticFormula

    def run(self, model, state):
        return might(model, state, self.phi)

    def __str__(self) -> str:
        return f"might {self.phi}"


@dataclass(frozen=True)
class Seq(DynamicFormula):
    parts: tuple

    def __init__(self, parts: Sequence[DynamicFormula]):
        parts = tuple(parts)
        if not parts:
            raise PreconditionError("seq needs at least one formula")
        object.__setattr__(self, "parts", parts)

    @property
    def claimed_class(self):
        if all(p.claimed_class == PROPOSITION for p in self.parts):
            return PROPOSITION
        return GENERAL

    def run(self, model, state):
        for part in self.parts:
            state = part.run(model, state)
        return state

    def __str__(self) -> str:
        return "; ".join(str(p) for p in self.parts)


# --------------------------------------------------------------- semantics

def update(model, state: frozenset, formula: DynamicFormula) -> frozenset:
    return formula.run(model, frozenset(state))


def might(model, state: frozenset, phi: StaticFormula) -> frozenset:
    """Consistency test: ``state`` if some live world satisfies ``phi``."""
    state = frozenset(state)
    return state if state & truth_set(model, phi) else ABSURD


@dataclass(frozen=True)
class DiscourseResult:
    trace: tuple
    verdict: str

    @property
    def final(self) -> frozenset:
        return self.trace[-1]


def run_discourse(model, initial: Iterable[str], discourse: Sequence[DynamicFormula]) -> DiscourseResult:
    """Fold the utterances left to right; ``trace[0]`` is the initial state.

    The verdict is ``absurd`` exactly when a non-empty initial state ends up
    empty.
    """
    state = frozenset(initial)
    trace = [state]
    for formula in discourse:
        state = formula.run(model, state)
        trace.append(state)
    verdict = ABSURD_VERDICT if (trace[0] and not state) else COHERENT
    return DiscourseResult(tuple(trace), verdict)


def powerset_space(model) -> StateSpace:
    """All ``2**n`` information states, ordered by bitmask; ∅ is absurd."""
    worlds = tuple(model.worlds)
    n = len(worlds)
    if n > MAX_LIFT_WORLDS:
        raise CapacityError(
            f"{n} worlds give {2 ** n} information states; the limit is {MAX_LIFT_WORLDS} worlds")
    return _powerset_space(worlds)


@lru_cache(maxsize=256)
def _powerset_space(worlds: tuple) -> StateSpace:
    n = len(worlds)
    states = [frozenset(w for k, w in enumerate(worlds) if mask >> k & 1) for mask in range(1 << n)]
    return StateSpace(tuple(states), ABSURD)


def lift_to_operator(model, formula: DynamicFormula, name: str | None = None) -> EpistemicOperator:
    """Tabulate ``formula`` on every information state of ``model``."""
    space = powerset_space(model)
    return EpistemicOperator.from_function(
        name or str(formula), space, lambda s: formula.run(model, s), formula.claimed_class)


def knocking_model() -> WorldModel:
    """Three worlds: nobody knocks, John knocks, Mary knocks."""
    return WorldModel(
        ["w0", "wJ", "wM"],
        {"K": ["wJ", "wM"], "J": ["wJ"], "M": ["wM"]},
    )
