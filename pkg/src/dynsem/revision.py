"""Belief revision over ranked worlds (Grove spheres).

Rank 0 is the most plausible sphere. Revising by a formula that is
consistent with the current state is plain expansion; otherwise the state
jumps to the lowest-ranked worlds satisfying the formula. The absurd state
stays absurd.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .algebra import REVISION, EpistemicOperator
from .errors import DomainError
from .worlds import ABSURD, DynamicFormula, StaticFormula, WorldModel, lift_to_operator, truth_set


@dataclass(frozen=True)
class PlausibilityModel:
    base: WorldModel
    rank: Mapping[str, int]

    def __post_init__(self):
        rank = dict(self.rank)
        missing = [w for w in self.base.worlds if w not in rank]
        if missing:
            raise DomainError(f"world {missing[0]!r} has no plausibility rank")
        stray = [w for w in rank if w not in set(self.base.worlds)]
        if stray:
            raise DomainError(f"rank given for unknown world {stray[0]!r}")
        for w, r in rank.items():
            if not isinstance(r, int) or isinstance(r, bool) or r < 0:
                raise DomainError(f"rank of {w!r} must be a non-negative integer, got {r!r}")
        if 0 not in rank.values():
            raise DomainError("at least one world must have rank 0")
        object.__setattr__(self, "rank", rank)

    # Duck-type as a WorldModel so truth_set and the worlds engine accept it.
    @property
    def worlds(self) -> tuple:
        return self.base.worlds

    @property
    def valuation(self):
        return self.base.valuation

    @property
    def atoms(self) -> tuple:
        return self.base.atoms

    def full_state(self) -> frozenset:
        return self.base.full_state()

    def __hash__(self) -> int:
        return hash((self.base, tuple(sorted(self.rank.items()))))


def minimal_worlds(model: PlausibilityModel, worlds: frozenset) -> frozenset:
    if not worlds:
        return ABSURD
    best = min(model.rank[w] for w in worlds)
    return frozenset(w for w in worlds if model.rank[w] == best)


def expand(model, state: frozenset, phi: StaticFormula) -> frozenset:
    """Plain expansion; contradictory input crashes to the absurd state."""
    return frozenset(state) & truth_set(model, phi)


def revise(model: PlausibilityModel, state: frozenset, phi: StaticFormula) -> frozenset:
    state = frozenset(state)
    if not state:
        return ABSURD
    models_phi = truth_set(model, phi)
    kept = state & models_phi
    if kept:
        return kept
    return minimal_worlds(model, models_phi)


@dataclass(frozen=True)
class Revise(DynamicFormula):
    phi: StaticFormula
    claimed_class = REVISION

    def run(self, model, state):
        if not isinstance(model, PlausibilityModel):
            raise DomainError(f"revision by {self.phi} needs a model with plausibility ranks")
        return revise(model, state, self.phi)

    def __str__(self) -> str:
        return f"*{self.phi}"


def revision_operator(model: PlausibilityModel, phi: StaticFormula, name: str | None = None) -> EpistemicOperator:
    return lift_to_operator(model, Revise(phi), name or f"({phi})*")


def moon_model() -> PlausibilityModel:
    """Blue cheese (rank 0), stone (rank 1), gas (rank 2)."""
    base = WorldModel(
        ["w_cheese", "w_stone", "w_gas"],
        {"A": ["w_cheese"], "B": ["w_stone"]},
    )
    return PlausibilityModel(base, {"w_cheese": 0, "w_stone": 1, "w_gas": 2})
