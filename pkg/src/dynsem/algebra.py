"""Operator algebra over finite, enumerated state spaces.

States are opaque hashable identifiers. An operator is stored as a tuple of
image indices aligned with ``StateSpace.states``, so every law (identity,
zero, associativity, idempotency, compatibility, acceptance, consequence) is
decided by comparing tables state by state.

Composition convention: ``compose(a, b)(x) == a(b(x))``, i.e. ``b`` acts
first. Reading a product ``AB`` right to left on states gives the same order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import DomainError, PreconditionError

PROPOSITION = "proposition"
REVISION = "revision"
GENERAL = "general"
OPERATOR_CLASSES = (PROPOSITION, REVISION, GENERAL)


@dataclass(frozen=True)
class StateSpace:
    states: tuple
    absurd_id: Hashable
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise DomainError("state space must be non-empty")
        index = {s: i for i, s in enumerate(states)}
        if len(index) != len(states):
            raise DomainError("state identifiers must be unique")
        if self.absurd_id not in index:
            raise DomainError(f"absurd state {self.absurd_id!r} is not a member of the space")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator:
        return iter(self.states)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index(self, x) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise DomainError(f"unknown state {x!r}") from None

    @property
    def absurd_index(self) -> int:
        return self._index[self.absurd_id]


class EpistemicOperator:
    """A named total function on a :class:`StateSpace`.

    Equality and hashing are extensional: two operators are equal when they
    live on the same space and have the same table. The name is metadata.
    """

    __slots__ = ("name", "space", "images", "claimed_class")

    def __init__(self, name: str, space: StateSpace, images: Sequence[int],
                 claimed_class: str = GENERAL):
        images = tuple(images)
        if claimed_class not in OPERATOR_CLASSES:
            raise DomainError(f"unknown operator class {claimed_class!r}")
        if len(images) != len(space):
            raise DomainError(f"operator {name!r}: table has {len(images)} entries, space has {len(space)}")
        n = len(space)
        for i in images:
            if not 0 <= i < n:
                raise DomainError(f"operator {name!r}: image index {i} out of range")
        o = space.absurd_index
        if images[o] != o:
            raise PreconditionError(
                f"operator {name!r} violates the zero-state law A(o) = o: "
                f"maps {space.absurd_id!r} to {space.states[images[o]]!r}")
        self.name = name
        self.space = space
        self.images = images
        self.claimed_class = claimed_class

    @classmethod
    def _trusted(cls, name: str, space: StateSpace, images: tuple, claimed_class: str) -> "EpistemicOperator":
        # Products of valid operators are valid; skip re-validation.
        op = object.__new__(cls)
        op.name, op.space, op.images, op.claimed_class = name, space, images, claimed_class
        return op

    @classmethod
    def from_mapping(cls, name: str, space: StateSpace, mapping: Mapping,
                     claimed_class: str = GENERAL) -> "EpistemicOperator":
        missing = [s for s in space.states if s not in mapping]
        if missing:
            raise DomainError(f"operator {name!r}: table is not total, missing {missing[0]!r}")
        return cls(name, space, [space.index(mapping[s]) for s in space.states], claimed_class)

    @classmethod
    def from_function(cls, name: str, space: StateSpace, fn: Callable,
                      claimed_class: str = GENERAL) -> "EpistemicOperator":
        return cls(name, space, [space.index(fn(s)) for s in space.states], claimed_class)

    def table(self) -> dict:
        states = self.space.states
        return {states[i]: states[j] for i, j in enumerate(self.images)}

    def __call__(self, x):
        return apply(self, x)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpistemicOperator):
            return NotImplemented
        return self.images == other.images and (self.space is other.space or self.space == other.space)

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"EpistemicOperator({self.name!r}, {len(self.space)} states, {self.claimed_class})"


def _same_space(a: EpistemicOperator, b: EpistemicOperator) -> None:
    if a.space is not b.space and a.space != b.space:
        raise DomainError(f"operators {a.name!r} and {b.name!r} act on different state spaces")


def apply(op: EpistemicOperator, x):
    """Return ``op(x)``."""
    space = op.space
    return space.states[op.images[space.index(x)]]


def compose(a: EpistemicOperator, b: EpistemicOperator) -> EpistemicOperator:
    """The product ``a∘b``: apply ``b`` first, then ``a``."""
    _same_space(a, b)
    ai = a.images
    images = tuple([ai[j] for j in b.images])
    return EpistemicOperator._trusted(f"{a.name}∘{b.name}", a.space, images, GENERAL)


def compose_all(ops: Sequence[EpistemicOperator]) -> EpistemicOperator:
    """Left-to-right product ``ops[0]∘ops[1]∘...``; the last one acts first."""
    if not ops:
        raise PreconditionError("compose_all needs at least one operator")
    result = ops[0]
    for op in ops[1:]:
        result = compose(result, op)
    return result


def identity_op(space: StateSpace) -> EpistemicOperator:
    return EpistemicOperator("𝟙", space, range(len(space)), PROPOSITION)


def zero_op(space: StateSpace) -> EpistemicOperator:
    return EpistemicOperator("0", space, [space.absurd_index] * len(space), PROPOSITION)


def is_idempotent(op: EpistemicOperator) -> bool:
    t = op.images
    return all(t[t[i]] == t[i] for i in range(len(t)))


def is_compatible(a: EpistemicOperator, b: EpistemicOperator) -> bool:
    """True iff ``a∘b`` and ``b∘a`` agree on every state."""
    _same_space(a, b)
    ta, tb = a.images, b.images
    return all(ta[tb[i]] == tb[ta[i]] for i in range(len(ta)))


def accepts(x, op: EpistemicOperator) -> bool:
    return apply(op, x) == x


def entails(a: EpistemicOperator, b: EpistemicOperator) -> bool:
    """Logical consequence between propositions: ``b∘a == a∘b == a``.

    Both arguments must be idempotent and compatible with each other.
    """
    _same_space(a, b)
    for op in (a, b):
        if not is_idempotent(op):
            raise PreconditionError(f"entails: {op.name!r} is not a proposition (idempotency law A∘A = A fails)")
    if not is_compatible(a, b):
        raise PreconditionError(
            f"entails: {a.name!r} and {b.name!r} are not propositions together (compatibility law AB = BA fails)")
    ta, tb = a.images, b.images
    return all(tb[ta[i]] == ta[i] for i in range(len(ta)))


def incompatibility_witness(a: EpistemicOperator, b: EpistemicOperator):
    """First state on which ``a∘b`` and ``b∘a`` differ, or ``None``."""
    _same_space(a, b)
    ta, tb = a.images, b.images
    for i in range(len(ta)):
        if ta[tb[i]] != tb[ta[i]]:
            return a.space.states[i]
    return None


class OperatorRegistry:
    """An ordered collection of operators over one space.

    The identity and zero operators are registered on construction.
    """

    def __init__(self, space: StateSpace, operators: Iterable[EpistemicOperator] = ()):
        self.space = space
        self.operators: list[EpistemicOperator] = []
        self.register(identity_op(space))
        self.register(zero_op(space))
        for op in operators:
            self.register(op)

    def register(self, op: EpistemicOperator) -> EpistemicOperator:
        if op.space != self.space:
            raise DomainError(f"operator {op.name!r} does not act on the registry's space")
        self.operators.append(op)
        return op

    def __iter__(self) -> Iterator[EpistemicOperator]:
        return iter(self.operators)

    def __len__(self) -> int:
        return len(self.operators)

    def get(self, name: str) -> EpistemicOperator:
        for op in self.operators:
            if op.name == name:
                return op
        raise DomainError(f"no registered operator named {name!r}")

    def propositions(self) -> list[EpistemicOperator]:
        return [op for op in self.operators if op.claimed_class == PROPOSITION]

    def incompatible_propositions(self, op: EpistemicOperator) -> list[EpistemicOperator]:
        return [p for p in self.propositions() if p is not op and not is_compatible(op, p)]

    def classify(self, op: EpistemicOperator) -> str:
        """Verified class of ``op`` relative to the registered propositions.

        ``proposition`` when idempotent and compatible with every registered
        proposition; otherwise the claimed class, or ``general`` when the
        claim was ``proposition``.
        """
        if is_idempotent(op) and not self.incompatible_propositions(op):
            return PROPOSITION
        return GENERAL if op.claimed_class == PROPOSITION else op.claimed_class

    def violations(self) -> list[str]:
        """Describe every operator whose claimed class does not hold up."""
        out = []
        for op in self.operators:
            if op.claimed_class != PROPOSITION:
                continue
            if not is_idempotent(op):
                out.append(f"{op.name}: claimed proposition but not idempotent")
            for p in self.incompatible_propositions(op):
                out.append(f"{op.name}: claimed proposition but incompatible with {p.name}")
        return out
