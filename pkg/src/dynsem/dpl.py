"""Dynamic predicate logic with a salience stack for pronouns.

A program denotes a relation between input and output pairs
``(Assignment, DiscourseContext)``. ``eval_program`` maps a set of inputs to
the set of all outputs. Every individual introduced by ``RandomAssign`` or
``Introduce`` is pushed onto the discourse context; ``Pronoun`` binds its
variable to the most recent referent carrying all requested tags.

Test arguments that name a domain individual are constants; everything else
is a variable and must be bound. Universal quantification is written
``Neg(Seq([RandomAssign(x), Neg(body)]))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, EvaluationError, PreconditionError, ResolutionError

MAX_EXHAUSTIVE_SENTENCES = 4


@dataclass(frozen=True)
class FOModel:
    domain: tuple
    predicates: Mapping[str, tuple]
    sorts: Mapping[str, frozenset]

    def __init__(self, domain: Iterable[str],
                 predicates: Mapping[str, tuple[int, Iterable[Sequence[str]]]] = None,
                 sorts: Mapping[str, Iterable[str]] = None):
        domain = tuple(domain)
        if not domain:
            raise DomainError("first-order model needs a non-empty domain")
        if len(set(domain)) != len(domain):
            raise DomainError("domain individuals must be unique")
        known = set(domain)
        preds = {}
        for name, (arity, tuples) in (predicates or {}).items():
            ext = frozenset(tuple(t) for t in tuples)
            for t in ext:
                if len(t) != arity:
                    raise DomainError(f"predicate {name!r} has arity {arity}, tuple {t} does not fit")
                for ind in t:
                    if ind not in known:
                        raise DomainError(f"predicate {name!r} mentions unknown individual {ind!r}")
            preds[name] = (arity, ext)
        tags = {ind: frozenset() for ind in domain}
        for ind, ts in (sorts or {}).items():
            if ind not in known:
                raise DomainError(f"sort tags given for unknown individual {ind!r}")
            tags[ind] = frozenset(ts)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "predicates", preds)
        object.__setattr__(self, "sorts", tags)

    def __hash__(self) -> int:
        return hash(self.domain)


@dataclass(frozen=True)
class Assignment:
    """Partial map from variables to individuals, kept as sorted pairs."""

    items: tuple = ()

    @classmethod
    def of(cls, mapping: Mapping[str, str] = None) -> "Assignment":
        return cls(tuple(sorted((mapping or {}).items())))

    def get(self, var: str):
        for k, v in self.items:
            if k == var:
                return v
        return None

    def bind(self, var: str, individual: str) -> "Assignment":
        d = dict(self.items)
        d[var] = individual
        return Assignment(tuple(sorted(d.items())))

    def as_dict(self) -> dict:
        return dict(self.items)


@dataclass(frozen=True)
class DiscourseContext:
    """Referent stack; the last entry is the most salient."""

    referents: tuple = ()

    def push(self, individual: str, tags: frozenset) -> "DiscourseContext":
        return DiscourseContext(self.referents + ((individual, frozenset(tags)),))

    def individuals(self) -> list[str]:
        return [ind for ind, _ in self.referents]


EMPTY_INPUT = (Assignment(), DiscourseContext())


# ----------------------------------------------------------------- programs

class DplProgram:
    pass


@dataclass(frozen=True)
class RandomAssign(DplProgram):
    var: str

    def __str__(self):
        return f"∃{self.var}"


@dataclass(frozen=True)
class Introduce(DplProgram):
    """A proper name: random assignment pinned to one individual."""

    var: str
    individual: str

    def __str__(self):
        return f"{self.var}:={self.individual}"


@dataclass(frozen=True)
class Test(DplProgram):
    pred: str
    args: tuple

    def __init__(self, pred: str, args: Sequence[str]):
        object.__setattr__(self, "pred", pred)
        object.__setattr__(self, "args", tuple(args))

    def __str__(self):
        return f"{self.pred}({', '.join(self.args)})"


@dataclass(frozen=True)
class Neg(DplProgram):
    body: DplProgram

    def __str__(self):
        return f"¬[{self.body}]"


@dataclass(frozen=True)
class Seq(DplProgram):
    parts: tuple

    def __init__(self, parts: Sequence[DplProgram]):
        parts = tuple(parts)
        if not parts:
            raise PreconditionError("seq needs at least one program")
        object.__setattr__(self, "parts", parts)

    def __str__(self):
        return "; ".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class Pronoun(DplProgram):
    var: str
    tags: frozenset = field(default_factory=frozenset)

    def __init__(self, var: str, tags: Iterable[str] = ()):
        object.__setattr__(self, "var", var)
        object.__setattr__(self, "tags", frozenset(tags))

    def __str__(self):
        return f"{self.var}⟨{','.join(sorted(self.tags))}⟩"


# --------------------------------------------------------------- semantics

def resolve_pronoun(ctx: DiscourseContext, tags: Iterable[str]) -> str:
    """Most recently introduced referent whose tags include ``tags``."""
    wanted = frozenset(tags)
    for individual, have in reversed(ctx.referents):
        if wanted <= have:
            return individual
    constraint = ", ".join(sorted(wanted)) or "(none)"
    raise ResolutionError(f"no referent in context satisfies constraints {{{constraint}}}")


def _value(model: FOModel, assignment: Assignment, arg: str) -> str:
    if arg in model.sorts:
        return arg
    value = assignment.get(arg)
    if value is None:
        raise EvaluationError(f"variable {arg!r} is unbound")
    return value


def eval_program(model: FOModel, inputs: Iterable[tuple], program: DplProgram,
                 bindings: dict | None = None) -> frozenset:
    """All outputs of ``program`` reachable from ``inputs``.

    ``bindings``, if given, collects ``var -> set of individuals`` for every
    pronoun resolved along the way, including branches that later fail.
    """
    inputs = frozenset(inputs)
    if isinstance(program, Seq):
        current = inputs
        for part in program.parts:
            current = eval_program(model, current, part, bindings)
        return current
    if isinstance(program, RandomAssign):
        return frozenset(
            (g.bind(program.var, d), ctx.push(d, model.sorts[d]))
            for g, ctx in inputs for d in model.domain)
    if isinstance(program, Introduce):
        d = program.individual
        if d not in model.sorts:
            raise DomainError(f"unknown individual {d!r}")
        return frozenset((g.bind(program.var, d), ctx.push(d, model.sorts[d])) for g, ctx in inputs)
    if isinstance(program, Test):
        try:
            arity, ext = model.predicates[program.pred]
        except KeyError:
            raise DomainError(f"unknown predicate {program.pred!r}") from None
        if len(program.args) != arity:
            raise EvaluationError(
                f"predicate {program.pred!r} takes {arity} argument(s), got {len(program.args)}")
        return frozenset(
            (g, ctx) for g, ctx in inputs
            if tuple(_value(model, g, a) for a in program.args) in ext)
    if isinstance(program, Neg):
        return frozenset(
            (g, ctx) for g, ctx in inputs
            if not eval_program(model, [(g, ctx)], program.body, bindings))
    if isinstance(program, Pronoun):
        out = set()
        for g, ctx in inputs:
            d = resolve_pronoun(ctx, program.tags)
            if bindings is not None:
                bindings.setdefault(program.var, set()).add(d)
            out.add((g.bind(program.var, d), ctx))
        return frozenset(out)
    raise DomainError(f"not a DPL program: {program!r}")


@dataclass(frozen=True)
class TextReport:
    outputs: frozenset
    bindings: dict
    order_sensitive: bool


def _flatten_bindings(raw: dict) -> dict:
    return {var: (next(iter(v)) if len(v) == 1 else sorted(v)) for var, v in sorted(raw.items())}


def pronoun_bindings(model: FOModel, sentences: Sequence[DplProgram]) -> tuple[frozenset, dict]:
    raw: dict = {}
    outputs = eval_program(model, [EMPTY_INPUT], Seq(list(sentences)), raw)
    return outputs, _flatten_bindings(raw)


def _signature(model: FOModel, sentences: Sequence[DplProgram]):
    try:
        return tuple(sorted(pronoun_bindings(model, sentences)[1].items(), key=str))
    except ResolutionError as exc:
        return ("unresolved", exc.message)


def sentence_orders(n: int) -> list[tuple[int, ...]]:
    """All permutations for short texts, adjacent swaps for longer ones."""
    if n <= MAX_EXHAUSTIVE_SENTENCES:
        return list(itertools.permutations(range(n)))
    orders = [tuple(range(n))]
    for i in range(n - 1):
        order = list(range(n))
        order[i], order[i + 1] = order[i + 1], order[i]
        orders.append(tuple(order))
    return orders


def run_text_discourse(model: FOModel, sentences: Sequence[DplProgram]) -> TextReport:
    if not sentences:
        raise PreconditionError("a text needs at least one sentence")
    outputs, bindings = pronoun_bindings(model, sentences)
    reference = _signature(model, sentences)
    sensitive = any(
        _signature(model, [sentences[i] for i in order]) != reference
        for order in sentence_orders(len(sentences))[1:])
    return TextReport(outputs, bindings, sensitive)


def story_model() -> FOModel:
    return FOModel(
        ["John", "George", "Table1", "Hat1"],
        predicates={
            "table": (1, [("Table1",)]),
            "hat": (1, [("Hat1",)]),
            "sat_at": (2, [("John", "Table1")]),
            "came_in": (1, [("George",)]),
            "wears": (2, [("John", "Hat1"), ("George", "Hat1")]),
        },
        sorts={"John": ["male"], "George": ["male"], "Table1": ["inanimate"], "Hat1": ["inanimate"]},
    )


def story_sentences() -> dict[str, DplProgram]:
    """John sat at the table / George came in / he was wearing a hat."""
    return {
        "A": Seq([Introduce("x", "John"), RandomAssign("t"), Test("table", ["t"]), Test("sat_at", ["x", "t"])]),
        "B": Seq([Introduce("y", "George"), Test("came_in", ["y"])]),
        "C": Seq([Pronoun("he", ["male"]), RandomAssign("h"), Test("hat", ["h"]), Test("wears", ["he", "h"])]),
    }
