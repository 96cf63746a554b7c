"""Randomized property suites behind ``dynsem check``.

Each suite takes a seed and a case count and returns a :class:`SuiteResult`.
Laws are checked extensionally against small brute-force oracles written
with :func:`dynsem.algebra.apply` only, so they do not share code paths with
the table-level fast checks they verify.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra as alg
from . import quantum as qm
from .errors import ParseError, PreconditionError
from .lang.sexpr import SAtom, SList, format_all, parse_all
from .revision import PlausibilityModel, revise, revision_operator
from .worlds import And, Assert, Atom, Might, Not, Or, WorldModel, lift_to_operator, truth_set

DEFAULT_SEED = 7


@dataclass
class SuiteResult:
    name: str
    cases: int
    violations: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f", {len(self.violations)} violation(s)" if self.violations else ""
        return f"[{status}] {self.name}: {self.cases} cases in {self.seconds:.3f}s{extra}"


def _timed(fn: Callable) -> Callable:
    def wrapper(seed: int = DEFAULT_SEED, cases: int | None = None) -> SuiteResult:
        start = time.perf_counter()
        result = fn(seed, cases) if cases is not None else fn(seed)
        result.seconds = time.perf_counter() - start
        return result
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# ------------------------------------------------------------ generators

def random_formula(rng: random.Random, atoms: list[str], depth: int = 2):
    if depth == 0 or rng.random() < 0.4:
        return Atom(rng.choice(atoms))
    kind = rng.choice(("not", "and", "or"))
    if kind == "not":
        return Not(random_formula(rng, atoms, depth - 1))
    cls = And if kind == "and" else Or
    return cls(random_formula(rng, atoms, depth - 1), random_formula(rng, atoms, depth - 1))


def random_model(rng: random.Random, max_worlds: int = 4, n_atoms: int = 3) -> WorldModel:
    worlds = [f"w{i}" for i in range(rng.randint(1, max_worlds))]
    valuation = {a: [w for w in worlds if rng.random() < 0.5] for a in "pqr"[:n_atoms]}
    return WorldModel(worlds, valuation)


def random_ranked(rng: random.Random, max_worlds: int = 4) -> PlausibilityModel:
    base = random_model(rng, max_worlds)
    ranks = {w: rng.randint(0, 3) for w in base.worlds}
    ranks[rng.choice(base.worlds)] = 0
    return PlausibilityModel(base, ranks)


def random_state(rng: random.Random, model) -> frozenset:
    return frozenset(w for w in model.worlds if rng.random() < 0.5)


def random_morphism(rng: random.Random, space: alg.StateSpace, name: str) -> alg.EpistemicOperator:
    o = space.absurd_index
    images = [o if i == o else rng.randrange(len(space)) for i in range(len(space))]
    return alg.EpistemicOperator(name, space, images)


# -------------------------------------------------------- brute oracles

def brute_compose_equal(a, b, target) -> bool:
    return all(alg.apply(a, alg.apply(b, x)) == alg.apply(target, x) for x in a.space)


def brute_idempotent(op) -> bool:
    return all(alg.apply(op, alg.apply(op, x)) == alg.apply(op, x) for x in op.space)


def brute_commute(a, b) -> bool:
    return all(alg.apply(a, alg.apply(b, x)) == alg.apply(b, alg.apply(a, x)) for x in a.space)


def model_operators(rng: random.Random, model: PlausibilityModel) -> dict:
    atoms = list(model.atoms)
    phis = [Atom(a) for a in atoms] + [random_formula(rng, atoms)]
    asserts = [lift_to_operator(model, Assert(phi), f"assert {phi}") for phi in phis]
    mights = [lift_to_operator(model, Might(Atom(a)), f"might {a}") for a in atoms]
    revisions = [revision_operator(model, Not(Atom(rng.choice(atoms))))]
    general = [random_morphism(rng, asserts[0].space, "g")]
    return {"assert": asserts, "might": mights, "revision": revisions, "general": general,
            "formulas": dict(zip((op.name for op in asserts), phis))}


# ---------------------------------------------------------------- suites

@_timed
def algebra_laws(seed: int = DEFAULT_SEED, cases: int = 200) -> SuiteResult:
    """Identity, zero, associativity, idempotency, compatibility, acceptance, consequence."""
    rng = random.Random(seed)
    res = SuiteResult("algebra laws", cases)
    v = res.violations
    for case in range(cases):
        model = random_ranked(rng, 4)
        groups = model_operators(rng, model)
        formulas = groups.pop("formulas")
        ops = [op for g in groups.values() for op in g]
        space = ops[0].space
        one, zero = alg.identity_op(space), alg.zero_op(space)
        registry = alg.OperatorRegistry(space, ops)
        for a in registry:
            if not (alg.compose(one, a) == a == alg.compose(a, one)):
                v.append(f"case {case}: identity law fails for {a.name}")
            if not (alg.compose(zero, a) == zero == alg.compose(a, zero)):
                v.append(f"case {case}: zero law fails for {a.name}")
            if alg.apply(a, space.absurd_id) != space.absurd_id:
                v.append(f"case {case}: {a.name} moves the absurd state")
            if not brute_compose_equal(one, a, a):
                v.append(f"case {case}: identity oracle disagrees for {a.name}")
            if alg.is_idempotent(a) != brute_idempotent(a):
                v.append(f"case {case}: idempotency misclassified for {a.name}")
            if not alg.accepts(space.absurd_id, a):
                v.append(f"case {case}: absurd state does not accept {a.name}")
        for a in groups["assert"] + groups["might"] + groups["revision"]:
            if not alg.is_idempotent(a):
                v.append(f"case {case}: {a.name} should be idempotent")
            for x in space:
                if not alg.accepts(alg.apply(a, x), a):
                    v.append(f"case {case}: {a.name}({set(x)}) does not accept {a.name}")
        for a, b, c in itertools.product(registry.operators, repeat=3):
            left = alg.compose(alg.compose(a, b), c)
            right = alg.compose(a, alg.compose(b, c))
            if left != right:
                v.append(f"case {case}: associativity fails for {a.name}, {b.name}, {c.name}")
        for a, b in itertools.combinations(ops, 2):
            if alg.is_compatible(a, b) != brute_commute(a, b):
                v.append(f"case {case}: compatibility misclassified for {a.name}, {b.name}")
        for a, b in itertools.product(groups["assert"], repeat=2):
            if not alg.is_compatible(a, b):
                v.append(f"case {case}: assertions {a.name}, {b.name} do not commute")
            ta = truth_set(model, formulas[a.name])
            tb = truth_set(model, formulas[b.name])
            ent = alg.entails(a, b)
            if ent != (ta <= tb):
                v.append(f"case {case}: entails({a.name}, {b.name}) != truth-set inclusion")
            if ent:
                for x in space:
                    if alg.accepts(x, a) and not alg.accepts(x, b):
                        v.append(f"case {case}: consequence not stable at {set(x)}")
        for m in groups["might"] + groups["revision"]:
            for a in groups["assert"]:
                if not alg.is_compatible(m, a) or not alg.is_idempotent(a):
                    try:
                        alg.entails(m, a)
                        v.append(f"case {case}: entails accepted non-propositions {m.name}, {a.name}")
                    except PreconditionError:
                        pass
        if registry.violations():
            v.append(f"case {case}: registry violations {registry.violations()}")
    return res


@_timed
def monotonicity(seed: int = DEFAULT_SEED, cases: int = 200) -> SuiteResult:
    """Accepted stays accepted for assertions; might and revision break it."""
    rng = random.Random(seed)
    res = SuiteResult("monotonicity", cases)
    found = {"might": 0, "revision": 0}
    for case in range(cases):
        model = random_ranked(rng, 4)
        groups = model_operators(rng, model)
        space = groups["assert"][0].space
        for a, b in itertools.product(groups["assert"], repeat=2):
            for x in space:
                if alg.accepts(x, a) and not alg.accepts(alg.apply(b, x), a):
                    res.violations.append(f"case {case}: {a.name} lost after {b.name} at {sorted(x)}")
        for kind in ("might", "revision"):
            mixed = groups["assert"] + groups[kind]
            for a, b in itertools.product(mixed, repeat=2):
                if a.claimed_class == alg.PROPOSITION and b.claimed_class == alg.PROPOSITION:
                    continue
                for x in space:
                    if alg.accepts(x, a) and not alg.accepts(alg.apply(b, x), a):
                        found[kind] += 1
                        res.witnesses.setdefault(kind, f"{a.name} accepted at {sorted(x)}, lost after {b.name}")
                        break
    for kind, n in found.items():
        if n == 0:
            res.violations.append(f"no non-monotonicity witness found for {kind} operators")
    return res


@_timed
def agm_postulates(seed: int = DEFAULT_SEED, cases: int = 500) -> SuiteResult:
    """Success, vacuity, consistency preservation and minimal change."""
    rng = random.Random(seed)
    res = SuiteResult("AGM postulates", cases)
    v = res.violations
    for case in range(cases):
        model = random_ranked(rng, 5)
        state = random_state(rng, model)
        phi = random_formula(rng, list(model.atoms))
        out = revise(model, state, phi)
        models_phi = frozenset(w for w in model.worlds if w in truth_set(model, phi))
        if state and models_phi and not out <= models_phi:
            v.append(f"case {case}: success fails")
        if state & models_phi and out != state & models_phi:
            v.append(f"case {case}: vacuity fails")
        if state and models_phi and not out:
            v.append(f"case {case}: consistency preservation fails")
        if state and models_phi and not state & models_phi:
            best = min(model.rank[w] for w in models_phi)
            expected = {w for w in models_phi if model.rank[w] == best}
            if set(out) != expected:
                v.append(f"case {case}: minimal change fails, got {sorted(out)} want {sorted(expected)}")
        if not state and out:
            v.append(f"case {case}: absurd state escaped by revision")
    return res


def _unit(rng: np.random.Generator, dim: int) -> qm.StateVector:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return qm.StateVector(v, normalize=True)


def _random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def _random_projector(rng: np.random.Generator, dim: int) -> qm.Projector:
    rank = int(rng.integers(1, dim))
    vecs = [rng.normal(size=dim) + 1j * rng.normal(size=dim) for _ in range(rank)]
    return qm.make_projector(vecs)


@_timed
def quantum_reduction(seed: int = DEFAULT_SEED, cases: int = 1000) -> SuiteResult:
    """Lüders conditioning on diagonal projectors equals Bayes on |psi_i|^2."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("quantum reduction", cases)
    worst = 0.0
    for case in range(cases):
        dim = int(rng.integers(2, 9))
        psi = _unit(rng, dim)
        a_set = [i for i in range(dim) if rng.random() < 0.5] or [int(rng.integers(dim))]
        b_set = [i for i in range(dim) if rng.random() < 0.5]
        lud = qm.luders_conditional(psi, qm.diagonal_projector(dim, a_set), qm.diagonal_projector(dim, b_set))
        bay = qm.bayes_conditional(qm.induced_distribution(psi), map(str, a_set), map(str, b_set))
        worst = max(worst, abs(lud - bay))
        if abs(lud - bay) >= 1e-12:
            res.violations.append(f"case {case}: |luders - bayes| = {abs(lud - bay):.3e}")
    res.witnesses["max_abs_error"] = worst
    return res


@_timed
def luders_consistency(seed: int = DEFAULT_SEED, cases: int = 1000) -> SuiteResult:
    """luders_conditional(psi, A, B) == born_prob(collapse(psi, A), B)."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("Lüders consistency", cases)
    for case in range(cases):
        dim = int(rng.integers(2, 9))
        psi, a, b = _unit(rng, dim), _random_projector(rng, dim), _random_projector(rng, dim)
        if qm.born_prob(psi, a) <= qm.PROB_FLOOR:
            continue
        lhs = qm.luders_conditional(psi, a, b)
        rhs = qm.born_prob(qm.collapse(psi, a), b)
        if abs(lhs - rhs) >= 1e-12:
            res.violations.append(f"case {case}: {lhs!r} != {rhs!r}")
    return res


@_timed
def order_dichotomy(seed: int = DEFAULT_SEED, cases: int = 1000) -> SuiteResult:
    """No order effect for commuting questions; QQ equality for all projective ones."""
    rng = np.random.default_rng(seed)
    res = SuiteResult("order-effect dichotomy", cases)
    worst_commuting = worst_q = 0.0
    for case in range(cases):
        dim = int(rng.integers(2, 9))
        u = _random_unitary(rng, dim)
        da = np.diag((rng.random(dim) < 0.5).astype(float))
        db = np.diag((rng.random(dim) < 0.5).astype(float))
        a = qm.Projector(u @ da @ u.conj().T)
        b = qm.Projector(u @ db @ u.conj().T)
        psi = _unit(rng, dim)
        rep = qm.order_effect_report(psi, a, b)
        worst_commuting = max(worst_commuting, rep.max_difference)
        if rep.max_difference >= 1e-10:
            res.violations.append(f"case {case}: commuting order difference {rep.max_difference:.3e}")
        a, b = _random_projector(rng, dim), _random_projector(rng, dim)
        rep = qm.order_effect_report(psi, a, b)
        worst_q = max(worst_q, abs(rep.qq_discrepancy))
        if abs(rep.qq_discrepancy) >= 1e-10:
            res.violations.append(f"case {case}: QQ discrepancy {rep.qq_discrepancy:.3e}")
    psi = qm.StateVector([1, 0])
    a = qm.make_projector([[1, 1]])
    b = qm.make_projector([[1, 0]])
    ab, ba = qm.sequential_prob(psi, [a, b]), qm.sequential_prob(psi, [b, a])
    if abs(ab - 0.25) >= 1e-12 or abs(ba - 0.5) >= 1e-12:
        res.violations.append(f"witness: p(A then B) = {ab!r}, p(B then A) = {ba!r}")
    res.witnesses.update(max_commuting_difference=worst_commuting, max_abs_qq=worst_q,
                         witness_ab=ab, witness_ba=ba)
    return res


_ATOM_CHARS = "abcxyzKJM019-_*+<>=.!? ()\";\\"


def random_sexpr(rng: random.Random, depth: int = 3):
    if depth == 0 or rng.random() < 0.35:
        n = rng.randint(0, 6)
        return SAtom("".join(rng.choice(_ATOM_CHARS) for _ in range(n)))
    return SList(tuple(random_sexpr(rng, depth - 1) for _ in range(rng.randint(0, 4))))


# (text, expected line, expected column)
MALFORMED = [
    ("(assert", 1, 8),
    ("(assert K))", 1, 11),
    (")", 1, 1),
    ("(model m\n  (worlds w0 w1)\n  (atom K w1)", 3, 14),
    ('(atom "unterminated)', 1, 21),
    ("(a b\"c)", 1, 5),
    ("; only a comment\n(might (or J M)", 2, 16),
]


@_timed
def parser_roundtrip(seed: int = DEFAULT_SEED, cases: int = 500) -> SuiteResult:
    """format then parse is the identity on structure; errors carry positions."""
    rng = random.Random(seed)
    res = SuiteResult("parser round-trip", cases)
    for case in range(cases):
        forms = [random_sexpr(rng) for _ in range(rng.randint(1, 4))]
        forms = [f if isinstance(f, SList) else SList((f,)) for f in forms]
        text = format_all(forms)
        try:
            back = parse_all(text)
        except ParseError as exc:
            res.violations.append(f"case {case}: formatted text does not parse: {exc}")
            continue
        if back != forms:
            res.violations.append(f"case {case}: round-trip changed structure: {text!r}")
    for text, line, col in MALFORMED:
        try:
            parse_all(text)
            res.violations.append(f"malformed input parsed: {text!r}")
        except ParseError as exc:
            if exc.position != (line, col):
                res.violations.append(f"{text!r}: error at {exc.position}, expected {(line, col)}")
    return res


SUITES = {
    "algebra": (algebra_laws, 200),
    "monotonicity": (monotonicity, 200),
    "agm": (agm_postulates, 500),
    "quantum-reduction": (quantum_reduction, 1000),
    "luders": (luders_consistency, 1000),
    "order-effects": (order_dichotomy, 1000),
    "parser": (parser_roundtrip, 500),
}


def run_all(seed: int = DEFAULT_SEED, cases: int | None = None) -> list[SuiteResult]:
    return [fn(seed, cases if cases is not None else default) for fn, default in SUITES.values()]
