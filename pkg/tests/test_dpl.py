import itertools

import pytest

from dynsem.dpl import (
    EMPTY_INPUT, Assignment, DiscourseContext, FOModel, Introduce, Neg, Pronoun, RandomAssign, Seq,
    Test as Pred, eval_program, resolve_pronoun, run_text_discourse, story_model, story_sentences,
)
from dynsem.errors import DomainError, EvaluationError, PreconditionError, ResolutionError

START = frozenset([EMPTY_INPUT])


@pytest.fixture
def ab():
    return FOModel(["a", "b"], {"P": (1, [("a",)]), "Q": (1, [])})


@pytest.fixture
def story():
    return story_model()


def test_exists_then_test(ab):
    out = eval_program(ab, START, Seq([RandomAssign("x"), Pred("P", ["x"])]))
    # oracle: enumerate both candidates for x and keep those in P
    expected = {d for d in ab.domain if (d,) in ab.predicates["P"][1]}
    assert [g.as_dict() for g, _ in out] == [{"x": d} for d in expected]


def test_negated_failing_program_passes_inputs(ab):
    p = Neg(Seq([RandomAssign("y"), Pred("Q", ["y"])]))
    assert eval_program(ab, START, p) == START


def test_unbound_variable(ab):
    with pytest.raises(EvaluationError, match="'x'"):
        eval_program(ab, START, Pred("P", ["x"]))


def test_constants_and_arity(ab):
    assert eval_program(ab, START, Pred("P", ["a"])) == START
    assert eval_program(ab, START, Pred("P", ["b"])) == frozenset()
    with pytest.raises(EvaluationError):
        eval_program(ab, START, Pred("P", ["a", "b"]))
    with pytest.raises(DomainError):
        eval_program(ab, START, Pred("R", ["a"]))


def test_model_validation():
    with pytest.raises(DomainError):
        FOModel([], {})
    with pytest.raises(DomainError):
        FOModel(["a"], {"P": (2, [("a",)])})
    with pytest.raises(DomainError):
        FOModel(["a"], {"P": (1, [("z",)])})
    with pytest.raises(DomainError):
        FOModel(["a"], sorts={"z": ["male"]})


def test_resolve_pronoun():
    ctx = DiscourseContext().push("John", {"male"}).push("Table1", {"inanimate"}).push("George", {"male"})
    assert resolve_pronoun(ctx, {"male"}) == "George"
    assert resolve_pronoun(ctx, set()) == "George"
    assert resolve_pronoun(ctx, {"inanimate"}) == "Table1"
    with pytest.raises(ResolutionError, match="male"):
        resolve_pronoun(DiscourseContext(), {"male"})


def test_story_orders(story):
    s = story_sentences()
    abc = run_text_discourse(story, [s["A"], s["B"], s["C"]])
    assert abc.bindings == {"he": "George"}
    assert abc.order_sensitive
    bac = run_text_discourse(story, [s["B"], s["A"], s["C"]])
    assert bac.bindings == {"he": "John"}


def test_story_two_sentences(story):
    s = story_sentences()
    # only John is on the stack when "he" is resolved
    assert run_text_discourse(story, [s["A"], s["C"]]).bindings == {"he": "John"}


def test_single_sentence_is_not_order_sensitive(story):
    report = run_text_discourse(story, [story_sentences()["A"]])
    assert report.bindings == {} and not report.order_sensitive
    with pytest.raises(PreconditionError):
        run_text_discourse(story, [])


def test_inanimate_referents_are_skipped(story):
    s = story_sentences()
    outputs = eval_program(story, START, s["A"])
    (g, ctx), = outputs
    assert ctx.individuals() == ["John", "Table1"]
    assert resolve_pronoun(ctx, {"male"}) == "John"


def test_unresolvable_pronoun_raises(story):
    with pytest.raises(ResolutionError):
        eval_program(story, START, story_sentences()["C"])


def test_introduce_unknown_individual(story):
    with pytest.raises(DomainError):
        eval_program(story, START, Introduce("x", "Mary"))


def test_universal_encoding(ab):
    # "everything is P" fails on {a, b}; "everything is P or not P" holds
    every_p = Neg(Seq([RandomAssign("x"), Neg(Pred("P", ["x"]))]))
    assert eval_program(ab, START, every_p) == frozenset()
    everything = Neg(Seq([RandomAssign("x"), Neg(Neg(Pred("Q", ["x"]))), Pred("P", ["x"])]))
    assert eval_program(ab, START, everything) == START


# --- invariants -----------------------------------------------------------------

def _inputs(model):
    """A spread of inputs with x bound to each individual and varied contexts."""
    out = set()
    for d in model.domain:
        g = Assignment.of({"x": d, "y": model.domain[0]})
        out.add((g, DiscourseContext().push(d, model.sorts[d])))
        out.add((g, DiscourseContext()))
    return frozenset(out)


def _models(max_domain=3):
    for n in range(1, max_domain + 1):
        dom = [f"d{i}" for i in range(n)]
        for ext_p in itertools.product([0, 1], repeat=n):
            p = [(d,) for d, b in zip(dom, ext_p) if b]
            yield FOModel(dom, {"P": (1, p), "Q": (1, p[:1])})


def test_tests_are_idempotent_and_commute():
    for m in _models():
        ins = _inputs(m)
        tp, tq = Pred("P", ["x"]), Pred("Q", ["x"])
        once = eval_program(m, ins, tp)
        assert eval_program(m, once, tp) == once
        assert eval_program(m, ins, Seq([tp, tq])) == eval_program(m, ins, Seq([tq, tp]))


def test_random_assign_does_not_commute_with_test():
    witnesses = 0
    for m in _models():
        ins = _inputs(m)
        ra, tp = RandomAssign("x"), Pred("P", ["x"])
        if eval_program(m, ins, Seq([ra, tp])) != eval_program(m, ins, Seq([tp, ra])):
            witnesses += 1
        with pytest.raises(EvaluationError):
            eval_program(m, START, Seq([tp, ra]))
    assert witnesses > 0
    two = FOModel(["a", "b"], {"P": (1, [("a",)])})
    ins = _inputs(two)
    assert eval_program(two, ins, Seq([RandomAssign("x"), Pred("P", ["x"])])) != \
        eval_program(two, ins, Seq([Pred("P", ["x"]), RandomAssign("x")]))


def test_double_negation_tests_for_success():
    for m in _models():
        ins = _inputs(m)
        p = Seq([RandomAssign("z"), Pred("P", ["z"])])
        out = eval_program(m, ins, Neg(Neg(p)))
        expected = frozenset(i for i in ins if eval_program(m, [i], p))
        assert out == expected
        assert all(ctx in {c for _, c in ins} for _, ctx in out)


def test_pronoun_ignores_unrelated_variables():
    m = FOModel(["a", "b"], sorts={"a": ["t"], "b": ["t"]})
    ctx = DiscourseContext().push("a", {"t"}).push("b", {"t"})
    ins = [(Assignment.of({"u": d}), ctx) for d in m.domain]
    out = eval_program(m, ins, Pronoun("it", ["t"]))
    assert {g.get("it") for g, _ in out} == {"b"}


def test_seq_is_associative():
    for m in _models(2):
        ins = _inputs(m)
        p, q, r = RandomAssign("z"), Pred("P", ["z"]), Neg(Pred("Q", ["x"]))
        left = eval_program(m, ins, Seq([Seq([p, q]), r]))
        right = eval_program(m, ins, Seq([p, Seq([q, r])]))
        assert left == right
