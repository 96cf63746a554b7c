import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynsem.algebra import accepts, apply, entails, is_compatible, is_idempotent
from dynsem.errors import CapacityError, DomainError, PreconditionError
from dynsem.worlds import (
    ABSURD, And, Assert, Atom, Might, Not, Or, Seq, WorldModel, knocking_model, lift_to_operator,
    might, run_discourse, truth_set, update,
)

K, J, M = Atom("K"), Atom("J"), Atom("M")
FULL = frozenset({"w0", "wJ", "wM"})


@pytest.fixture
def km():
    return knocking_model()


def test_truth_sets(km):
    assert truth_set(km, K) == {"wJ", "wM"}
    assert truth_set(km, Not(K)) == {"w0"}
    assert truth_set(km, Or(J, M)) == {"wJ", "wM"}
    assert truth_set(km, And(J, M)) == frozenset()


def test_unknown_atom_is_named(km):
    with pytest.raises(DomainError, match="'Z'"):
        truth_set(km, Atom("Z"))


def test_model_validation():
    with pytest.raises(DomainError):
        WorldModel(["a", "a"], {})
    with pytest.raises(DomainError):
        WorldModel(["a"], {"p": ["b"]})


def test_update(km):
    assert update(km, FULL, Assert(K)) == {"wJ", "wM"}
    assert update(km, {"wM"}, Assert(M)) == {"wM"}
    assert update(km, {"wM"}, Assert(J)) == ABSURD


def test_might(km):
    assert might(km, {"wJ", "wM"}, J) == {"wJ", "wM"}
    assert might(km, {"wM"}, J) == ABSURD
    assert might(km, ABSURD, J) == ABSURD


def test_knocking_discourses(km):
    cba = run_discourse(km, FULL, [Assert(K), Might(J), Assert(M)])
    assert cba.final == {"wM"} and cba.verdict == "coherent"
    assert [set(s) for s in cba.trace] == [set(FULL), {"wJ", "wM"}, {"wJ", "wM"}, {"wM"}]
    bcba = run_discourse(km, FULL, [Assert(K), Might(J), Assert(M), Might(J)])
    assert bcba.final == ABSURD and bcba.verdict == "absurd"


def test_assert_then_might_last_is_absurd(km):
    # by hand: {w0,wJ,wM} -K-> {wJ,wM} -M-> {wM} -might J-> ∅
    res = run_discourse(km, FULL, [Assert(K), Assert(M), Might(J)])
    assert res.final == ABSURD and res.verdict == "absurd"


def test_verdict_from_empty_start(km):
    assert run_discourse(km, ABSURD, [Assert(K)]).verdict == "coherent"


def test_seq(km):
    assert update(km, FULL, Seq([Assert(K), Assert(M)])) == {"wM"}
    with pytest.raises(PreconditionError):
        Seq([])
    assert Seq([Assert(K), Assert(M)]).claimed_class == "proposition"
    assert Seq([Assert(K), Might(M)]).claimed_class == "general"


def test_lift_properties(km):
    k = lift_to_operator(km, Assert(K))
    m = lift_to_operator(km, Assert(M))
    mj = lift_to_operator(km, Might(J))
    assert len(k.space) == 8 and k.space.absurd_id == ABSURD
    assert is_idempotent(k) and is_compatible(k, m)
    assert not is_compatible(mj, m)
    assert accepts(frozenset({"wJ", "wM"}), k)


def test_might_idempotent_on_all_states(km):
    # brute force over all 2^3 info states
    for phi in (K, J, M, Not(K)):
        for bits in itertools.product([0, 1], repeat=3):
            s = frozenset(w for w, b in zip(km.worlds, bits) if b)
            once = might(km, s, phi)
            assert might(km, once, phi) == once
    assert is_idempotent(lift_to_operator(km, Might(J)))


def test_might_vs_assert_table_comparison(km):
    mj = lift_to_operator(km, Might(J))
    m = lift_to_operator(km, Assert(M))
    differing = [s for s in mj.space if apply(mj, apply(m, s)) != apply(m, apply(mj, s))]
    assert frozenset({"wJ", "wM"}) in differing


def test_lift_capacity():
    big = WorldModel([f"w{i}" for i in range(13)], {"p": ["w0"]})
    with pytest.raises(CapacityError):
        lift_to_operator(big, Assert(Atom("p")))


def test_order_effect_permutation(km):
    base = [Assert(K), Might(J), Assert(M)]
    assert run_discourse(km, FULL, base).verdict == "coherent"
    moved = [Assert(K), Assert(M), Might(J)]
    assert run_discourse(km, FULL, moved).verdict == "absurd"


# --- properties over random models with up to 5 worlds -----------------------

@st.composite
def models(draw, max_worlds=5):
    n = draw(st.integers(1, max_worlds))
    worlds = [f"w{i}" for i in range(n)]
    atoms = {a: draw(st.sets(st.sampled_from(worlds))) for a in "pq"}
    return WorldModel(worlds, atoms)


formulas = st.recursive(
    st.sampled_from([Atom("p"), Atom("q")]),
    lambda sub: st.one_of(sub.map(Not), st.tuples(sub, sub).map(lambda t: And(*t)),
                          st.tuples(sub, sub).map(lambda t: Or(*t))),
    max_leaves=4)


@settings(max_examples=100, deadline=None)
@given(models(), formulas, formulas)
def test_assert_operators_are_commuting_projectors(m, phi, psi):
    a, b = lift_to_operator(m, Assert(phi)), lift_to_operator(m, Assert(psi))
    assert is_idempotent(a) and is_idempotent(b)
    assert is_compatible(a, b)
    assert entails(a, b) == (truth_set(m, phi) <= truth_set(m, psi))


@settings(max_examples=100, deadline=None)
@given(models(), formulas)
def test_absurd_state_is_fixed(m, phi):
    for d in (Assert(phi), Might(phi), Seq([Might(phi), Assert(phi)])):
        assert update(m, ABSURD, d) == ABSURD
        assert is_idempotent(lift_to_operator(m, Might(phi)))
