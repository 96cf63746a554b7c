import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dynsem.errors import CollapseError, ConditioningError, DomainError, RankError
from dynsem.quantum import (
    ClassicalDistribution, LinOperator, Projector, StateVector, bayes_conditional, born_prob,
    collapse, diagonal_projector, general_conditional, induced_distribution, luders_conditional,
    make_projector, order_effect_report, sequential_prob,
)

S = 2 ** -0.5
E1 = StateVector([1, 0])
P_DIAG = make_projector([[1, 1]])  # span{(1,1)/sqrt2}
P_E1 = make_projector([[1, 0]])
ID2 = make_projector([[1, 0], [0, 1]])
ZERO2 = Projector(np.zeros((2, 2)))


def test_make_projector():
    assert np.allclose(P_E1.matrix, [[1, 0], [0, 0]])
    assert np.allclose(P_DIAG.matrix, [[0.5, 0.5], [0.5, 0.5]])
    assert np.allclose(ID2.matrix, np.eye(2))


def test_make_projector_rank_errors():
    with pytest.raises(RankError):
        make_projector([[0, 0]])
    with pytest.raises(RankError):
        make_projector([[1, 1], [2, 2]])
    with pytest.raises(RankError):
        make_projector([])
    with pytest.raises(DomainError):
        make_projector([[1, 0], [1, 0, 0]])


def test_projector_validation():
    with pytest.raises(DomainError):
        Projector([[1, 1], [0, 0]])
    with pytest.raises(DomainError):
        Projector([[2, 0], [0, 0]])


def test_state_vector_norm():
    with pytest.raises(DomainError):
        StateVector([1, 1])
    assert np.allclose(StateVector([1, 1], normalize=True).amplitudes, [S, S])
    with pytest.raises(DomainError):
        StateVector([0] * 65, normalize=True)


def test_born():
    assert born_prob(E1, P_DIAG) == pytest.approx(0.5, abs=1e-15)
    assert born_prob(E1, ID2) == 1.0
    assert born_prob(E1, ZERO2) == 0.0
    with pytest.raises(DomainError):
        born_prob(StateVector([1, 0, 0]), P_E1)


def test_collapse():
    out = collapse(E1, P_DIAG)
    # oracle: P psi = (1/2, 1/2), norm 1/sqrt2
    v = np.array([[0.5, 0.5], [0.5, 0.5]]) @ np.array([1, 0])
    assert np.allclose(out.amplitudes, v / np.sqrt(v @ v), atol=1e-15)
    again = collapse(out, P_DIAG)
    assert np.allclose(again.amplitudes, out.amplitudes, atol=1e-15)
    assert np.allclose(collapse(E1, ID2).amplitudes, E1.amplitudes)
    with pytest.raises(CollapseError):
        collapse(StateVector([0, 1]), P_E1)


def test_luders():
    # oracle: A psi = (1/2, 1/2); <A psi|B|A psi> = 1/4; p(A) = 1/2
    assert luders_conditional(E1, P_DIAG, P_E1) == pytest.approx(0.5, abs=1e-12)
    assert luders_conditional(E1, ID2, P_DIAG) == pytest.approx(born_prob(E1, P_DIAG), abs=1e-15)
    psi = StateVector([0.2 ** 0.5, 0.3 ** 0.5, 0.5 ** 0.5])
    a, b = diagonal_projector(3, [1, 2]), diagonal_projector(3, [1])
    # Bayes on (0.2, 0.3, 0.5): 0.3 / 0.8
    assert luders_conditional(psi, a, b) == pytest.approx(0.375, abs=1e-12)
    with pytest.raises(ConditioningError):
        luders_conditional(StateVector([0, 1]), P_E1, P_DIAG)


def test_general_conditional():
    assert general_conditional(E1, P_DIAG, P_E1) == pytest.approx(luders_conditional(E1, P_DIAG, P_E1), abs=1e-15)
    c = LinOperator((0.3 - 2j) * np.eye(2))
    assert general_conditional(E1, c, P_DIAG) == pytest.approx(born_prob(E1, P_DIAG), abs=1e-15)
    nilpotent = LinOperator([[0, 1], [0, 0]])
    assert general_conditional(StateVector([0, 1]), nilpotent, P_E1) == 1.0
    with pytest.raises(ConditioningError):
        general_conditional(E1, nilpotent, P_E1)


def test_bayes():
    rho = ClassicalDistribution({w: 0.25 for w in ("w1", "w2", "w3", "w4")})
    assert bayes_conditional(rho, {"w1", "w2"}, {"w2", "w3"}) == 0.5
    assert bayes_conditional(rho, {"w1"}, {"w1", "w2"}) == 1.0
    assert bayes_conditional(rho, {"w1"}, {"w2"}) == 0.0
    with pytest.raises(ConditioningError):
        bayes_conditional(ClassicalDistribution({"a": 1.0, "b": 0.0}), {"b"}, {"a"})
    with pytest.raises(DomainError):
        ClassicalDistribution({"a": 0.5})


def test_sequential():
    # BA psi = (1/2, 0) -> 0.25 ; AB psi = (1/2, 1/2) -> 0.5
    assert sequential_prob(E1, [P_DIAG, P_E1]) == pytest.approx(0.25, abs=1e-12)
    assert sequential_prob(E1, [P_E1, P_DIAG]) == pytest.approx(0.5, abs=1e-12)
    assert sequential_prob(E1, [P_DIAG]) == pytest.approx(born_prob(E1, P_DIAG), abs=1e-15)


def test_order_effect_report():
    rep = order_effect_report(E1, P_DIAG, P_E1)
    assert rep.a_first["AyBy"] == pytest.approx(0.25, abs=1e-12)
    assert rep.b_first["ByAy"] == pytest.approx(0.5, abs=1e-12)
    assert rep.differences["AyBy"] == pytest.approx(-0.25, abs=1e-12)
    assert rep.commutator_norm == pytest.approx(0.5, abs=1e-12)
    assert abs(rep.qq_discrepancy) < 1e-10
    assert sum(rep.a_first.values()) == pytest.approx(1.0, abs=1e-12)
    assert sum(rep.b_first.values()) == pytest.approx(1.0, abs=1e-12)
    diag = order_effect_report(StateVector([0.6, 0.8]), P_E1, make_projector([[0, 1]]))
    assert diag.max_difference < 1e-12 and diag.commutator_norm == 0.0


def test_induced_distribution():
    psi = StateVector([0.6, 0.8j])
    assert induced_distribution(psi).weights == pytest.approx({"0": 0.36, "1": 0.64})


# --- randomized invariants ---------------------------------------------------

@st.composite
def instances(draw):
    dim = draw(st.integers(2, 6))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)

    def proj():
        rank = int(rng.integers(1, dim))
        return make_projector([rng.normal(size=dim) + 1j * rng.normal(size=dim) for _ in range(rank)])

    psi = StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim), normalize=True)
    return psi, proj(), proj()


@settings(max_examples=150, deadline=None)
@given(instances())
def test_projector_laws_and_partition(inst):
    psi, a, b = inst
    for p in (a, b, a.complement()):
        m = p.matrix
        assert np.max(np.abs(m @ m - m)) < 1e-10
        assert np.max(np.abs(m - m.conj().T)) < 1e-10
    rep = order_effect_report(psi, a, b)
    assert abs(sum(rep.a_first.values()) - 1) < 1e-12
    assert abs(sum(rep.b_first.values()) - 1) < 1e-12
    assert abs(rep.qq_discrepancy) < 1e-10


@settings(max_examples=150, deadline=None)
@given(instances())
def test_luders_equals_collapse_then_born(inst):
    psi, a, b = inst
    if born_prob(psi, a) > 1e-12:
        assert abs(luders_conditional(psi, a, b) - born_prob(collapse(psi, a), b)) < 1e-12


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2 ** 32 - 1))
def test_classical_reduction(dim, seed):
    rng = np.random.default_rng(seed)
    psi = StateVector(rng.normal(size=dim) + 1j * rng.normal(size=dim), normalize=True)
    a_set = [i for i in range(dim) if rng.random() < 0.5] or [0]
    b_set = [i for i in range(dim) if rng.random() < 0.5]
    lud = luders_conditional(psi, diagonal_projector(dim, a_set), diagonal_projector(dim, b_set))
    probs = np.abs(psi.amplitudes) ** 2
    oracle = probs[sorted(set(a_set) & set(b_set))].sum() / probs[a_set].sum()
    assert abs(lud - oracle) < 1e-12
    bay = bayes_conditional(induced_distribution(psi), map(str, a_set), map(str, b_set))
    assert abs(lud - bay) < 1e-12
