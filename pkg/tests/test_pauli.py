from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamforge.pauli import (
    PAULI,
    OperatorBuilder,
    PauliString,
    PauliSum,
    decompose_hermitian,
    norm_bound,
    pauli_coefficients,
    realize,
)


def kron_oracle(n, axes):
    """Dense Pauli string built factor by factor with np.kron."""
    lookup = dict(axes)
    return reduce(np.kron, [PAULI[lookup.get(q, "I")] for q in range(n)])


@st.composite
def pauli_sums(draw, max_qubits=4, max_terms=6):
    n = draw(st.integers(1, max_qubits))
    terms = []
    for _ in range(draw(st.integers(0, max_terms))):
        axes = {q: draw(st.sampled_from("IXYZ")) for q in range(n)}
        coef = draw(st.floats(-3, 3, allow_nan=False))
        terms.append((coef, axes))
    return PauliSum(n, terms)


def dense_oracle(H):
    M = np.zeros((2 ** H.n, 2 ** H.n), dtype=complex)
    for c, s in H.terms:
        M += c * kron_oracle(H.n, s.axes)
    return M


def test_qubit_zero_is_most_significant():
    Zq0 = realize(PauliSum.single(2, {0: "Z"})).toarray()
    assert np.allclose(np.diag(Zq0), [1, 1, -1, -1])


def test_y_convention():
    Y = realize(PauliSum.single(1, {0: "Y"})).toarray()
    assert np.allclose(Y, [[0, -1j], [1j, 0]])


def test_duplicate_terms_merge_and_cancel():
    H = PauliSum(2, [(0.5, {0: "X"}), (-0.5, {0: "X"}), (1.0, {1: "Z"})])
    assert len(H) == 1 and H.coefficient({1: "Z"}) == 1.0


def test_complex_coefficient_rejected():
    with pytest.raises(TypeError):
        PauliSum(1, [(1j, {0: "X"})])


def test_bad_axis_and_repeated_qubit():
    with pytest.raises(ValueError):
        PauliString(2, {0: "Q"})
    with pytest.raises(ValueError):
        PauliString(2, [(0, "X"), (0, "Z")])
    with pytest.raises(ValueError):
        PauliString(2, {3: "X"})


def test_locality():
    H = PauliSum(4, [(1.0, {0: "X", 2: "Y", 3: "Z"}), (2.0, {1: "Z"})])
    assert H.locality == 3


@settings(max_examples=40, deadline=None)
@given(pauli_sums())
def test_realize_matches_kron_oracle(H):
    assert np.allclose(realize(H).toarray(), dense_oracle(H), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(pauli_sums(), st.integers(0, 2 ** 31 - 1))
def test_apply_matches_matrix(H, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2 ** H.n) + 1j * rng.normal(size=2 ** H.n)
    assert np.allclose(H.apply(psi), realize(H) @ psi, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(pauli_sums(max_qubits=3))
def test_decompose_inverts_realize(H):
    back = decompose_hermitian(realize(H).toarray())
    assert np.allclose(realize(back.with_qubits(H.n)).toarray(), realize(H).toarray(), atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(pauli_sums(max_qubits=3))
def test_norm_bound_dominates_norm(H):
    M = realize(H).toarray()
    nrm = np.abs(np.linalg.eigvalsh(M)).max() if H.n else 0.0
    assert nrm <= norm_bound(H) + 1e-10


def test_pauli_coefficients_of_zz():
    c = pauli_coefficients(np.kron(PAULI["Z"], PAULI["Z"]))
    assert c[3, 3] == pytest.approx(1.0)
    assert np.abs(c).sum() == pytest.approx(1.0)


def test_operator_builder_product_of_projectors():
    P1 = np.diag([0.0, 1.0])
    ob = OperatorBuilder(2).add(2.0, (P1, (0,)), (P1, (1,)))
    M = realize(ob.to_pauli_sum()).toarray()
    assert np.allclose(M, np.diag([0, 0, 0, 2.0]))


def test_operator_builder_hermitian_pair():
    ket01 = np.array([[0, 1], [0, 0]], dtype=complex)
    M = realize(OperatorBuilder(1).add(1.0, (ket01, (0,)), hermitian=True).to_pauli_sum()).toarray()
    assert np.allclose(M, PAULI["X"])


def test_operator_builder_rejects_overlap():
    with pytest.raises(ValueError):
        OperatorBuilder(2).add(1.0, (PAULI["X"], (0,)), (PAULI["Z"], (0,)))


def test_expectation_real():
    H = PauliSum.single(1, {0: "X"})
    plus = np.ones(2) / np.sqrt(2)
    assert H.expectation(plus) == pytest.approx(1.0)
