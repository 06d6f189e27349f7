import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from hamforge._config import DenseLimitError, check_dense
from hamforge.pauli import PauliSum
from hamforge.spectral import (
    ConvergenceError,
    DegenerateSpectrumError,
    Subspace,
    eigen_low,
    ground_energy,
    is_psd,
    operator_norm,
    restrict,
    smallest_nonzero,
    spectral_gap,
    weyl_distance,
)

from conftest import random_hermitian


def heisenberg_chain(n):
    terms = []
    for i in range(n - 1):
        for a in "XYZ":
            terms.append((1.0, {i: a, i + 1: a}))
    return PauliSum(n, terms)


def test_dense_and_iterative_agree():
    H = heisenberg_chain(11)  # dimension 2048, above the dense switchover
    it = eigen_low(H, 3)
    assert it.method == "iterative"
    dn = eigen_low(H, 3, method="dense")
    assert np.allclose(it.eigenvalues, dn.eigenvalues, atol=1e-8)
    assert np.all(it.residual_norms < 1e-8)


def test_open_heisenberg_pair_ground_energy():
    # singlet of two spins: XX + YY + ZZ = -3
    assert ground_energy(heisenberg_chain(2)) == pytest.approx(-3.0)


def test_report_text():
    rep = eigen_low(np.diag([0.0, 1.0, 2.0]), 2)
    lines = rep.to_text().splitlines()
    assert lines[0] == "method dense"
    assert lines[1].startswith("lambda_1 0.0 residual")


def test_iterative_rejects_tiny_problem():
    with pytest.raises(ValueError):
        eigen_low(np.eye(3), 2, method="iterative")


def test_convergence_error_reported():
    # an absurd residual tolerance cannot be met
    with pytest.raises(ConvergenceError):
        eigen_low(heisenberg_chain(4), 1, method="dense", residual_tol=-1.0)


def test_spectral_gap_skips_degenerate_ground():
    assert spectral_gap(np.diag([0.0, 0.0, 0.5, 3.0])) == pytest.approx(0.5)


def test_fully_degenerate_raises():
    with pytest.raises(DegenerateSpectrumError):
        spectral_gap(np.eye(4))


def test_smallest_nonzero():
    assert smallest_nonzero(np.diag([0.0, 0.0, 0.25, 1.0])) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        smallest_nonzero(np.diag([-1.0, 1.0]))


def test_smallest_nonzero_sparse_large():
    d = np.zeros(2048)
    d[5:] = np.linspace(0.3, 4.0, 2043)
    assert smallest_nonzero(sp.diags(d)) == pytest.approx(0.3, abs=1e-9)


def test_restrict_and_complement():
    S = Subspace.standard(3, [0, 2])
    H = np.arange(9.0).reshape(3, 3)
    H = H + H.T
    assert np.allclose(restrict(H, S), H[np.ix_([0, 2], [0, 2])])
    C = S.complement()
    assert C.dim == 1 and abs(abs(C.basis[1, 0]) - 1) < 1e-12


def test_subspace_span_drops_dependent():
    S = Subspace.span([np.array([1, 0, 0]), np.array([2, 0, 0]), np.array([0, 1, 0])])
    assert S.dim == 2 and S.contains(np.array([3, 4, 0]))


def test_non_orthonormal_basis_rejected():
    with pytest.raises(ValueError):
        Subspace(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_operator_norm_and_psd():
    assert operator_norm(np.diag([-3.0, 2.0])) == 3.0
    assert is_psd(np.diag([0.0, 1.0])) and not is_psd(np.diag([-1.0, 1.0]))


def test_dense_cap(monkeypatch):
    monkeypatch.setenv("HAMFORGE_DENSE_LIMIT", "8")
    with pytest.raises(DenseLimitError):
        check_dense(16)
    check_dense(8)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 31 - 1), st.integers(2, 12))
def test_weyl_property(seed, dim):
    rng = np.random.default_rng(seed)
    A, B = random_hermitian(rng, dim), random_hermitian(rng, dim)
    assert weyl_distance(A, B) <= np.abs(np.linalg.eigvalsh(A - B)).max() + 1e-10
