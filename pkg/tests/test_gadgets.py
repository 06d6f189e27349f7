import numpy as np
import pytest

from hamforge.gadgets import (
    GadgetInstance,
    Triple,
    all_plus_sector,
    decompose_3local,
    effective_basis,
    effective_hamiltonian,
    gadget_context,
    reduce_3to2,
    three_qubit_gadget,
    verify_reduction,
)
from hamforge.pauli import PauliSum, realize
from hamforge.spectral import as_dense

ZZZ = PauliSum(3, [(1.0, {0: "Z", 1: "Z", 2: "Z"})])
B8 = np.eye(2) / 8


def test_unperturbed_gadget_has_two_levels():
    g = GadgetInstance(PauliSum(3), Triple((B8, B8, B8), (0, 1, 2)), 0.1)
    H, V, He = three_qubit_gadget(g)
    assert np.allclose(np.unique(np.round(np.linalg.eigvalsh(as_dense(H)), 6)), [0.0, 1000.0])
    assert H.locality <= 2 and V.locality <= 2


def test_effective_ground_energy_closed_form():
    g = GadgetInstance(PauliSum(3), Triple((B8, B8, B8), (0, 1, 2)), 0.1)
    He = three_qubit_gadget(g)[2]
    assert np.linalg.eigvalsh(as_dense(He))[0] == pytest.approx(-6 / 512, abs=1e-15)


def test_gadget_error_shrinks_with_delta():
    errs = []
    for d in (0.2, 0.1, 0.05):
        g = GadgetInstance(PauliSum(3), Triple((B8, B8, B8), (0, 1, 2)), d)
        H, V, He = three_qubit_gadget(g)
        errs.append(abs(np.linalg.eigvalsh(as_dense(H + V))[0] + 6 / 512))
    assert errs[0] > errs[1] > errs[2]


def test_zero_factor_removes_effective_coupling():
    Y = PauliSum(3, [(0.3, {0: "X", 1: "X"})])
    g = GadgetInstance(Y, Triple((B8, B8, np.zeros((2, 2))), (0, 1, 2)), 0.1)
    assert three_qubit_gadget(g)[2] == Y.with_qubits(4)


def test_instance_validation():
    with pytest.raises(ValueError):
        GadgetInstance(PauliSum(3), Triple((B8, B8, -B8), (0, 1, 2)), 0.1)
    with pytest.raises(ValueError):
        GadgetInstance(PauliSum(3), Triple((B8, B8, B8), (0, 1, 2)), 0.0)
    with pytest.raises(ValueError):
        Triple((B8, B8, B8), (0, 0, 2))


def test_effective_basis_layout():
    E = effective_basis(1, 1)
    assert E.shape == (16, 4)
    # system 1, effective 1 -> system bit then gadget 111
    assert E[0b1111, 0b11] == 1.0 and E[0b1000, 0b10] == 1.0


def test_decompose_two_local_is_trivial():
    H = PauliSum(3, [(0.5, {0: "X", 1: "X"}), (-1.0, {2: "Z"})])
    dec = decompose_3local(H)
    assert dec.M == 0 and dec.c_r == 1.0 and dec.Y == H


def test_decompose_zzz():
    dec = decompose_3local(ZZZ)
    assert dec.M == 1
    assert dec.c_r == 2.0 ** 17  # smallest power of two above 6 * 3^9
    assert dec.residual() <= 1e-9
    assert dec.min_B_eigenvalue() >= 3 ** -3 - 1e-12
    assert dec.Y.locality <= 2


def test_decompose_mixed_four_qubits(rng):
    terms = [(float(rng.normal()), {0: "X", 1: "Y", 3: "Z"}), (float(rng.normal()), {1: "Z", 2: "Z", 3: "X"}),
             (0.4, {0: "Z", 2: "Y"}), (-0.2, {1: "X"})]
    H = PauliSum(4, terms)
    dec = decompose_3local(H)
    assert dec.M == 2 and dec.residual() <= 1e-9
    assert dec.min_B_eigenvalue() >= 4 ** -3 - 1e-12
    for tr in dec.triples:
        prod = np.kron(np.kron(tr.B[0], tr.B[1]), tr.B[2])
        assert np.linalg.eigvalsh(prod)[0] >= -1e-12


def test_decompose_rejects_four_local():
    with pytest.raises(ValueError):
        decompose_3local(PauliSum(4, [(1.0, {0: "X", 1: "X", 2: "X", 3: "X"})]))


def test_reduce_structure():
    H2, info = reduce_3to2(ZZZ, 0.1)
    assert H2.n == 3 + 3 * info.M == 6
    assert H2.locality == 2


def test_reduce_two_local_identity():
    H = PauliSum(2, [(0.5, {0: "X", 1: "X"})])
    H2, info = reduce_3to2(H, 0.1)
    assert H2 == H and info.M == 0


def test_all_plus_sector_reproduces_source():
    dec = decompose_3local(ZZZ)
    He = effective_hamiltonian(dec.Y, dec.triples)
    R, ok = all_plus_sector(He, 3, 1)
    assert ok
    assert np.abs(R - realize(ZZZ).toarray() / dec.c_r).max() <= 1e-10


def test_verify_reduction_linear_in_delta():
    checks = [verify_reduction(ZZZ, d) for d in (0.2, 0.1, 0.05)]
    assert all(c.within_bound and c.all_plus_ok and c.spectrum_check.certified for c in checks)
    Ks = [c.K for c in checks]
    assert max(Ks) / min(Ks) <= 2.0
    assert checks[1].difference * 1.5 <= checks[0].difference
    assert checks[2].difference * 1.5 <= checks[1].difference


def test_verify_two_local_zero_difference():
    chk = verify_reduction(PauliSum(2, [(0.5, {0: "X", 1: "X"})]), 0.1)
    assert chk.difference == 0.0


def test_verify_rejects_wrong_h2():
    with pytest.raises(ValueError):
        verify_reduction(ZZZ, 0.1, H2=PauliSum(6))


def test_verify_size_cap():
    big = PauliSum(5, [(1.0, {0: "Z", 1: "Z", 2: "Z"}), (1.0, {2: "X", 3: "X", 4: "X"}),
                       (1.0, {0: "Y", 3: "Y", 4: "Y"})])
    with pytest.raises(ValueError):
        verify_reduction(big, 0.1)


def test_context_uses_effective_coordinates():
    dec = decompose_3local(ZZZ)
    from hamforge.gadgets import gadget_terms

    H, V = gadget_terms(dec.Y, dec.triples, 0.1)
    ctx = gadget_context(H, V, 3, 1, 0.1)
    assert ctx.split.dim_minus == 16
