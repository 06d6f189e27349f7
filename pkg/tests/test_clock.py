import numpy as np
import pytest

from hamforge.circuit import X, Circuit, Gate, acceptance_probability, canonicalize, optimal_acceptance
from hamforge.clock import (
    build_history_state,
    build_log_local,
    build_prop1_subspace,
    build_two_local,
    change_of_basis_blocks,
    clock_at,
    eq6_clock_matrix,
    h_time,
    legal_subspace,
    penalty_weight,
    propagation_block,
    propagation_gap,
    unary_index,
    verify_restriction_identities,
)
from hamforge.pauli import OperatorBuilder, realize
from hamforge.spectral import ground_energy, restrict, smallest_nonzero

from conftest import CIRCUITS, entangling


def test_penalty_weight():
    assert penalty_weight(1.0) == 10.0


@pytest.mark.parametrize("T", range(1, 9))
def test_propagation_gap_closed_form(T):
    assert smallest_nonzero(propagation_block(T)) == pytest.approx(1 - np.cos(np.pi / (T + 1)), abs=1e-10)
    assert propagation_gap(T) == pytest.approx(1 - np.cos(np.pi / (T + 1)), abs=1e-15)


def test_unary_index():
    assert [unary_index(t, 3) for t in range(4)] == [0b000, 0b100, 0b110, 0b111]


@pytest.mark.parametrize("k", range(5))
def test_clock_at_is_projector_on_legal_states(k):
    T = 4
    M = realize(OperatorBuilder(T).add(1.0, *clock_at(k, 0, T)).to_pauli_sum()).toarray()
    legal = [unary_index(t, T) for t in range(T + 1)]
    R = M[np.ix_(legal, legal)]
    want = np.zeros((T + 1, T + 1))
    want[k, k] = 1.0
    assert np.allclose(R, want)


@pytest.mark.parametrize("name", sorted(CIRCUITS))
def test_history_state_log_local(name):
    c = CIRCUITS[name]()
    p, proof = optimal_acceptance(c, return_proof=True)
    H = build_log_local(c)
    eta = build_history_state(c, proof).vector
    assert abs(np.linalg.norm(eta) - 1) < 1e-12
    assert H.H_in.expectation(eta) <= 1e-10
    assert H.H_prop.expectation(eta) <= 1e-10
    assert H.H_out.expectation(eta) == pytest.approx(1 - p, abs=1e-10)


@pytest.mark.parametrize("name", sorted(CIRCUITS))
def test_history_state_two_local(name):
    c = CIRCUITS[name]()
    cc = canonicalize(c)
    p, proof = optimal_acceptance(c, return_proof=True)
    H = build_two_local(cc, 1.0, 1.0, 1.0, 1.0)
    eta = build_history_state(cc, proof, encoding="unary").vector
    for comp in (H.H_in, H.H_clock, H.H_prop1, H.H_prop2):
        assert comp.expectation(eta) <= 1e-10
    assert H.H_out.expectation(eta) == pytest.approx(1 - p, abs=1e-10)


def test_log_local_change_of_basis():
    got, want = change_of_basis_blocks(entangling())
    assert np.abs(got - want).max() < 1e-12


def test_two_local_is_two_local():
    H = build_two_local(entangling())
    assert H.total().locality == 2
    assert H.n == 2 + 7


def test_log_local_ground_energy_yes_no():
    assert ground_energy(build_log_local(CIRCUITS["accepting_x"]()).total()) <= 1e-9
    assert ground_energy(build_log_local(CIRCUITS["rejecting_z"]()).total()) >= 0.25


def test_manual_weights_override():
    H = build_log_local(CIRCUITS["accepting_x"](), J_in=3.0, J_prop=4.0)
    assert H.weights() == {"J_in": 3.0, "J_prop": 4.0}
    with pytest.raises(ValueError):
        build_log_local(CIRCUITS["accepting_x"](), J_in=-1.0, J_prop=1.0)


def test_history_state_is_ground_state_of_propagation_on_legal_space():
    c = entangling()
    cc = canonicalize(c)
    S1 = build_prop1_subspace(cc)
    H = build_two_local(cc, 1.0, 1.0, 1.0, 1.0)
    R = restrict(realize(H.H_prop1), S1)
    assert np.abs(R).max() < 1e-12  # S_prop1 is the zero space of H_prop1 on legal states


def test_time_term_matches_projector_form():
    cc = canonicalize(entangling())
    t = cc.cphase_steps[0]
    S = legal_subspace(cc.N, cc.T)
    got = restrict(realize(h_time(cc, t)), S)
    assert np.allclose(got, np.kron(np.eye(4), eq6_clock_matrix(t, cc.T)), atol=1e-12)


def test_restriction_identities_entangling():
    rep = verify_restriction_identities(canonicalize(entangling()))
    assert rep.ok, rep.to_text()
    assert "restriction prop2_dominates_effective" in rep.to_text()


def test_restriction_needs_cphase():
    with pytest.raises(ValueError):
        verify_restriction_identities(canonicalize(CIRCUITS["accepting_x"]()))


def test_h_time_boundary_error():
    cc = canonicalize(entangling())
    with pytest.raises(ValueError):
        h_time(cc, 2)


def test_two_local_needs_interval_three():
    from hamforge.circuit import CanonicalCircuit

    c = Circuit(2, 0, [Gate.one_qubit(X, 0), Gate.cphase(0, 1), Gate.one_qubit(X, 0)])
    short = CanonicalCircuit(c, 2, 1, (1, 3))
    with pytest.raises(ValueError):
        build_two_local(short)


def test_history_state_rejects_unnormalized_proof():
    with pytest.raises(ValueError):
        build_history_state(CIRCUITS["proof_copy"](), [1.0, 1.0])


def test_acceptance_matches_out_term_for_random_proof(rng):
    c = CIRCUITS["three_qubit"]()
    proof = rng.normal(size=2) + 1j * rng.normal(size=2)
    proof /= np.linalg.norm(proof)
    H = build_log_local(c, 1.0, 1.0)
    eta = build_history_state(c, proof).vector
    assert H.H_out.expectation(eta) == pytest.approx(1 - acceptance_probability(c, proof), abs=1e-10)
