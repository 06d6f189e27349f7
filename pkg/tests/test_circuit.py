from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hamforge.circuit import (
    CPHASE,
    HADAMARD,
    I2,
    X,
    Z,
    Circuit,
    Gate,
    acceptance_probability,
    canonicalize,
    circuit_unitary,
    optimal_acceptance,
    simulate,
)

from conftest import CIRCUITS, entangling


def embed_oracle(g, N):
    """Dense gate via kron (one-qubit) or diagonal sign flip (controlled phase)."""
    if g.is_cphase:
        f, s = g.qubits
        d = np.ones(2 ** N, dtype=complex)
        for i in range(2 ** N):
            if (i >> (N - 1 - f)) & 1 and (i >> (N - 1 - s)) & 1:
                d[i] = -1
        return np.diag(d)
    (q,) = g.qubits
    return reduce(np.kron, [g.matrix if k == q else I2 for k in range(N)])


def unitary_oracle(c):
    U = np.eye(2 ** c.N, dtype=complex)
    for g in c.gates:
        U = embed_oracle(g, c.N) @ U
    return U


@pytest.mark.parametrize("name", sorted(CIRCUITS))
def test_unitary_matches_oracle(name):
    c = CIRCUITS[name]()
    assert np.allclose(circuit_unitary(c), unitary_oracle(c), atol=1e-12)


@pytest.mark.parametrize("name", sorted(CIRCUITS))
def test_canonicalization_preserves_unitary(name):
    c = CIRCUITS[name]()
    cc = canonicalize(c)
    assert np.allclose(circuit_unitary(cc.circuit), circuit_unitary(c), atol=1e-12)


def test_canonical_layout_entangling():
    cc = canonicalize(entangling())
    assert (cc.L, cc.T2, cc.T) == (4, 1, 7)
    assert cc.cphase_steps == (4,)
    assert cc.circuit.gates[3].is_cphase
    assert cc.T1 == (1, 2, 3, 5, 6, 7)
    # Z pair on both sides of the controlled phase
    assert [g.qubits for g in cc.circuit.gates[1:3]] == [(0,), (1,)]
    assert np.allclose(cc.circuit.gates[1].matrix, Z)


def test_canonical_without_cphase_is_unchanged():
    c = CIRCUITS["proof_copy"]()
    cc = canonicalize(c)
    assert cc.circuit == c and cc.T2 == 0 and cc.L == c.T + 1


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["h", "x", "z", "c01", "c12"]), st.integers(0, 2)), min_size=1, max_size=7))
def test_canonical_invariants(spec):
    gates = []
    for kind, q in spec:
        if kind == "c01":
            gates.append(Gate.cphase(0, 1))
        elif kind == "c12":
            gates.append(Gate.cphase(1, 2))
        else:
            gates.append(Gate.one_qubit({"h": HADAMARD, "x": X, "z": Z}[kind], q))
    c = Circuit(3, 0, gates)
    cc = canonicalize(c)
    assert np.allclose(circuit_unitary(cc.circuit), circuit_unitary(c), atol=1e-10)
    if cc.T2:
        assert cc.T == (cc.T2 + 1) * cc.L - 1
        assert all(cc.circuit.gates[t - 1].is_cphase for t in cc.cphase_steps)
        assert not any(cc.circuit.gates[t - 1].is_cphase for t in cc.T1)
        assert cc.L >= 3


def test_acceptance_probabilities():
    assert acceptance_probability(CIRCUITS["accepting_x"](), [1.0]) == pytest.approx(1.0)
    assert acceptance_probability(CIRCUITS["rejecting_z"](), [1.0]) == pytest.approx(0.0)
    assert acceptance_probability(entangling(), [1.0]) == pytest.approx(0.5)


def test_optimal_proof():
    p, proof = optimal_acceptance(CIRCUITS["proof_copy"](), return_proof=True)
    assert p == pytest.approx(1.0)
    assert abs(proof[0]) == pytest.approx(1.0)


def test_simulate_batch_columns():
    c = entangling()
    psi = simulate(c, [1.0])
    assert np.allclose(psi, circuit_unitary(c)[:, 0])


def test_invalid_gates():
    with pytest.raises(ValueError):
        Gate.one_qubit([[1, 1], [0, 1]], 0)
    with pytest.raises(ValueError):
        Gate.cphase(1, 1)
    with pytest.raises(ValueError):
        Circuit(1, 0, [Gate.cphase(0, 1)])
    with pytest.raises(ValueError):
        Circuit(1, 0, [])
    with pytest.raises(ValueError):
        simulate(Circuit(2, 1, [Gate.one_qubit(X, 0)]), [1.0, 1.0])


def test_cphase_matrix():
    assert np.allclose(embed_oracle(Gate.cphase(0, 1), 2), CPHASE)
