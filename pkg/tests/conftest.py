import numpy as np
import pytest

from hamforge.circuit import HADAMARD, X, Z, Circuit, Gate


def u(U, q):
    return Gate.one_qubit(U, q)


def accepting_x():
    return Circuit(1, 0, [u(X, 0)])


def rejecting_z():
    return Circuit(1, 0, [u(Z, 0)])


def entangling():
    """N = 2 with one controlled phase: H(0), C(0,1), H(1)."""
    return Circuit(2, 0, [u(HADAMARD, 0), Gate.cphase(0, 1), u(HADAMARD, 1)])


def proof_copy():
    """Flips the proof qubit onto the output, so it accepts the proof |0>."""
    return Circuit(2, 1, [u(HADAMARD, 1), u(X, 0), u(HADAMARD, 1)])


def three_qubit():
    S = np.diag([1, 1j])
    return Circuit(3, 1, [u(HADAMARD, 0), Gate.cphase(0, 1), u(HADAMARD, 2), u(S, 2), u(X, 2)])


CIRCUITS = {
    "accepting_x": accepting_x,
    "rejecting_z": rejecting_z,
    "entangling": entangling,
    "proof_copy": proof_copy,
    "three_qubit": three_qubit,
}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hermitian(rng, dim, scale=1.0):
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (A + A.conj().T) / 2
