"""Verifier circuits over one-qubit gates and controlled-phase gates.

A circuit acts on ``N`` qubits; the first ``m`` hold the proof and the rest
start in ``|0>``. Qubit 0 carries the output bit. States are flat vectors with
qubit 0 as the most significant bit of the index.
"""

from dataclasses import dataclass, field

import numpy as np

from ._config import check_dense

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
CPHASE = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


@dataclass(frozen=True, eq=False)
class Gate:
    """One time step: a one-qubit unitary or a controlled-phase gate.

    Use :meth:`one_qubit` and :meth:`cphase` rather than the raw constructor.
    """

    kind: str
    qubits: tuple
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def one_qubit(cls, U, q):
        U = np.asarray(U, dtype=complex)
        if U.shape != (2, 2):
            raise ValueError(f"one-qubit gate needs a 2x2 matrix, got {U.shape}")
        err = np.abs(U.conj().T @ U - I2).max()
        if err > 1e-10:
            raise ValueError(f"gate matrix is not unitary (deviation {err:.3e})")
        if int(q) < 0:
            raise ValueError("qubit index must be non-negative")
        return cls("u1", (int(q),), U)

    @classmethod
    def cphase(cls, f, s):
        f, s = int(f), int(s)
        if f == s:
            raise ValueError("cphase qubits must be distinct")
        if min(f, s) < 0:
            raise ValueError("qubit index must be non-negative")
        return cls("cphase", (f, s), CPHASE)

    @property
    def is_cphase(self):
        return self.kind == "cphase"

    def __eq__(self, other):
        return (
            isinstance(other, Gate)
            and self.kind == other.kind
            and self.qubits == other.qubits
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.kind, self.qubits, self.matrix.tobytes()))


def identity_gate(q):
    return Gate.one_qubit(I2, q)


def z_gate(q):
    return Gate.one_qubit(Z, q)


class Circuit:
    """Time-ordered gate list; gate ``t`` (1-based) is applied at step ``t``."""

    def __init__(self, N, m, gates):
        N, m = int(N), int(m)
        gates = tuple(gates)
        if N < 1:
            raise ValueError("a circuit needs at least one qubit")
        if not 0 <= m <= N:
            raise ValueError(f"proof size m={m} must lie in [0, N={N}]")
        if len(gates) < 1:
            raise ValueError("a circuit needs at least one gate (T >= 1)")
        for t, g in enumerate(gates, start=1):
            if not isinstance(g, Gate):
                raise TypeError(f"step {t}: expected Gate, got {type(g).__name__}")
            if max(g.qubits) >= N:
                raise ValueError(f"step {t}: gate qubit {max(g.qubits)} out of range for N={N}")
        self.N, self.m, self.gates = N, m, gates

    @property
    def T(self):
        return len(self.gates)

    def __eq__(self, other):
        return isinstance(other, Circuit) and (self.N, self.m, self.gates) == (other.N, other.m, other.gates)

    def __repr__(self):
        return f"Circuit(N={self.N}, m={self.m}, T={self.T})"


def apply_gate(g, state, N):
    """Apply ``g`` to ``state`` of shape ``(2**N,)`` or ``(2**N, k)``."""
    state = np.asarray(state, dtype=complex)
    extra = state.shape[1:]
    psi = state.reshape((2,) * N + extra)
    if g.is_cphase:
        f, s = g.qubits
        idx = [slice(None)] * psi.ndim
        idx[f] = 1
        idx[s] = 1
        psi = psi.copy()
        psi[tuple(idx)] *= -1
    else:
        (q,) = g.qubits
        psi = np.moveaxis(np.tensordot(g.matrix, psi, axes=([1], [q])), 0, q)
    return psi.reshape(state.shape)


def apply_gates(gates, state, N):
    for g in gates:
        state = apply_gate(g, state, N)
    return state


def _input_state(c, proof):
    proof = np.asarray(proof, dtype=complex).ravel()
    if proof.shape != (2 ** c.m,):
        raise ValueError(f"proof must have length 2**m = {2 ** c.m}, got {proof.shape[0]}")
    nrm = np.linalg.norm(proof)
    if abs(nrm - 1.0) > 1e-10:
        raise ValueError(f"proof is not normalized (norm {nrm:.12f})")
    anc = np.zeros(2 ** (c.N - c.m), dtype=complex)
    anc[0] = 1.0
    return np.kron(proof, anc)


def simulate(c, proof):
    """``U_T ... U_1 (proof ⊗ |0...0>)``."""
    return apply_gates(c.gates, _input_state(c, proof), c.N)


def acceptance_probability(c, proof):
    """Probability that qubit 0 is measured as ``|1>`` at the end of the circuit."""
    psi = simulate(c, proof)
    half = psi.shape[0] // 2
    return float(np.vdot(psi[half:], psi[half:]).real)


def circuit_unitary(c):
    check_dense(2 ** c.N, "circuit unitary")
    return apply_gates(c.gates, np.eye(2 ** c.N, dtype=complex), c.N)


def acceptance_operator(c):
    """Hermitian ``M`` on the proof register with ``<p|M|p>`` the acceptance probability."""
    V = circuit_unitary(c)
    cols = np.arange(2 ** c.m) * 2 ** (c.N - c.m)
    W = V[:, cols]
    half = V.shape[0] // 2
    M = W[half:].conj().T @ W[half:]
    return (M + M.conj().T) / 2


def optimal_acceptance(c, return_proof=False):
    """Maximum acceptance probability over all proofs.

    Returns the largest eigenvalue of the acceptance operator, and the
    maximizing proof when ``return_proof`` is set.
    """
    vals, vecs = np.linalg.eigh(acceptance_operator(c))
    best = float(min(1.0, max(0.0, vals[-1])))
    if return_proof:
        return best, vecs[:, -1]
    return best


@dataclass(frozen=True)
class CanonicalCircuit:
    """Circuit with controlled-phase gates at steps ``L, 2L, ..., T2*L``.

    Attributes
    ----------
    circuit : Circuit
        The padded circuit with ``T = (T2+1)L - 1`` steps when ``T2 >= 1``.
    L : int
        Interval length.
    T2 : int
        Number of controlled-phase gates.
    T1 : tuple of int
        Steps holding one-qubit gates.
    """

    circuit: Circuit
    L: int
    T2: int
    T1: tuple

    @property
    def T(self):
        return self.circuit.T

    @property
    def N(self):
        return self.circuit.N

    @property
    def m(self):
        return self.circuit.m

    @property
    def cphase_steps(self):
        return tuple(l * self.L for l in range(1, self.T2 + 1))


def canonicalize(c):
    """Surround every controlled-phase gate with Z pairs and space them evenly.

    Each controlled-phase gate on ``(f, s)`` becomes ``Z_f, Z_s, C, Z_f, Z_s``.
    The one-qubit runs between controlled-phase gates are padded with identity
    gates (inserted just before the next leading Z pair, or at the very end)
    until every run has ``L - 1`` gates, with ``L`` one more than the longest run.
    """
    if not any(g.is_cphase for g in c.gates):
        return CanonicalCircuit(c, c.T + 1, 0, tuple(range(1, c.T + 1)))

    # runs[k] holds the one-qubit gates between the (k-1)th and kth cphase
    runs, cphases, current = [], [], []
    for g in c.gates:
        if g.is_cphase:
            runs.append(current)
            cphases.append(g)
            current = []
        else:
            current.append(g)
    runs.append(current)

    segments = []  # (body, tail) where padding goes between body and tail
    for k, run in enumerate(runs):
        body = []
        if k > 0:
            f, s = cphases[k - 1].qubits
            body = [z_gate(f), z_gate(s)]
        body = body + list(run)
        tail = []
        if k < len(cphases):
            f, s = cphases[k].qubits
            tail = [z_gate(f), z_gate(s)]
        segments.append((body, tail))

    L = max(len(b) + len(t) for b, t in segments) + 1
    gates = []
    for k, (body, tail) in enumerate(segments):
        pad = L - 1 - len(body) - len(tail)
        pad_qubit = tail[0].qubits[0] if tail else (body[-1].qubits[0] if body else 0)
        gates.extend(body)
        gates.extend(identity_gate(pad_qubit) for _ in range(pad))
        gates.extend(tail)
        if k < len(cphases):
            gates.append(cphases[k])
    T2 = len(cphases)
    out = Circuit(c.N, c.m, gates)
    assert out.T == (T2 + 1) * L - 1
    steps = {l * L for l in range(1, T2 + 1)}
    T1 = tuple(t for t in range(1, out.T + 1) if t not in steps)
    return CanonicalCircuit(out, L, T2, T1)
