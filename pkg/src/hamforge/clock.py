"""Clock Hamiltonians for verifier circuits.

Two encodings of the step counter are supported:

* binary: ``ceil(log2(T+1))`` clock qubits holding ``t`` as an integer
  (most significant bit first), giving a log-local Hamiltonian;
* unary: ``T`` clock qubits holding ``1^t 0^(T-t)``, giving a 2-local
  Hamiltonian once controlled-phase propagation is checked through the
  surrounding Z gates.

The computation register always occupies qubits ``0..N-1`` and the clock
follows, so a basis index is ``comp_index * 2**n_clock + clock_index``.
"""

from dataclasses import dataclass, field
from math import ceil, cos, log2, pi

import numpy as np
import scipy.sparse as sp

from .circuit import CPHASE, Circuit, apply_gate, canonicalize, CanonicalCircuit
from .pauli import OperatorBuilder, PauliSum, ket_bra, norm_bound, projector, realize
from .spectral import Subspace, all_eigenvalues, restrict

# Largest N + T for which subspace bases and restriction checks are assembled.
RESTRICTION_QUBIT_CAP = 14

_SX = np.array([[0, 1], [1, 0]], dtype=complex)


def penalty_weight(K):
    """Penalty that makes the projection-lemma loss at most 1/8 for ``||H1|| <= K``."""
    return 8.0 * K * K + 2.0 * K


def propagation_block(T):
    """The ``(T+1) x (T+1)`` path-graph matrix that each propagation block reduces to."""
    E = np.zeros((T + 1, T + 1))
    for t in range(1, T + 1):
        E[t, t] += 0.5
        E[t - 1, t - 1] += 0.5
        E[t, t - 1] -= 0.5
        E[t - 1, t] -= 0.5
    return E


def propagation_gap(T):
    """Closed form of the smallest nonzero eigenvalue of ``propagation_block(T)``."""
    return 1.0 - cos(pi / (T + 1))


def clock_qubits_binary(T):
    return max(1, ceil(log2(T + 1)))


def _gate_factor(g):
    return (g.matrix, g.qubits)


# ---------------------------------------------------------------------------
# log-local construction


@dataclass(frozen=True)
class LogLocalHamiltonian:
    """``H = H_out + J_in H_in + J_prop H_prop`` with a binary clock."""

    circuit: Circuit
    n_clock: int
    H_in: PauliSum
    H_out: PauliSum
    H_prop: PauliSum
    J_in: float
    J_prop: float

    @property
    def n(self):
        return self.circuit.N + self.n_clock

    def components(self):
        return {"H_in": self.H_in, "H_out": self.H_out, "H_prop": self.H_prop}

    def weights(self):
        return {"J_in": self.J_in, "J_prop": self.J_prop}

    def total(self):
        return self.H_out + self.J_in * self.H_in + self.J_prop * self.H_prop


def _clock_dyad(a, b, c):
    M = np.zeros((2 ** c, 2 ** c), dtype=complex)
    M[a, b] = 1.0
    return M


def log_local_components(c):
    """``(H_in, H_out, H_prop, n_clock)`` for the binary-clock construction."""
    T, N = c.T, c.N
    nc = clock_qubits_binary(T)
    n = N + nc
    clock = tuple(range(N, n))

    b = OperatorBuilder(n)
    for i in range(c.m, N):
        b.add(1.0, (projector(1), (i,)), (_clock_dyad(0, 0, nc), clock))
    H_in = b.to_pauli_sum()

    H_out = OperatorBuilder(n).add(T + 1.0, (projector(0), (0,)), (_clock_dyad(T, T, nc), clock)).to_pauli_sum()

    b = OperatorBuilder(n)
    for t, g in enumerate(c.gates, start=1):
        b.add(0.5, (_clock_dyad(t, t, nc), clock))
        b.add(0.5, (_clock_dyad(t - 1, t - 1, nc), clock))
        b.add(-0.5, _gate_factor(g), (_clock_dyad(t, t - 1, nc), clock), hermitian=True)
    H_prop = b.to_pauli_sum()
    return H_in, H_out, H_prop, nc


def auto_weights_log_local(H_in, H_out, T):
    """Nested projection-lemma weights, innermost first."""
    K = norm_bound(H_out)
    J_in = (T + 1) * penalty_weight(K)
    K = norm_bound(H_out) + J_in * norm_bound(H_in)
    J_prop = penalty_weight(K) / propagation_gap(T)
    return J_in, J_prop


def build_log_local(c, J_in=None, J_prop=None):
    """Compile ``c`` with a binary clock.

    Parameters
    ----------
    c : Circuit
    J_in, J_prop : float, optional
        Positive weights. Missing weights are filled in by the nested
        projection-lemma recipe (:func:`auto_weights_log_local`).
    """
    H_in, H_out, H_prop, nc = log_local_components(c)
    if J_in is None or J_prop is None:
        a_in, a_prop = auto_weights_log_local(H_in, H_out, c.T)
        J_in = a_in if J_in is None else J_in
        J_prop = a_prop if J_prop is None else J_prop
    if J_in <= 0 or J_prop <= 0:
        raise ValueError("weights must be positive")
    return LogLocalHamiltonian(c, nc, H_in, H_out, H_prop, float(J_in), float(J_prop))


# ---------------------------------------------------------------------------
# history states


@dataclass(frozen=True)
class HistoryState:
    vector: np.ndarray = field(repr=False)
    encoding: str
    N: int
    n_clock: int

    @property
    def n(self):
        return self.N + self.n_clock


def unary_index(t, T):
    """Clock-register index of ``1^t 0^(T-t)``."""
    if not 0 <= t <= T:
        raise ValueError(f"clock value {t} outside [0, {T}]")
    return (1 << T) - (1 << (T - t))


def unary_clock_state(t, T):
    v = np.zeros(2 ** T, dtype=complex)
    v[unary_index(t, T)] = 1.0
    return v


def prefix_states(c, initial):
    """Array whose row ``t`` is ``U_t ... U_1 initial`` (``initial`` may be a matrix)."""
    out = [np.asarray(initial, dtype=complex)]
    for g in c.gates:
        out.append(apply_gate(g, out[-1], c.N))
    return out


def _history_vector(c, init, encoding):
    T = c.T
    if encoding == "binary":
        nc = clock_qubits_binary(T)
        index = lambda t: t
    elif encoding == "unary":
        nc = T
        index = lambda t: unary_index(t, T)
    else:
        raise ValueError(f"unknown clock encoding {encoding!r}")
    psi = np.zeros((2 ** c.N, 2 ** nc), dtype=complex)
    for t, state in enumerate(prefix_states(c, init)):
        psi[:, index(t)] = state
    return psi.ravel() / np.sqrt(T + 1), nc


def build_history_state(c, proof, encoding="binary"):
    """Uniform superposition of the partial computations on ``proof ⊗ |0..0>``."""
    from .circuit import _input_state

    if isinstance(c, CanonicalCircuit):
        c = c.circuit
    vec, nc = _history_vector(c, _input_state(c, proof), encoding)
    return HistoryState(vec, encoding, c.N, nc)


# ---------------------------------------------------------------------------
# two-local construction


def _cq(N, j):
    """Global qubit of clock position ``j`` (1-based)."""
    return N + j - 1


def clock_at(k, N, T):
    """Factors of a 2-local operator that equals ``|k^><k^|`` on legal clock states.

    Positions 0 and T + 1 behave as a clock bit fixed to 1 and 0 respectively,
    which yields the one-sided projectors at the ends of the clock.
    """
    if not 0 <= k <= T:
        raise ValueError(f"clock value {k} outside [0, {T}]")
    if k == 0:
        return [(projector(0), (_cq(N, 1),))]
    if k == T:
        return [(projector(1), (_cq(N, T),))]
    return [(projector(1), (_cq(N, k),)), (projector(0), (_cq(N, k + 1),))]


@dataclass(frozen=True)
class TwoLocalHamiltonian:
    """``H = H_out + J_in H_in + J_2 H_prop2 + J_1 H_prop1 + J_clock H_clock``."""

    canonical: CanonicalCircuit
    H_in: PauliSum
    H_out: PauliSum
    H_clock: PauliSum
    H_prop1: PauliSum
    H_prop2: PauliSum
    J_in: float
    J_2: float
    J_1: float
    J_clock: float

    @property
    def n(self):
        return self.canonical.N + self.canonical.T

    def components(self):
        return {
            "H_in": self.H_in,
            "H_out": self.H_out,
            "H_clock": self.H_clock,
            "H_prop1": self.H_prop1,
            "H_prop2": self.H_prop2,
        }

    def weights(self):
        return {"J_in": self.J_in, "J_2": self.J_2, "J_1": self.J_1, "J_clock": self.J_clock}

    def total(self):
        return (
            self.H_out
            + self.J_in * self.H_in
            + self.J_2 * self.H_prop2
            + self.J_1 * self.H_prop1
            + self.J_clock * self.H_clock
        )


def _add_prop_t(b, cc, t):
    N, T = cc.N, cc.T
    g = cc.circuit.gates[t - 1]
    b.add(0.5, *clock_at(t, N, T))
    b.add(0.5, *clock_at(t - 1, N, T))
    b.add(-0.5, _gate_factor(g), (ket_bra(1, 0), (_cq(N, t),)), hermitian=True)


def h_prop_t(cc, t):
    b = OperatorBuilder(cc.N + cc.T)
    _add_prop_t(b, cc, t)
    return b.to_pauli_sum()


def h_qubit(cc, t):
    """Two-local term coupling the controlled-phase qubits to clock bit ``t``."""
    N, T = cc.N, cc.T
    f, s = cc.circuit.gates[t - 1].qubits
    w = np.diag([-1.0, 0.5]).astype(complex)
    b = OperatorBuilder(N + T)
    b.add(1.0, (w, (f,)), (_SX, (_cq(N, t),)))
    b.add(1.0, (w, (s,)), (_SX, (_cq(N, t),)))
    return b.to_pauli_sum()


def h_time(cc, t):
    """Clock-only term comparing steps ``t-3..t+2`` around a controlled-phase step."""
    N, T = cc.N, cc.T
    if t - 3 < 0 or t + 2 > T:
        raise ValueError(f"controlled-phase step {t} needs clock values {t - 3}..{t + 2} inside [0, {T}]; need L >= 3")
    b = OperatorBuilder(N + T)
    for k, w in ((t, 1.0), (t + 1, 6.0), (t + 2, 1.0), (t - 3, 1.0), (t - 2, 6.0), (t - 1, 1.0)):
        b.add(w / 8, *clock_at(k, N, T))
    for a in (t + 1, t - 2):
        b.add(2.0 / 8, (ket_bra(1, 0), (_cq(N, a),)), (ket_bra(1, 0), (_cq(N, a + 1),)), hermitian=True)
    for a in (t + 1, t + 2, t - 2, t - 1):
        b.add(1.0 / 8, (_SX, (_cq(N, a),)))
    return b.to_pauli_sum()


def two_local_components(cc):
    N, T, m = cc.N, cc.T, cc.m
    n = N + T
    if cc.T2 >= 1 and cc.L < 3:
        raise ValueError(f"interval length L={cc.L} < 3; controlled-phase checks would leave the clock")

    b = OperatorBuilder(n)
    for i in range(m, N):
        b.add(1.0, (projector(1), (i,)), (projector(0), (_cq(N, 1),)))
    H_in = b.to_pauli_sum()

    H_out = OperatorBuilder(n).add(T + 1.0, (projector(0), (0,)), (projector(1), (_cq(N, T),))).to_pauli_sum()

    b = OperatorBuilder(n)
    for i in range(1, T + 1):
        for j in range(i + 1, T + 1):
            b.add(1.0, (projector(0), (_cq(N, i),)), (projector(1), (_cq(N, j),)))
    H_clock = b.to_pauli_sum()

    b = OperatorBuilder(n)
    for t in cc.T1:
        _add_prop_t(b, cc, t)
    H_prop1 = b.to_pauli_sum()

    return H_in, H_out, H_clock, H_prop1, H_prop2_of(cc)


def auto_weights_two_local(cc, H_in, H_out, H_prop1, H_prop2):
    """Nested projection-lemma weights ``(J_in, J_2, J_1, J_clock)``, innermost first.

    Each weight is ``8K^2 + 2K`` divided by the smallest nonzero eigenvalue of
    the penalty term on the relevant subspace, with ``K`` the norm bound of
    everything already assembled.
    """
    T, L, T2 = cc.T, cc.L, cc.T2
    K = norm_bound(H_out)
    J_in = (T + 1) * penalty_weight(K)
    K = norm_bound(H_out) + J_in * norm_bound(H_in)
    gap2 = propagation_gap(T2) / L if T2 >= 1 else 1.0
    J_2 = penalty_weight(K) / gap2
    K += J_2 * norm_bound(H_prop2)
    J_1 = penalty_weight(K) / propagation_gap(L - 1 if T2 >= 1 else T)
    K += J_1 * norm_bound(H_prop1)
    J_clock = penalty_weight(K)
    return J_in, J_2, J_1, J_clock


def build_two_local(cc, J_in=None, J_2=None, J_1=None, J_clock=None):
    """Compile a canonical circuit into the 2-local clock Hamiltonian on ``N + T`` qubits.

    A plain :class:`Circuit` is canonicalized first. Missing weights come
    from :func:`auto_weights_two_local`.
    """
    if isinstance(cc, Circuit):
        cc = canonicalize(cc)
    comps = two_local_components(cc)
    given = (J_in, J_2, J_1, J_clock)
    if any(w is None for w in given):
        auto = auto_weights_two_local(cc, comps[0], comps[1], comps[3], comps[4])
        given = tuple(a if w is None else w for a, w in zip(auto, given))
    if any(w <= 0 for w in given):
        raise ValueError("weights must be positive")
    return TwoLocalHamiltonian(cc, *comps, *map(float, given))


# ---------------------------------------------------------------------------
# subspaces of the unary construction


def _check_cap(N, T):
    if N + T > RESTRICTION_QUBIT_CAP:
        raise ValueError(f"N + T = {N + T} exceeds the dense verification cap {RESTRICTION_QUBIT_CAP}")


def legal_clock_subspace(T):
    """Span of the ``T + 1`` unary clock states on the clock register alone."""
    return Subspace.standard(2 ** T, [unary_index(t, T) for t in range(T + 1)])


def legal_subspace(N, T):
    """Computation register tensored with legal clock states; basis ordered ``(i, t)``."""
    _check_cap(N, T)
    idx = [i * 2 ** T + unary_index(t, T) for i in range(2 ** N) for t in range(T + 1)]
    return Subspace.standard(2 ** (N + T), idx)


def _block_vectors(cc):
    """``eta[l][:, i]`` as full vectors (one column per computational basis input)."""
    N, T, L = cc.N, cc.T, cc.L
    states = prefix_states(cc.circuit, np.eye(2 ** N, dtype=complex))
    blocks = []
    for l in range(cc.T2 + 1):
        V = np.zeros((2 ** N, 2 ** T, 2 ** N), dtype=complex)
        for t in range(l * L, min((l + 1) * L, T + 1)):
            V[:, unary_index(t, T), :] = states[t]
        blocks.append(V.reshape(2 ** (N + T), 2 ** N) / np.sqrt(L))
    return blocks


def build_prop1_subspace(cc):
    """Orthonormal basis ``|eta_{l,i}>``; column ``l * 2**N + i``."""
    if isinstance(cc, Circuit):
        cc = canonicalize(cc)
    _check_cap(cc.N, cc.T)
    B = np.hstack(_block_vectors(cc))
    return Subspace(B)


# ---------------------------------------------------------------------------
# sparse helpers for dense-regime identity checks


def _clock_dyad_sparse(a, b, T):
    dim = 2 ** T
    return sp.csr_matrix(([1.0], ([unary_index(a, T)], [unary_index(b, T)])), shape=(dim, dim))


def _op(comp, a, b, N, T):
    """``comp ⊗ |a^><b^|`` as a sparse matrix on ``N + T`` qubits."""
    return sp.kron(sp.csr_matrix(comp), _clock_dyad_sparse(a, b, T), format="csr")


def _embed_two(M, f, s, N):
    """Dense ``2**N`` matrix of a two-qubit operator ``M`` on qubits ``(f, s)``."""
    ops = OperatorBuilder(N).add(1.0, (M, (f, s))).to_pauli_sum()
    return realize(ops).toarray()


def eq6_clock_matrix(t, T):
    """The sum-of-projectors form of the time term on legal clock states, as a ``(T+1)^2`` matrix."""
    e = np.eye(T + 1)
    P = lambda v: np.outer(v, v)
    a, b_, c = e[t], e[t + 1], e[t + 2]
    d, f, g = e[t - 3], e[t - 2], e[t - 1]
    K = (
        2 * P(a + b_) + 2 * P(b_ + c) + P(a - b_) + P(b_ - c) - 2 * P(a - c)
        + 2 * P(d + f) + 2 * P(f + g) + P(d - f) + P(f - g) - 2 * P(d - g)
    )
    return K / 8


def time_reflection(t, T):
    """Permutation matrix swapping ``t-1-j`` with ``t+j`` for ``j = 0, 1, 2``."""
    perm = list(range(T + 1))
    for j in range(3):
        perm[t - 1 - j], perm[t + j] = t + j, t - 1 - j
    return np.eye(T + 1)[perm]


@dataclass
class RestrictionReport:
    """Maximum deviations of each restriction identity, with pass flags."""

    checks: dict = field(default_factory=dict)
    tol: float = 1e-9

    def record(self, name, deviation, detail=""):
        self.checks[name] = {"deviation": float(deviation), "ok": bool(deviation <= self.tol), "detail": detail}

    @property
    def ok(self):
        return all(c["ok"] for c in self.checks.values())

    def to_text(self):
        rows = []
        for name, c in self.checks.items():
            line = f"restriction {name} deviation {c['deviation']:.3e} ok {str(c['ok']).lower()}"
            if c["detail"]:
                line += f" # {c['detail']}"
            rows.append(line)
        return "\n".join(rows) + "\n"


def _maxdiff(A, B):
    A = A.toarray() if sp.issparse(A) else A
    B = B.toarray() if sp.issparse(B) else B
    return float(np.abs(A - B).max()) if A.size else 0.0


def _where(A, B):
    D = np.abs(A - B)
    i, j = np.unravel_index(np.argmax(D), D.shape)
    return f"largest at ({i},{j}): {A[i, j]:.6g} vs {B[i, j]:.6g}"


def effective_cphase_operator(cc):
    """``H'`` as a sparse operator: the projector-form propagation check at each controlled-phase step."""
    N, T = cc.N, cc.T
    dimN = 2 ** N
    I = np.eye(dimN)
    H = sp.csr_matrix((2 ** (N + T), 2 ** (N + T)), dtype=complex)
    for t in cc.cphase_steps:
        f, s = cc.circuit.gates[t - 1].qubits
        C = _embed_two(CPHASE, f, s, N)
        H = H + 0.5 * (_op(I, t, t, N, T) + _op(I, t - 1, t - 1, N, T))
        H = H - 0.5 * (_op(C, t, t - 1, N, T) + _op(C.conj().T, t - 1, t, N, T))
    return H


def _projector_form(cc, weights):
    """Sum over steps of ``|ab><ab|_{f,s} ⊗ w_ab (|t-1^> ± |t^>)(...)``; ``weights[ab] = (w, sign)``."""
    N, T = cc.N, cc.T
    H = sp.csr_matrix((2 ** (N + T), 2 ** (N + T)), dtype=complex)
    for t in cc.cphase_steps:
        f, s = cc.circuit.gates[t - 1].qubits
        for ab, (w, sign) in weights.items():
            P2 = np.zeros((4, 4))
            P2[ab, ab] = 1.0
            Pc = _embed_two(P2, f, s, N)
            H = H + w * (
                _op(Pc, t - 1, t - 1, N, T) + _op(Pc, t, t, N, T)
                + sign * (_op(Pc, t - 1, t, N, T) + _op(Pc, t, t - 1, N, T))
            )
    return H


def verify_restriction_identities(cc, tol=1e-9):
    """Check the restriction identities behind the 2-local soundness argument.

    Checks recorded (each as a maximum entrywise or eigenvalue deviation):

    ``time_term_projector_form``
        every time term restricted to legal clock states equals its
        sum-of-projectors form;
    ``time_term_reflection``
        that form is invariant under the reflection about ``t - 1/2``;
    ``clock_projector_on_prop1``
        ``I ⊗ |t^><t^|`` restricted to the one-qubit-propagation space equals
        ``(1/L) sum_i |eta_{l,i}><eta_{l,i}|`` for ``t = lL``;
    ``prop2_four_projector_form``
        the restricted controlled-phase terms match their four-projector form;
    ``effective_forms_agree`` and ``effective_equals_eta_chain``
        the effective propagation operator ``H'`` in projector form, in
        propagation form, and as the chain ``(1/2L) sum (eta_{l-1} - eta_l)(...)``;
    ``prop2_dominates_effective``
        ``H_prop2|_S - H'`` is positive semidefinite (reported as ``max(0, -lambda_min)``).
    """
    if isinstance(cc, Circuit):
        cc = canonicalize(cc)
    N, T, L, T2 = cc.N, cc.T, cc.L, cc.T2
    _check_cap(N, T)
    if T2 < 1:
        raise ValueError("restriction identities need at least one controlled-phase gate")
    report = RestrictionReport(tol=tol)
    dimN = 2 ** N

    S_legal = legal_subspace(N, T)
    dev_a, dev_sym, detail_a = 0.0, 0.0, ""
    for t in cc.cphase_steps:
        got = restrict(realize(h_time(cc, t)), S_legal)
        K6 = eq6_clock_matrix(t, T)
        want = np.kron(np.eye(dimN), K6)
        d = _maxdiff(got, want)
        if d > dev_a:
            dev_a, detail_a = d, f"step {t}: " + _where(got, want)
        R = time_reflection(t, T)
        dev_sym = max(dev_sym, _maxdiff(R @ K6 @ R.T, K6))
    report.record("time_term_projector_form", dev_a, detail_a)
    report.record("time_term_reflection", dev_sym)

    S1 = build_prop1_subspace(cc)
    I = np.eye(dimN)
    dev = 0.0
    for l in range(1, T2 + 1):
        t = l * L
        got = restrict(_op(I, t, t, N, T), S1)
        want = np.zeros((S1.dim, S1.dim))
        want[l * dimN:(l + 1) * dimN, l * dimN:(l + 1) * dimN] = np.eye(dimN) / L
        dev = max(dev, _maxdiff(got, want))
    report.record("clock_projector_on_prop1", dev)

    H2_res = restrict(realize(H_prop2_of(cc)), S1)
    four = _projector_form(cc, {0: (2.0, -1), 1: (0.5, -1), 2: (0.5, -1), 3: (1.0, 1)})
    got = restrict(four, S1)
    report.record("prop2_four_projector_form", _maxdiff(H2_res, got), _where(H2_res, got))

    Hp = restrict(effective_cphase_operator(cc), S1)
    Hp_proj = restrict(_projector_form(cc, {0: (0.5, -1), 1: (0.5, -1), 2: (0.5, -1), 3: (0.5, 1)}), S1)
    report.record("effective_forms_agree", _maxdiff(Hp, Hp_proj), _where(Hp, Hp_proj))

    chain = np.zeros((S1.dim, S1.dim))
    for l in range(1, T2 + 1):
        for i in range(dimN):
            v = np.zeros(S1.dim)
            v[(l - 1) * dimN + i] = 1.0
            v[l * dimN + i] = -1.0
            chain += np.outer(v, v)
    chain /= 2 * L
    report.record("effective_equals_eta_chain", _maxdiff(Hp, chain), _where(Hp, chain))

    lam = float(np.linalg.eigvalsh(H2_res - Hp)[0])
    report.record("prop2_dominates_effective", max(0.0, -lam), f"lambda_min {lam:.3e}")
    return report


def H_prop2_of(cc):
    """Sum of the qubit and time terms over all controlled-phase steps."""
    H = PauliSum(cc.N + cc.T)
    for t in cc.cphase_steps:
        H = H + h_qubit(cc, t) + h_time(cc, t)
    return H


# ---------------------------------------------------------------------------
# change of basis for the binary construction


def change_of_basis_blocks(c):
    """Return ``(W^dag H_prop W on clock values <= T, expected block-diagonal form)``.

    ``W = sum_t U_t...U_1 ⊗ |t><t|`` maps each computational input to its
    propagated trajectory, which turns the propagation term into ``2**N``
    copies of :func:`propagation_block`.
    """
    N, T = c.N, c.T
    H_in, H_out, H_prop, nc = log_local_components(c)
    dimN, dimC = 2 ** N, 2 ** nc
    W = np.zeros((dimN * dimC, dimN * dimC), dtype=complex)
    states = prefix_states(c, np.eye(dimN, dtype=complex))
    for t in range(dimC):
        U = states[t] if t <= T else np.eye(dimN)
        D = np.zeros((dimC, dimC))
        D[t, t] = 1.0
        W += np.kron(U, D)
    Hp = realize(H_prop).toarray()
    got = W.conj().T @ Hp @ W
    keep = [i * dimC + t for i in range(dimN) for t in range(T + 1)]
    return got[np.ix_(keep, keep)], np.kron(np.eye(dimN), propagation_block(T))
