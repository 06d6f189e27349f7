"""Weighted Pauli-string sums and their sparse matrix realization.

Conventions used throughout the package:

* qubit 0 is the most significant bit of a basis-state index, and tensor
  factors are ordered by ascending qubit index;
* ``Y = [[0, -i], [i, 0]]``;
* every ``PauliSum`` carries real coefficients only, so it is Hermitian by
  construction.
"""

from dataclasses import dataclass
from itertools import product
from numbers import Number

import numpy as np
import scipy.sparse as sp

from ._config import MERGE_TOL

AXES = ("X", "Y", "Z")

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

_BASIS_ORDER = ("I", "X", "Y", "Z")
_BASIS = np.stack([PAULI[a] for a in _BASIS_ORDER])


@dataclass(frozen=True)
class PauliString:
    """Tensor product of X/Y/Z factors on selected qubits, identity elsewhere.

    ``axes`` may be given as a mapping ``{qubit: axis}`` or as pairs; it is
    stored as a tuple of ``(qubit, axis)`` sorted by qubit.
    """

    n: int
    axes: tuple = ()

    def __post_init__(self):
        raw = self.axes.items() if isinstance(self.axes, dict) else self.axes
        pairs = []
        seen = set()
        for q, a in raw:
            q = int(q)
            a = str(a).upper()
            if a == "I":
                continue
            if a not in AXES:
                raise ValueError(f"unknown Pauli axis {a!r}")
            if not 0 <= q < self.n:
                raise ValueError(f"qubit index {q} out of range for {self.n} qubits")
            if q in seen:
                raise ValueError(f"qubit {q} appears twice in Pauli string")
            seen.add(q)
            pairs.append((q, a))
        object.__setattr__(self, "axes", tuple(sorted(pairs)))

    @property
    def locality(self):
        return len(self.axes)

    @property
    def support(self):
        return tuple(q for q, _ in self.axes)

    def with_qubits(self, n):
        """Same string viewed on a register of ``n >= self.n`` qubits."""
        if n < self.n:
            raise ValueError("cannot shrink the qubit register")
        return PauliString(n, self.axes)

    def masks(self):
        """Bit masks ``(flip, phase)`` of this string on basis-state indices."""
        flip = 0
        sign = 0
        for q, a in self.axes:
            bit = 1 << (self.n - 1 - q)
            if a in ("X", "Y"):
                flip |= bit
            if a in ("Y", "Z"):
                sign |= bit
        return flip, sign

    def label(self):
        return " ".join(f"{q}:{a}" for q, a in self.axes)

    def __str__(self):
        return self.label() or "I"


def _as_string(n, s):
    if isinstance(s, PauliString):
        if s.n != n:
            return s.with_qubits(n)
        return s
    return PauliString(n, s)


def _check_real(c):
    if isinstance(c, (complex, np.complexfloating)):
        if c.imag != 0:
            raise TypeError(f"complex coefficient {c!r} rejected: PauliSum weights must be real")
        c = c.real
    if not isinstance(c, Number):
        raise TypeError(f"coefficient must be a real number, got {type(c).__name__}")
    return float(c)


class PauliSum:
    """Real-weighted sum of Pauli strings on ``n`` qubits.

    Duplicate strings are merged and coefficients with magnitude below
    ``tol`` after merging are dropped, so equal operators compare equal
    term by term.

    Parameters
    ----------
    n : int
        Number of qubits.
    terms : iterable of (coefficient, PauliString or mapping)
        Terms to merge.
    tol : float
        Drop threshold applied after merging.
    """

    __slots__ = ("_n", "_terms")

    def __init__(self, n, terms=(), tol=MERGE_TOL):
        if n < 0:
            raise ValueError("qubit count must be non-negative")
        merged = {}
        for coef, s in terms:
            c = _check_real(coef)
            ps = _as_string(n, s)
            merged[ps.axes] = merged.get(ps.axes, 0.0) + c
        self._n = int(n)
        self._terms = tuple(
            (c, PauliString(n, axes))
            for axes, c in sorted(merged.items())
            if abs(c) >= tol
        )

    @classmethod
    def identity(cls, n, coef=1.0):
        return cls(n, [(coef, ())])

    @classmethod
    def single(cls, n, axes, coef=1.0):
        return cls(n, [(coef, axes)])

    @property
    def n(self):
        return self._n

    @property
    def terms(self):
        return self._terms

    @property
    def locality(self):
        return max((s.locality for _, s in self._terms), default=0)

    def coefficients(self):
        """Mapping from ``axes`` tuples to coefficients."""
        return {s.axes: c for c, s in self._terms}

    def coefficient(self, axes):
        return self.coefficients().get(PauliString(self._n, axes).axes, 0.0)

    def with_qubits(self, n):
        """Embed into a larger register, acting trivially on the new qubits."""
        if n < self._n:
            raise ValueError("cannot shrink the qubit register")
        return PauliSum(n, [(c, s.axes) for c, s in self._terms])

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self._n == other._n and self._terms == other._terms

    def __hash__(self):
        return hash((self._n, self._terms))

    def _aligned(self, other):
        if not isinstance(other, PauliSum):
            return None
        n = max(self._n, other._n)
        return n

    def __add__(self, other):
        if isinstance(other, Number) and not isinstance(other, bool):
            return self + PauliSum.identity(self._n, other)
        n = self._aligned(other)
        if n is None:
            return NotImplemented
        return PauliSum(n, [(c, s.axes) for c, s in self._terms + other._terms])

    __radd__ = __add__

    def __neg__(self):
        return PauliSum(self._n, [(-c, s.axes) for c, s in self._terms])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if not isinstance(scalar, Number):
            return NotImplemented
        scalar = _check_real(scalar)
        return PauliSum(self._n, [(scalar * c, s.axes) for c, s in self._terms])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / _check_real(scalar))

    def apply(self, psi):
        """Return ``H @ psi`` without building the matrix."""
        psi = np.asarray(psi, dtype=complex)
        if psi.shape[0] != 2 ** self._n:
            raise ValueError(f"state has length {psi.shape[0]}, expected {2 ** self._n}")
        idx = np.arange(2 ** self._n)
        out = np.zeros_like(psi)
        for c, s in self._terms:
            flip, phase, ny = _string_action(s, idx)
            contrib = (c * (1j) ** ny) * phase
            if psi.ndim == 1:
                out[idx ^ flip] += contrib * psi
            else:
                out[idx ^ flip] += contrib[:, None] * psi
        return out

    def expectation(self, psi):
        """Real expectation value ``<psi|H|psi>``."""
        psi = np.asarray(psi, dtype=complex)
        return float(np.vdot(psi, self.apply(psi)).real)

    def __repr__(self):
        return f"PauliSum(n={self._n}, terms={len(self._terms)})"

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{c:g}*[{s}]" for c, s in self._terms)


def _parity(idx, mask, n):
    out = np.zeros_like(idx)
    for shift in range(n):
        if mask >> shift & 1:
            out ^= (idx >> shift) & 1
    return out


def _string_action(s, idx):
    flip, sign = s.masks()
    ny = sum(1 for _, a in s.axes if a == "Y")
    phase = 1 - 2 * _parity(idx, sign, s.n)
    return flip, phase.astype(float), ny


def term_matrix(term, n):
    """Sparse matrix of ``coefficient * PauliString`` on ``n`` qubits.

    Parameters
    ----------
    term : tuple
        ``(coefficient, PauliString or mapping)``.
    n : int
        Register size; every index in the string must be below ``n``.
    """
    coef, s = term
    s = _as_string(n, s) if not isinstance(s, PauliString) else s
    if s.n > n or any(q >= n for q in s.support):
        raise ValueError(f"Pauli string {s} does not fit on {n} qubits")
    s = s.with_qubits(n)
    idx = np.arange(2 ** n)
    flip, phase, ny = _string_action(s, idx)
    data = coef * (1j) ** ny * phase
    return sp.csr_matrix((data.astype(complex), (idx ^ flip, idx)), shape=(2 ** n, 2 ** n))


def realize(H):
    """Sparse CSR matrix of a ``PauliSum``."""
    dim = 2 ** H.n
    if not H.terms:
        return sp.csr_matrix((dim, dim), dtype=complex)
    idx = np.arange(dim)
    rows, cols, vals = [], [], []
    for c, s in H.terms:
        flip, phase, ny = _string_action(s, idx)
        rows.append(idx ^ flip)
        cols.append(idx)
        vals.append((c * (1j) ** ny) * phase)
    M = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(dim, dim),
    ).tocsr()
    M.sum_duplicates()
    # real-weighted Pauli sums have exactly real diagonals
    M.setdiag(M.diagonal().real)
    M.eliminate_zeros()
    return M


def pauli_coefficients(M):
    """Complex Pauli-basis coefficients of an arbitrary ``2^k x 2^k`` matrix.

    Returns an array of shape ``(4,) * k`` indexed by ``I, X, Y, Z`` per
    qubit, with entries ``Tr(P^dagger M) / 2^k``.
    """
    M = np.asarray(M, dtype=complex)
    dim = M.shape[0]
    k = int(round(np.log2(dim))) if dim else 0
    if M.shape != (dim, dim) or 2 ** k != dim:
        raise ValueError(f"expected a square matrix of size 2^k, got shape {M.shape}")
    if k == 0:
        return M.reshape(())
    # indices: rows i_1..i_k, cols j_1..j_k
    T = M.reshape((2,) * (2 * k))
    for q in range(k):
        # Tr(P M) pairs P[j, i] with M[i, j]; the current row axis is 0 and its
        # column partner sits at k - q, new Pauli indices accumulate at the end
        T = np.tensordot(T, _BASIS, axes=([0, k - q], [2, 1]))
    return T / dim


def decompose_hermitian(M, tol=1e-10, max_qubits=4):
    """Real-weighted ``PauliSum`` equal to a Hermitian matrix.

    Parameters
    ----------
    M : array_like
        Hermitian ``2^k x 2^k`` matrix.
    tol : float
        Hermiticity tolerance, relative to the largest entry magnitude.
    max_qubits : int or None
        Refuse matrices on more qubits than this (dense cost grows as 16^k).
    """
    M = np.asarray(M, dtype=complex)
    dim = M.shape[0]
    k = int(round(np.log2(dim))) if dim else 0
    if max_qubits is not None and k > max_qubits:
        raise ValueError(f"dense decomposition limited to {max_qubits} qubits, got {k}")
    scale = max(np.abs(M).max(initial=0.0), 1.0)
    if np.abs(M - M.conj().T).max(initial=0.0) > tol * scale:
        raise ValueError("matrix is not Hermitian")
    coeffs = pauli_coefficients(M)
    terms = []
    for labels in product(range(4), repeat=k):
        c = coeffs[labels] if k else coeffs[()]
        if abs(c) < MERGE_TOL:
            continue
        axes = [(q, _BASIS_ORDER[a]) for q, a in enumerate(labels) if a]
        terms.append((float(np.real(c)), axes))
    return PauliSum(k, terms)


def norm_bound(H):
    """Triangle-inequality bound ``sum |c|`` on the operator norm."""
    return float(sum(abs(c) for c, _ in H.terms))


class OperatorBuilder:
    """Accumulate products of small local operators into a ``PauliSum``.

    Each factor is a ``(matrix, qubits)`` pair acting on distinct qubits;
    factors are expanded in the Pauli basis and multiplied out exactly, so
    the result carries no dense intermediate larger than the biggest factor.
    Products that are not Hermitian on their own can be added together with
    their adjoint via ``hermitian=True``.
    """

    def __init__(self, n):
        self.n = int(n)
        self._acc = {}

    @staticmethod
    def _expand(matrix, qubits):
        coeffs = pauli_coefficients(matrix)
        k = len(qubits)
        out = []
        for labels in product(range(4), repeat=k):
            c = coeffs[labels] if k else coeffs[()]
            if abs(c) < MERGE_TOL:
                continue
            out.append((c, tuple((q, _BASIS_ORDER[a]) for q, a in zip(qubits, labels) if a)))
        return out

    def add(self, coef, *factors, hermitian=False):
        """Add ``coef * prod(factors)`` (plus its adjoint when ``hermitian``)."""
        used = [q for _, qs in factors for q in qs]
        if len(set(used)) != len(used):
            raise ValueError("factors must act on disjoint qubits")
        if any(not 0 <= q < self.n for q in used):
            raise ValueError("factor qubit out of range")
        expansions = [self._expand(np.asarray(m, dtype=complex), tuple(qs)) for m, qs in factors]
        for combo in product(*expansions):
            c = coef
            axes = []
            for ci, ai in combo:
                c = c * ci
                axes.extend(ai)
            key = tuple(sorted(axes))
            self._acc[key] = self._acc.get(key, 0.0) + c
            if hermitian:
                # Pauli strings are Hermitian, so the adjoint conjugates the weight
                self._acc[key] += np.conj(c)
        return self

    def to_pauli_sum(self, imag_tol=1e-12):
        terms = []
        for axes, c in self._acc.items():
            if abs(c.imag) > imag_tol * max(1.0, abs(c)):
                raise ValueError(f"accumulated operator is not Hermitian (term {axes}: {c})")
            terms.append((float(c.real), axes))
        return PauliSum(self.n, terms)


def projector(bit):
    """Single-qubit projector onto ``|bit>``."""
    P = np.zeros((2, 2), dtype=complex)
    P[bit, bit] = 1.0
    return P


def ket_bra(a, b):
    """Single-qubit ``|a><b|``."""
    M = np.zeros((2, 2), dtype=complex)
    M[a, b] = 1.0
    return M
