"""Three-qubit perturbative gadgets and the reduction of 3-local to 2-local Hamiltonians.

A gadget couples three one-qubit operators ``B1, B2, B3`` on system qubits to
three fresh gadget qubits. The gadget qubits are held near the two-state
subspace ``span{|000>, |111>}`` (the *effective qubit*) by a large penalty,
and third-order virtual transitions reproduce ``-6 B1 B2 B3 ⊗ sigma^x_eff``.

Layout on ``n + 3M`` qubits: system qubits ``0..n-1``, then gadget ``m``
(1-based) on ``n + 3(m-1) .. n + 3m - 1``. Effective operators live on
``n + M`` qubits with effective qubit ``m`` at index ``n + m - 1``.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from ._config import check_dense
from .pauli import PAULI, OperatorBuilder, PauliSum, realize
from .perturbation import BlockSplit, SelfEnergyContext, effective_hamiltonian_check
from .spectral import Subspace, as_dense, restrict

GADGET_QUBIT_CAP = 12


def _one_qubit(B):
    B = np.asarray(B, dtype=complex)
    if B.shape != (2, 2):
        raise ValueError(f"B must be a 2x2 matrix, got shape {B.shape}")
    if np.abs(B - B.conj().T).max() > 1e-12:
        raise ValueError("B must be Hermitian")
    return (B + B.conj().T) / 2


@dataclass(frozen=True)
class Triple:
    """Operators ``B1, B2, B3`` on distinct system qubits ``targets``."""

    B: tuple
    targets: tuple

    def __post_init__(self):
        if len(self.B) != 3 or len(self.targets) != 3:
            raise ValueError("a triple needs three operators and three targets")
        if len(set(self.targets)) != 3:
            raise ValueError(f"triple targets must be distinct, got {self.targets}")
        object.__setattr__(self, "B", tuple(_one_qubit(b) for b in self.B))
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))

    def min_eigenvalue(self):
        return min(float(np.linalg.eigvalsh(b)[0]) for b in self.B)

    def factors(self):
        return [(b, (q,)) for b, q in zip(self.B, self.targets)]


def _check_psd(triples, tol=1e-10):
    for k, tr in enumerate(triples, start=1):
        lo = tr.min_eigenvalue()
        if lo < -tol:
            raise ValueError(f"triple {k}: B has eigenvalue {lo:.3e} < 0; gadget operators must be PSD")


@dataclass(frozen=True)
class GadgetInstance:
    """One gadget: ``Y`` on ``n`` system qubits and a triple of PSD operators.

    ``gadget_qubits`` defaults to ``(n, n+1, n+2)``.
    """

    Y: PauliSum
    triple: Triple
    delta: float
    gadget_qubits: tuple = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.Y.locality > 2:
            raise ValueError(f"Y must be at most 2-local, got locality {self.Y.locality}")
        if max(self.triple.targets) >= self.Y.n:
            raise ValueError("triple targets must be system qubits")
        _check_psd([self.triple])
        if self.gadget_qubits is None:
            n = self.Y.n
            object.__setattr__(self, "gadget_qubits", (n, n + 1, n + 2))

    @property
    def n(self):
        return self.Y.n

    @property
    def Delta(self):
        return self.delta ** -3


def _gadget_H(n_total, qubits, delta):
    # -(Delta/4)(ZZ + ZZ + ZZ - 3I): zero on |000>, |111>, Delta elsewhere
    w = -(delta ** -3) / 4
    terms = [(-3 * w, ())]
    for a, b in combinations(qubits, 2):
        terms.append((w, ((a, "Z"), (b, "Z"))))
    return PauliSum(n_total, terms)


def gadget_terms(Y, triples, delta, n_total=None):
    """Unperturbed ``H`` and perturbation ``V`` for ``M`` gadgets, as PauliSums.

    ``H = sum_m -(delta^-3/4)(Z Z + Z Z + Z Z - 3I)`` on each gadget and
    ``V = Y + delta^-1 sum B_mi^2 - delta^-2 sum B_mi ⊗ X_{g_mi}``.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    n = Y.n
    M = len(triples)
    n_total = n + 3 * M if n_total is None else n_total
    _check_psd(triples)
    H = PauliSum(n_total)
    ob = OperatorBuilder(n_total)
    for c, s in Y.terms:
        ob.add(c, *[(PAULI[a], (q,)) for q, a in s.axes])
    for m, tr in enumerate(triples, start=1):
        gq = tuple(range(n + 3 * (m - 1), n + 3 * m))
        H = H + _gadget_H(n_total, gq, delta)
        for b, q, g in zip(tr.B, tr.targets, gq):
            ob.add(delta ** -1, (b @ b, (q,)))
            ob.add(-(delta ** -2), (b, (q,)), (PAULI["X"], (g,)))
    return H, ob.to_pauli_sum()


def effective_hamiltonian(Y, triples):
    """``Y ⊗ I - 6 sum_m B_m1 B_m2 B_m3 ⊗ sigma^x_eff,m`` on ``n + M`` qubits."""
    n, M = Y.n, len(triples)
    ob = OperatorBuilder(n + M)
    for c, s in Y.terms:
        ob.add(c, *[(PAULI[a], (q,)) for q, a in s.axes])
    for m, tr in enumerate(triples, start=1):
        ob.add(-6.0, *tr.factors(), (PAULI["X"], (n + m - 1,)))
    return ob.to_pauli_sum()


def three_qubit_gadget(g):
    """``(H, V, H_eff)`` for a single :class:`GadgetInstance`.

    ``H`` and ``V`` act on ``n + 3`` qubits (the gadget on ``g.gadget_qubits``
    must be the three qubits after the system); ``H_eff`` is a PauliSum on
    ``n + 1`` qubits with the effective qubit last.
    """
    if tuple(g.gadget_qubits) != (g.n, g.n + 1, g.n + 2):
        raise ValueError("gadget qubits must directly follow the system qubits")
    H, V = gadget_terms(g.Y, [g.triple], g.delta)
    return H, V, effective_hamiltonian(g.Y, [g.triple])


def effective_basis(n, M):
    """Columns embedding ``n + M`` effective coordinates into ``n + 3M`` qubits.

    Effective bit ``e_m`` maps to gadget bits ``000`` or ``111``; column
    ``s * 2^M + e`` is the basis state ``s * 2^(3M) + G(e)``.
    """
    check_dense(2 ** (n + 3 * M), "effective basis")
    cols = np.zeros((2 ** (n + 3 * M), 2 ** (n + M)), dtype=complex)
    for e in range(2 ** M):
        G = 0
        for m in range(M):
            bit = (e >> (M - 1 - m)) & 1
            G = (G << 3) | (0b111 * bit)
        for s in range(2 ** n):
            cols[s * 2 ** (3 * M) + G, s * 2 ** M + e] = 1.0
    return cols


def gadget_context(H, V, n, M, delta, check_norm=True):
    """Split ``H`` at ``Delta/2`` with the effective basis on ``L_-``."""
    split = BlockSplit(as_dense(H), delta ** -3 / 2, minus_basis=effective_basis(n, M))
    return SelfEnergyContext(split, as_dense(V), check_norm=check_norm)


# -- decomposition of 3-local terms ------------------------------------------------


@dataclass
class GadgetDecomposition:
    """``H3 = c_r (Y - 6 sum_m B_m1 B_m2 B_m3)``.

    Attributes
    ----------
    c_r : float
        Power-of-two rescaling.
    Y : PauliSum
        2-local remainder, already divided by ``c_r``.
    triples : list of Triple
    keys : list
        Pauli-string axes gadgetized by each triple.
    coefficients : list of float
        ``c_m`` per triple (``|c_m| <= n_eff^-9``).
    n_eff : int
        The ``n`` used in the ``n^3, n^6, n^9`` scalings (at least 2).
    """

    c_r: float
    Y: PauliSum
    triples: list
    keys: list
    coefficients: list
    n_eff: int
    source: PauliSum = field(default=None, repr=False)

    @property
    def M(self):
        return len(self.triples)

    @property
    def n(self):
        return self.Y.n

    def reconstruct(self):
        """``c_r (Y - 6 sum B B B)`` as a PauliSum."""
        ob = OperatorBuilder(self.n)
        for tr in self.triples:
            ob.add(-6.0, *tr.factors())
        return (self.Y + ob.to_pauli_sum()) * self.c_r

    def residual(self):
        """Max entrywise deviation of the dense reconstruction from the source."""
        if self.source is None:
            raise ValueError("decomposition has no recorded source")
        check_dense(2 ** self.n, "reconstruction residual")
        diff = realize(self.reconstruct()) - realize(self.source)
        return float(np.abs(diff.toarray()).max(initial=0.0)) if diff.nnz else 0.0

    def min_B_eigenvalue(self):
        return min((tr.min_eigenvalue() for tr in self.triples), default=np.inf)


def _strict3(H3):
    if H3.locality > 3:
        raise ValueError(f"input has locality {H3.locality} > 3")
    return {s.axes: c for c, s in H3.terms if s.locality == 3}


def choose_scale(max_coef, n_eff):
    """Smallest power of two at least ``max(1, 6 n^9 max|c'_m|)``."""
    need = max(1.0, 6.0 * n_eff ** 9 * abs(max_coef))
    return float(2.0 ** int(np.ceil(np.log2(need))))


def decompose_3local(H3, c_r=None, keys=None):
    """Split ``H3`` into a 2-local part and one PSD triple per 3-local term.

    Parameters
    ----------
    H3 : PauliSum
        At most 3-local.
    c_r : float, optional
        Override the rescaling (it must still make ``|c_m| <= n^-9``).
    keys : sequence of axes tuples, optional
        Gadgetize exactly these 3-local strings, in this order; strings
        absent from ``H3`` get ``c_m = 0``. Used to keep one gadget layout
        along a path.
    """
    n = H3.n
    n_eff = max(n, 2)
    three = _strict3(H3)
    if keys is None:
        keys = sorted(three)
    else:
        keys = [tuple(k) for k in keys]
        extra = set(three) - set(keys)
        if extra:
            raise ValueError(f"3-local strings {sorted(extra)} are not in the supplied key list")
    cprime = [three.get(k, 0.0) for k in keys]
    if c_r is None:
        c_r = choose_scale(max((abs(c) for c in cprime), default=0.0), n_eff)
    c_r = float(c_r)
    n3 = float(n_eff) ** 3
    low = PauliSum(n, [(c, s.axes) for c, s in H3.terms if s.locality < 3]) / c_r
    triples, coefs = [], []
    corr = OperatorBuilder(n)
    for k, cp in zip(keys, cprime):
        c_m = -cp / (6.0 * c_r)
        if abs(c_m) > n3 ** -3 * (1 + 1e-12):
            raise ValueError(f"c_r = {c_r} too small: |c_m| = {abs(c_m):.3e} exceeds n^-9")
        (qa, a), (qb, b), (qc, g) = k
        B1 = (2 / n3) * PAULI["I"] + n3 ** 2 * c_m * PAULI[a]
        B2 = (2 / n3) * PAULI["I"] + (1 / n3) * PAULI[b]
        B3 = (2 / n3) * PAULI["I"] + (1 / n3) * PAULI[g]
        tr = Triple((B1, B2, B3), (qa, qb, qc))
        triples.append(tr)
        coefs.append(c_m)
        # D_m = c_m sss - B1 B2 B3 is at most 2-local; Y absorbs -6 D_m
        corr.add(6.0, *tr.factors())
    D = corr.to_pauli_sum()
    # the 3-local part of 6 B1B2B3 is 6 c_m sss; drop it exactly
    D = PauliSum(n, [(c, s.axes) for c, s in D.terms if s.locality < 3])
    Y = low + D
    return GadgetDecomposition(c_r, Y, triples, list(keys), coefs, n_eff, H3)


@dataclass
class ReductionInfo:
    c_r: float
    M: int
    delta: float
    n: int
    n_out: int
    terms_H: int
    terms_V: int
    terms_out: int
    locality_out: int
    decomposition: GadgetDecomposition = field(repr=False)


def reduce_3to2(H3, delta, decomposition=None):
    """2-local ``H2 = c_r (H + V)`` on ``n + 3M`` qubits with the same low spectrum as ``H3``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    dec = decompose_3local(H3) if decomposition is None else decomposition
    if dec.M == 0:
        H2 = dec.reconstruct()
        return H2, ReductionInfo(dec.c_r, 0, float(delta), H3.n, H3.n, 0, len(H2), len(H2), H2.locality, dec)
    H, V = gadget_terms(dec.Y, dec.triples, delta)
    H2 = (H + V) * dec.c_r
    info = ReductionInfo(dec.c_r, dec.M, float(delta), H3.n, H2.n, len(H), len(V), len(H2), H2.locality, dec)
    return H2, info


# -- verification ------------------------------------------------------------------


@dataclass
class ReductionCheck:
    lambda_H3: float
    lambda_H2: float
    difference: float
    c_r: float
    delta: float
    M: int
    eps_measured: float
    within_bound: bool
    K: float
    all_plus_ok: bool
    spectrum_check: object = field(repr=False, default=None)

    def to_text(self):
        lines = [
            f"gadget lambda_H3 {self.lambda_H3!r} lambda_H2 {self.lambda_H2!r} difference {self.difference!r}",
            f"gadget c_r {self.c_r!r} delta {self.delta!r} M {self.M} eps {self.eps_measured!r} "
            f"K {self.K!r} bound_ok {str(self.within_bound).lower()} all_plus_ok {str(self.all_plus_ok).lower()}",
        ]
        if self.spectrum_check is not None:
            lines.append(self.spectrum_check.to_text(per_z=False).rstrip("\n"))
        return "\n".join(lines) + "\n"

    @property
    def ok(self):
        return self.within_bound and self.all_plus_ok and (self.spectrum_check is None or self.spectrum_check.certified)


def plus_sector_basis(n, M):
    """Columns of ``I_sys ⊗ |+>^M`` in effective coordinates."""
    plus = np.ones(2 ** M, dtype=complex) / np.sqrt(2 ** M)
    return np.kron(np.eye(2 ** n, dtype=complex), plus[:, None])


def all_plus_sector(H_eff, n, M, tol=1e-9):
    """Restriction of ``H_eff`` to the all-``|+>`` sector and whether it holds the ground energy."""
    R = restrict(H_eff, Subspace(plus_sector_basis(n, M), check=False))
    lam = float(np.linalg.eigvalsh(as_dense(H_eff))[0])
    return R, bool(abs(float(np.linalg.eigvalsh(R)[0]) - lam) <= tol * max(1.0, abs(lam)))


def verify_reduction(H3, delta, H2=None, z_grid=64, tol=1e-9):
    """Compare ``lambda(H2)`` with ``lambda(H3)`` and certify through the self-energy.

    The ground energy of ``H2`` is taken as ``c_r lambda(H + V)`` to avoid
    rounding at the ``c_r delta^-3`` scale. When ``H2`` is passed it must
    equal the reduction of ``H3`` at ``delta``.
    """
    H2_built, info = reduce_3to2(H3, delta)
    if H2 is not None and not _same(H2, H2_built):
        raise ValueError("supplied H2 is not the reduction of H3 at this delta")
    dec = info.decomposition
    n, M = H3.n, dec.M
    if n + 3 * M > GADGET_QUBIT_CAP:
        raise ValueError(f"n + 3M = {n + 3 * M} exceeds the dense cap of {GADGET_QUBIT_CAP} qubits")
    lam3 = float(np.linalg.eigvalsh(as_dense(H3))[0])
    if M == 0:
        lam2 = float(np.linalg.eigvalsh(as_dense(H2_built))[0])
        return ReductionCheck(lam3, lam2, abs(lam2 - lam3), dec.c_r, float(delta), 0, 0.0,
                              abs(lam2 - lam3) <= tol, abs(lam2 - lam3) / (dec.c_r * delta), True)
    H, V = gadget_terms(dec.Y, dec.triples, delta)
    ctx = gadget_context(H, V, n, M, delta)
    lam2 = dec.c_r * float(np.linalg.eigvalsh((ctx.Ht + ctx.Ht.conj().T) / 2)[0])
    H_eff = effective_hamiltonian(dec.Y, dec.triples)
    rep = effective_hamiltonian_check(ctx, H_eff, z_grid=z_grid, tol=tol)
    _, plus_ok = all_plus_sector(H_eff, n, M)
    diff = abs(lam2 - lam3)
    ok = diff <= dec.c_r * rep.eps_measured + tol * max(1.0, dec.c_r)
    return ReductionCheck(lam3, lam2, diff, dec.c_r, float(delta), M, rep.eps_measured, bool(ok),
                          diff / (dec.c_r * delta), plus_ok, rep)


def _same(A, B, tol=1e-9):
    if A.n != B.n:
        return False
    a, b = A.coefficients(), B.coefficients()
    scale = max([1.0] + [abs(c) for c in b.values()])
    return all(abs(a.get(k, 0.0) - b.get(k, 0.0)) <= tol * scale for k in set(a) | set(b))
