"""Low-lying spectra, gaps and subspace restrictions of Hermitian operators."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ._config import DEGENERACY_TOL, DENSE_SWITCHOVER, ZERO_TOL
from .pauli import PauliSum, realize


class ConvergenceError(RuntimeError):
    """Iterative eigensolver failed to certify its residuals."""


class DegenerateSpectrumError(ValueError):
    """No eigenvalue separated from the ground level by more than the tolerance."""


def as_operator(H):
    """Return ``H`` as a sparse matrix or ndarray; realizes ``PauliSum`` input."""
    if isinstance(H, PauliSum):
        return realize(H)
    if sp.issparse(H):
        return H.tocsr()
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    return H


def as_dense(H):
    H = as_operator(H)
    return H.toarray() if sp.issparse(H) else np.asarray(H, dtype=complex)


class Subspace:
    """Orthonormal basis of a subspace of ``C^ambient_dim``.

    Parameters
    ----------
    basis : array_like
        Matrix whose columns are the basis vectors.
    check : bool
        Verify orthonormality to 1e-10.
    """

    def __init__(self, basis, check=True):
        B = np.asarray(basis, dtype=complex)
        if B.ndim == 1:
            B = B[:, None]
        if B.ndim != 2 or B.shape[1] < 1:
            raise ValueError("a subspace needs at least one basis vector")
        if check:
            gram = B.conj().T @ B
            err = np.abs(gram - np.eye(B.shape[1])).max()
            if err > 1e-10:
                raise ValueError(f"basis is not orthonormal (max Gram deviation {err:.3e})")
        self.basis = B

    @classmethod
    def span(cls, vectors, tol=1e-10):
        """Orthonormalize ``vectors`` (columns or a list) and drop dependent ones."""
        V = np.asarray(vectors, dtype=complex)
        if isinstance(vectors, (list, tuple)):
            V = np.stack([np.asarray(v, dtype=complex) for v in vectors], axis=1)
        U, s, _ = np.linalg.svd(V, full_matrices=False)
        rank = int((s > tol * max(1.0, s.max(initial=0.0))).sum())
        return cls(U[:, :rank])

    @classmethod
    def standard(cls, ambient_dim, indices):
        B = np.zeros((ambient_dim, len(indices)), dtype=complex)
        for col, i in enumerate(indices):
            B[i, col] = 1.0
        return cls(B, check=False)

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]

    def projector(self):
        return self.basis @ self.basis.conj().T

    def complement(self):
        """Orthonormal basis of the orthogonal complement (``None`` if trivial)."""
        if self.dim == self.ambient_dim:
            return None
        Q, _ = np.linalg.qr(np.hstack([self.basis, np.eye(self.ambient_dim)]))
        return Subspace(Q[:, self.dim:self.ambient_dim])

    def contains(self, v, tol=1e-10):
        v = np.asarray(v, dtype=complex)
        return np.linalg.norm(v - self.basis @ (self.basis.conj().T @ v)) <= tol * max(1.0, np.linalg.norm(v))


@dataclass
class SpectralReport:
    """Lowest eigenpairs with per-pair residual norms ``||Hv - lambda v||``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    method: str
    residual_norms: np.ndarray = field(default=None)

    def to_text(self):
        lines = [f"method {self.method}"]
        for j, (lam, r) in enumerate(zip(self.eigenvalues, self.residual_norms), start=1):
            lines.append(f"lambda_{j} {float(lam)!r} residual {float(r):.3e}")
        return "\n".join(lines) + "\n"


def _residuals(H, vals, vecs):
    R = H @ vecs - vecs * vals[None, :]
    return np.linalg.norm(R, axis=0)


def eigen_low(H, k=1, method=None, residual_tol=1e-8, max_restarts=3, seed=0):
    """The ``k`` smallest eigenpairs of a Hermitian operator.

    Parameters
    ----------
    H : PauliSum, sparse matrix or ndarray
    k : int
        Number of eigenpairs.
    method : {"dense", "iterative", None}
        ``None`` picks dense diagonalization up to dimension ``2**10`` and the
        Lanczos solver (``eigsh``) above.
    residual_tol : float
        Each pair must satisfy ``||Hv - lambda v|| <= residual_tol * max(1, |lambda|)``.
    max_restarts : int
        Extra attempts, each doubling the Krylov space, before giving up.

    Raises
    ------
    ConvergenceError
        When residuals cannot be certified.
    """
    H = as_operator(H)
    dim = H.shape[0]
    if not 1 <= k <= dim:
        raise ValueError(f"k={k} must lie in [1, {dim}]")
    if method is None:
        method = "dense" if dim <= DENSE_SWITCHOVER or k >= dim - 1 else "iterative"
    if method == "dense":
        M = H.toarray() if sp.issparse(H) else np.asarray(H)
        vals, vecs = np.linalg.eigh(M)
        vals, vecs = vals[:k], vecs[:, :k]
        res = _residuals(M, vals, vecs)
        _certify(vals, res, residual_tol, "dense")
        return SpectralReport(vals, vecs, "dense", res)
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    if k >= dim - 1:
        raise ValueError("iterative solver needs k < dim - 1; use method='dense'")
    rng = np.random.default_rng(seed)
    v0 = rng.normal(size=dim).astype(np.result_type(H.dtype, np.float64))
    ncv = min(dim, max(2 * k + 1, 20))
    last = None
    for _ in range(max_restarts + 1):
        try:
            vals, vecs = spla.eigsh(H, k=k, which="SA", ncv=ncv, v0=v0, tol=1e-12, maxiter=dim * 20)
        except spla.ArpackNoConvergence as exc:
            last = exc
            ncv = min(dim, 2 * ncv)
            continue
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        res = _residuals(H, vals, vecs)
        if np.all(res <= residual_tol * np.maximum(1.0, np.abs(vals))):
            return SpectralReport(vals, vecs, "iterative", res)
        last = res
        ncv = min(dim, 2 * ncv)
    raise ConvergenceError(f"eigsh failed to certify {k} eigenpairs after {max_restarts} restarts: {last}")


def _certify(vals, res, tol, method):
    bad = res > tol * np.maximum(1.0, np.abs(vals))
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ConvergenceError(
            f"{method} eigenpair {j + 1} has residual {res[j]:.3e} above {tol:g}*max(1,|lambda|)"
        )


def ground_energy(H, **kwargs):
    """``lambda(H)``, the lowest eigenvalue."""
    return float(eigen_low(H, 1, **kwargs).eigenvalues[0])


def all_eigenvalues(H):
    return np.linalg.eigvalsh(as_dense(H))


def operator_norm(H):
    H = as_operator(H)
    if H.shape[0] <= DENSE_SWITCHOVER:
        return float(np.abs(all_eigenvalues(H)).max())
    val = spla.eigsh(H, k=1, which="LM", return_eigenvectors=False)
    return float(abs(val[0]))


def restrict(H, S):
    """Matrix of ``H`` restricted to ``S``: entries ``<b_i|H|b_j>``."""
    H = as_operator(H)
    if H.shape[0] != S.ambient_dim:
        raise ValueError(f"operator dimension {H.shape[0]} does not match subspace ambient {S.ambient_dim}")
    B = S.basis
    R = B.conj().T @ (H @ B)
    return (R + R.conj().T) / 2


def _sorted_spectrum(H, need):
    H = as_operator(H)
    dim = H.shape[0]
    if dim <= DENSE_SWITCHOVER:
        return all_eigenvalues(H)
    return eigen_low(H, min(need, dim - 2)).eigenvalues


def spectral_gap(H, degeneracy_tol=DEGENERACY_TOL):
    """Distance from the ground level to the next distinct eigenvalue."""
    H = as_operator(H)
    dim = H.shape[0]
    if dim < 2:
        raise ValueError("spectral gap needs dimension >= 2")
    need = 2
    while True:
        vals = _sorted_spectrum(H, need)
        above = vals[vals > vals[0] + degeneracy_tol]
        if above.size:
            return float(above[0] - vals[0])
        if vals.size >= dim or need >= dim - 2:
            raise DegenerateSpectrumError("spectrum is fully degenerate within tolerance")
        need *= 2


def smallest_nonzero(H, zero_tol=ZERO_TOL):
    """Least eigenvalue above ``zero_tol`` of a positive semidefinite operator."""
    H = as_operator(H)
    dim = H.shape[0]
    need = 2
    while True:
        vals = _sorted_spectrum(H, need)
        if vals[0] < -zero_tol:
            raise ValueError(f"operator is not positive semidefinite (lambda_min = {vals[0]:.3e})")
        above = vals[vals > zero_tol]
        if above.size:
            return float(above[0])
        if vals.size >= dim or need >= dim - 2:
            raise ValueError("no eigenvalue above zero_tol")
        need *= 2


def weyl_distance(H1, H2):
    """``max_j |mu_j - sigma_j|`` over ascending spectra of two Hermitian operators."""
    A, B = as_dense(H1), as_dense(H2)
    if A.shape != B.shape:
        raise ValueError(f"dimension mismatch {A.shape} vs {B.shape}")
    return float(np.abs(np.linalg.eigvalsh(A) - np.linalg.eigvalsh(B)).max())


def is_psd(H, tol=ZERO_TOL):
    return bool(all_eigenvalues(H)[0] >= -tol)
