"""Resolvent-based self-energy and effective-Hamiltonian certification.

For ``H~ = H + V`` and a cutoff ``lambda*`` splitting the spectrum of ``H``
into ``L_-`` (below) and ``L_+`` (above), the self-energy on ``L_-`` is
``Sigma(z) = z I - (G~_{--}(z))^{-1}`` with ``G~(z) = (z - H~)^{-1}``. It also
equals ``H_- + V_{--} + V_{-+} (z - H_+ - V_{++})^{-1} V_{+-}``, which stays
finite at the eigenvalues of ``H~``; both forms are provided.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .spectral import Subspace, as_dense


class HypothesisError(ValueError):
    """A hypothesis of the effective-Hamiltonian theorem fails."""


class SingularResolventError(ValueError):
    """``z`` lies on (or too close to) the spectrum of the perturbed operator."""


class SeriesDivergenceError(ValueError):
    """``||V_{++} G_+(z)|| >= 1`` so the geometric series does not converge."""


def _herm(M):
    return (M + M.conj().T) / 2


class BlockSplit:
    """Eigen-split of ``H`` at ``cutoff`` into ``L_-`` and ``L_+``.

    Parameters
    ----------
    H : operator
        Unperturbed Hermitian operator.
    cutoff : float
        ``lambda*``; no eigenvalue may lie within ``1e-9`` of it.
    minus_basis : array_like, optional
        Orthonormal columns spanning ``L_-`` to use as coordinates there (for
        instance the effective-qubit basis of a gadget). Must span exactly the
        eigenspace below the cutoff.
    """

    def __init__(self, H, cutoff, minus_basis=None, tol=1e-9):
        Hd = as_dense(H)
        vals, vecs = np.linalg.eigh(Hd)
        close = np.abs(vals - cutoff) <= tol * max(1.0, abs(cutoff))
        if np.any(close):
            raise ValueError(f"eigenvalue {vals[close][0]:.6g} lies at the cutoff {cutoff:.6g}")
        below = vals < cutoff
        if not below.any() or below.all():
            raise ValueError("cutoff must leave eigenvalues on both sides")
        self.H = Hd
        self.cutoff = float(cutoff)
        self.spectrum = vals
        self.lam_minus = float(vals[below].max())
        self.lam_plus = float(vals[~below].min())
        self.plus = vecs[:, ~below]
        if minus_basis is None:
            self.minus = vecs[:, below]
        else:
            B = Subspace(minus_basis).basis
            if B.shape[1] != below.sum():
                raise ValueError(f"minus basis has {B.shape[1]} vectors, L_- has dimension {below.sum()}")
            P_eig = vecs[:, below] @ vecs[:, below].conj().T
            err = np.abs(B @ B.conj().T - P_eig).max()
            if err > 1e-9:
                raise ValueError(f"minus basis does not span the low eigenspace (projector deviation {err:.3e})")
            self.minus = B

    @property
    def gap(self):
        """``lambda_+ - lambda_-`` measured from the spectrum."""
        return self.lam_plus - self.lam_minus

    @property
    def centered_gap(self):
        """Largest ``Delta`` with the spectrum outside ``(cutoff - Delta/2, cutoff + Delta/2)``."""
        return 2.0 * min(self.cutoff - self.lam_minus, self.lam_plus - self.cutoff)

    @property
    def dim_minus(self):
        return self.minus.shape[1]

    @property
    def dim_plus(self):
        return self.plus.shape[1]

    def projectors(self):
        return self.minus @ self.minus.conj().T, self.plus @ self.plus.conj().T

    def block(self, X, a, b):
        """``X_{ab}`` in split coordinates, ``a, b`` in ``{'-', '+'}``."""
        L = self.minus if a == "-" else self.plus
        R = self.minus if b == "-" else self.plus
        return L.conj().T @ X @ R


def block_split(H, cutoff, minus_basis=None):
    return BlockSplit(H, cutoff, minus_basis)


class SelfEnergyContext:
    """Self-energy machinery for ``H~ = H + V`` relative to a :class:`BlockSplit`."""

    def __init__(self, split, V, check_norm=True):
        self.split = split
        self.V = as_dense(V)
        if self.V.shape != split.H.shape:
            raise ValueError("V and H dimensions differ")
        self.norm_V = float(np.abs(np.linalg.eigvalsh(_herm(self.V))).max())
        if check_norm and not self.norm_V < split.centered_gap / 2:
            raise HypothesisError(
                f"||V|| = {self.norm_V:.6g} is not below Delta/2 = {split.centered_gap / 2:.6g}"
            )
        s = split
        self.H_minus = _herm(s.block(s.H, "-", "-"))
        self.H_plus = _herm(s.block(s.H, "+", "+"))
        self.V_mm = _herm(s.block(self.V, "-", "-"))
        self.V_mp = s.block(self.V, "-", "+")
        self.V_pm = s.block(self.V, "+", "-")
        self.V_pp = _herm(s.block(self.V, "+", "+"))
        self.Ht = s.H + self.V
        self._perturbed = None

    @property
    def perturbed_spectrum(self):
        if self._perturbed is None:
            self._perturbed = np.linalg.eigh(_herm(self.Ht))
        return self._perturbed

    def low_eigenvalues(self):
        """Eigenvalues of ``H~`` below the cutoff, ascending."""
        vals = self.perturbed_spectrum[0]
        return vals[vals < self.split.cutoff]

    def resolvent(self, z):
        vals = self.perturbed_spectrum[0]
        dist = np.abs(vals - z).min()
        if dist <= 1e-9 * max(1.0, abs(z)):
            raise SingularResolventError(f"z = {z!r} is within {dist:.3e} of an eigenvalue of H + V")
        return np.linalg.inv(z * np.eye(self.Ht.shape[0]) - self.Ht)

    def G_plus(self, z):
        return np.linalg.inv(z * np.eye(self.split.dim_plus) - self.H_plus)

    def self_energy_exact(self, z):
        """``z I - (P_- G~(z) P_-)^{-1}`` from the full resolvent."""
        G = self.resolvent(z)
        Gmm = self.split.block(G, "-", "-")
        try:
            inv = np.linalg.inv(Gmm)
        except np.linalg.LinAlgError as exc:
            raise SingularResolventError(f"projected resolvent is singular at z = {z!r}") from exc
        return _herm(z * np.eye(self.split.dim_minus) - inv)

    def self_energy(self, z):
        """Schur-complement form; valid for ``z`` below the spectrum of ``H_+ + V_{++}``."""
        A = z * np.eye(self.split.dim_plus) - self.H_plus - self.V_pp
        return _herm(self.H_minus + self.V_mm + self.V_mp @ np.linalg.solve(A, self.V_pm))

    def self_energy_derivative(self, z):
        """``-V_{-+} (z - H_+ - V_{++})^{-2} V_{+-}``."""
        A = z * np.eye(self.split.dim_plus) - self.H_plus - self.V_pp
        X = np.linalg.solve(A, self.V_pm)
        return _herm(-(X.conj().T @ X))

    def series_terms(self, z, order):
        """Individual terms of the expansion up to total ``V``-count ``order``."""
        if order < 0:
            raise ValueError("order must be non-negative")
        G = self.G_plus(z)
        ratio = np.linalg.norm(self.V_pp @ G, 2) if self.split.dim_plus else 0.0
        if ratio >= 1:
            raise SeriesDivergenceError(f"||V_++ G_+(z)|| = {ratio:.4g} >= 1 at z = {z!r}")
        terms = [self.H_minus]
        if order >= 1:
            terms.append(self.V_mm)
        right = G @ self.V_pm
        for _ in range(2, order + 1):
            terms.append(self.V_mp @ right)
            right = G @ (self.V_pp @ right)
        return [_herm(t) for t in terms]

    def self_energy_series(self, z, order):
        """Truncated expansion ``H_- + V_{--} + V_{-+} G_+ V_{+-} + V_{-+} G_+ V_{++} G_+ V_{+-} + ...``.

        ``order`` counts factors of ``V``: order 0 is ``H_-``, order 1 adds
        ``V_{--}``, order 2 adds ``V_{-+} G_+ V_{+-}``, and so on.
        """
        return sum(self.series_terms(z, order))

    def tail_budget(self, z):
        """Bound on the order-4-and-higher remainder, ``2 ||V||^4 ||G_+(z)||^3``.

        Valid when ``||V|| ||G_+(z)|| <= 1/2``; the flag says whether that holds.
        """
        g = float(np.abs(np.linalg.eigvalsh(_herm(self.G_plus(z)))).max())
        return 2.0 * self.norm_V ** 4 * g ** 3, bool(self.norm_V * g <= 0.5)


@dataclass
class EffectiveCheckReport:
    """Outcome of certifying an effective Hamiltonian against the self-energy."""

    c: float
    d: float
    eps_measured: float
    grid_sup: float
    lipschitz_slack: float
    max_eig_dist: float
    hypotheses_ok: bool
    certified: bool
    lam_perturbed: np.ndarray = field(repr=False)
    lam_eff: np.ndarray = field(repr=False)
    fixed_point_max: float = 0.0
    monotonicity_min: float = 0.0
    rows: list = field(default_factory=list, repr=False)
    dim_mismatch: bool = False

    def to_text(self, per_z=True):
        lines = [
            f"theorem3 eps_measured {self.eps_measured!r} max_eig_dist {self.max_eig_dist!r} "
            f"hypotheses_ok {str(self.hypotheses_ok).lower()}"
        ]
        lines.append(
            f"theorem3 grid_sup {self.grid_sup!r} slack {self.lipschitz_slack!r} window {self.c!r} {self.d!r} "
            f"fixed_point_max {self.fixed_point_max!r} certified {str(self.certified).lower()}"
        )
        if per_z:
            for z, dist, eigs in self.rows:
                lines.append(f"z {z!r} dist {dist!r} sigma_eigs " + " ".join(repr(float(e)) for e in eigs))
        return "\n".join(lines) + "\n"


def _grid_sup(ctx, H_eff, lo, hi, npts):
    zs = np.linspace(lo, hi, npts)
    rows = []
    sig = []
    for z in zs:
        S = ctx.self_energy(z)
        sig.append(S)
        rows.append((float(z), float(np.linalg.norm(S - H_eff, 2)), np.linalg.eigvalsh(S)))
    h = (hi - lo) / (npts - 1) if npts > 1 else 0.0
    lip = float(np.linalg.norm(ctx.self_energy_derivative(hi), 2))
    return max(r[1] for r in rows), lip * h / 2, rows, sig


def effective_hamiltonian_check(ctx, H_eff, c=None, d=None, eps=None, z_grid=64, tol=1e-9, max_iter=50):
    """Certify that ``H_eff`` predicts the low spectrum of ``H + V``.

    Parameters
    ----------
    ctx : SelfEnergyContext
    H_eff : array_like or PauliSum
        Operator in the coordinates of ``ctx.split.minus``.
    c, d : float, optional
        Spectral window of ``H_eff``; default ``-||H_eff||`` and ``||H_eff||``.
    eps : float, optional
        Closeness to verify. When omitted it is measured self-consistently:
        the sup of ``||Sigma(z) - H_eff||`` over ``[c - eps, d + eps]`` (plus a
        Lipschitz slack for the grid) is iterated to a fixed point.
    z_grid : int
        Number of uniform grid points.

    Returns
    -------
    EffectiveCheckReport
        ``max_eig_dist`` compares sorted eigenvalues of ``H + V`` below the
        cutoff with those of ``H_eff``; ``certified`` requires it to be at
        most ``eps_measured + tol`` and the hypotheses to hold.

    Raises
    ------
    HypothesisError
        When ``||V|| >= Delta/2``, the spectrum of ``H_eff`` leaves ``[c, d]``,
        or ``d >= lambda* - eps``.
    """
    H_eff = _herm(as_dense(H_eff))
    s = ctx.split
    if H_eff.shape != (s.dim_minus, s.dim_minus):
        raise ValueError(f"H_eff must be {s.dim_minus}x{s.dim_minus}, got {H_eff.shape}")
    if not ctx.norm_V < s.centered_gap / 2:
        raise HypothesisError(f"||V|| = {ctx.norm_V:.6g} is not below Delta/2 = {s.centered_gap / 2:.6g}")
    lam_eff = np.linalg.eigvalsh(H_eff)
    nrm = float(np.abs(lam_eff).max())
    c = -nrm if c is None else float(c)
    d = nrm if d is None else float(d)
    if lam_eff[0] < c - tol or lam_eff[-1] > d + tol:
        raise HypothesisError(f"spectrum of H_eff [{lam_eff[0]:.6g}, {lam_eff[-1]:.6g}] is outside [{c:.6g}, {d:.6g}]")
    if d <= c:
        d = c + max(1e-12, 1e-12 * abs(c))

    pole_floor = float(np.linalg.eigvalsh(ctx.H_plus + ctx.V_pp)[0])
    if eps is None:
        e = 0.0
        for _ in range(max_iter):
            hi = d + e
            if hi >= min(s.cutoff, pole_floor):
                raise HypothesisError("self-consistent window reaches the cutoff")
            sup, slack, rows, sig = _grid_sup(ctx, H_eff, c - e, hi, z_grid)
            new = sup + slack
            if new <= e * (1 + 1e-12) + 1e-300:
                break
            e = new
        eps = e
    else:
        eps = float(eps)
    if not d < s.cutoff - eps:
        raise HypothesisError(f"d = {d:.6g} is not below lambda* - eps = {s.cutoff - eps:.6g}")
    sup, slack, rows, sig = _grid_sup(ctx, H_eff, c - eps, d + eps, z_grid)
    eps_measured = sup + slack

    lam_t = ctx.low_eigenvalues()
    mismatch = lam_t.size != s.dim_minus
    if mismatch:
        warnings.warn(
            f"H + V has {lam_t.size} eigenvalues below the cutoff but dim L_- = {s.dim_minus}", RuntimeWarning
        )
    k = min(lam_t.size, lam_eff.size)
    max_dist = float(np.abs(lam_t[:k] - lam_eff[:k]).max()) if k else 0.0

    fp = fixed_point_errors(ctx)
    mono = min(
        (float(np.linalg.eigvalsh(_herm(a - b))[0]) for a, b in zip(sig[:-1], sig[1:])),
        default=0.0,
    )
    # hypothesis failures raise above, so reaching here means they hold
    certified = max_dist <= eps_measured + tol
    return EffectiveCheckReport(
        c, d, float(eps_measured), float(sup), float(slack), max_dist, True, bool(certified),
        lam_t, lam_eff, float(fp.max(initial=0.0)), mono, rows, mismatch,
    )


def fixed_point_errors(ctx):
    """``|lambda_j(Sigma(l_j)) - l_j|`` for each eigenvalue ``l_j`` of ``H + V`` below the cutoff."""
    lam_t = ctx.low_eigenvalues()
    out = np.zeros(lam_t.size)
    for j, lam in enumerate(lam_t):
        ev = np.linalg.eigvalsh(ctx.self_energy(lam))
        out[j] = abs(ev[j] - lam) if j < ev.size else np.inf
    return out


def monotonicity_violation(ctx, zs):
    """Most negative eigenvalue of ``Sigma(z1) - Sigma(z2)`` over consecutive ``z1 < z2``."""
    zs = np.sort(np.asarray(zs, dtype=float))
    S = [ctx.self_energy(z) for z in zs]
    return min((float(np.linalg.eigvalsh(_herm(a - b))[0]) for a, b in zip(S[:-1], S[1:])), default=0.0)
