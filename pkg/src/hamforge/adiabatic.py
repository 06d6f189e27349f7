"""Quadratic Hamiltonian paths, gap sweeps and slow-evolution simulation.

A path is ``H(s) = A + s B + s^2 C`` on ``s in [0, 1]`` with PauliSum
coefficients. Evolution follows the linear schedule ``s = t / total_time``.
"""

from dataclasses import dataclass, field

import numpy as np

from ._config import DEGENERACY_TOL, check_dense
from .gadgets import (
    _strict3,
    choose_scale,
    decompose_3local,
    effective_basis,
    effective_hamiltonian,
    gadget_context,
    gadget_terms,
    plus_sector_basis,
)
from .pauli import PauliSum, norm_bound
from .perturbation import effective_hamiltonian_check
from .spectral import DegenerateSpectrumError, as_dense, spectral_gap


class HamiltonianPath:
    """``H(s) = A + s B + s^2 C``.

    Parameters
    ----------
    A, B, C : PauliSum
        ``B`` and ``C`` default to zero on the same register as ``A``.
    """

    def __init__(self, A, B=None, C=None):
        n = A.n
        B = PauliSum(n) if B is None else B
        C = PauliSum(n) if C is None else C
        n = max(A.n, B.n, C.n)
        self.A, self.B, self.C = A.with_qubits(n), B.with_qubits(n), C.with_qubits(n)

    @classmethod
    def linear(cls, H0, H1):
        """``(1 - s) H0 + s H1``."""
        n = max(H0.n, H1.n)
        H0, H1 = H0.with_qubits(n), H1.with_qubits(n)
        return cls(H0, H1 - H0)

    @property
    def n(self):
        return self.A.n

    @property
    def degree(self):
        if len(self.C):
            return 2
        return 1 if len(self.B) else 0

    @property
    def locality(self):
        return max(self.A.locality, self.B.locality, self.C.locality)

    def at(self, s):
        return self.A + self.B * float(s) + self.C * float(s) ** 2

    def derivative(self, s):
        return self.B + self.C * (2.0 * float(s))

    def dense(self, s):
        """``A + sB + s^2C`` assembled from dense coefficient matrices."""
        s = float(s)
        return as_dense(self.A) + s * as_dense(self.B) + s * s * as_dense(self.C)

    def __repr__(self):
        return f"HamiltonianPath(n={self.n}, degree={self.degree})"


def from_samples(H0, Hh, H1):
    """Quadratic path through ``H(0) = H0``, ``H(1/2) = Hh``, ``H(1) = H1``."""
    C = (H1 - Hh * 2.0 + H0) * 2.0
    B = H1 - H0 - C
    return HamiltonianPath(H0, B, C)


# -- lifting 3-local paths ---------------------------------------------------------


@dataclass
class LiftedPath:
    path: HamiltonianPath
    c_r: float
    delta: float
    n: int
    M: int
    keys: list

    def decomposition(self, p3, s):
        return decompose_3local(p3.at(s), c_r=self.c_r, keys=self.keys)

    def gadget_parts(self, p3, s):
        """``(H, V(s), H_eff(s))`` with ``H2(s) = c_r (H + V(s))``."""
        dec = self.decomposition(p3, s)
        H, V = gadget_terms(dec.Y, dec.triples, self.delta)
        return H, V, effective_hamiltonian(dec.Y, dec.triples)


def gadget_lift_path(p3, delta):
    """Replace every 3-local term of a linear path by a gadget.

    One ``c_r`` (fixed from the endpoints, valid on ``[0, 1]`` by linearity)
    and one gadget layout serve every ``s``. Only ``B_m1`` moves with ``s``,
    so ``V(s)`` and hence the lifted path are quadratic.

    Returns
    -------
    LiftedPath
    """
    if p3.degree > 1:
        raise ValueError("only paths linear in s can be lifted")
    if p3.locality > 3:
        raise ValueError(f"path has locality {p3.locality} > 3")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    ends = [_strict3(p3.at(0.0)), _strict3(p3.at(1.0))]
    keys = sorted(set(ends[0]) | set(ends[1]) | set(_strict3(p3.B)))
    n = p3.n
    biggest = max((abs(c) for e in ends for c in e.values()), default=0.0)
    c_r = choose_scale(biggest, max(n, 2))
    lifted = LiftedPath(None, c_r, float(delta), n, len(keys), keys)
    samples = []
    for s in (0.0, 0.5, 1.0):
        dec = lifted.decomposition(p3, s)
        if dec.M == 0:
            samples.append(dec.reconstruct())
        else:
            H, V = gadget_terms(dec.Y, dec.triples, delta)
            samples.append((H + V) * c_r)
    lifted.path = from_samples(*samples)
    return lifted


# -- gap sweep ---------------------------------------------------------------------


@dataclass
class GapSweep:
    s: np.ndarray
    gaps: np.ndarray
    degenerate: np.ndarray
    min_gap: float
    argmin: float


def gap_sweep(p, grid=101, degeneracy_tol=DEGENERACY_TOL):
    """Spectral gap of ``H(s)`` on ``grid`` uniform points including both endpoints.

    Points where the spectrum is fully degenerate get ``nan`` and are flagged;
    the sweep continues.
    """
    if grid < 2:
        raise ValueError("grid needs at least two points")
    check_dense(2 ** p.n, "gap sweep")
    ss = np.linspace(0.0, 1.0, grid)
    gaps = np.full(grid, np.nan)
    flags = np.zeros(grid, dtype=bool)
    for i, s in enumerate(ss):
        try:
            gaps[i] = spectral_gap(p.dense(s), degeneracy_tol)
        except DegenerateSpectrumError:
            flags[i] = True
    if np.all(flags):
        return GapSweep(ss, gaps, flags, float("nan"), float("nan"))
    j = int(np.nanargmin(gaps))
    return GapSweep(ss, gaps, flags, float(gaps[j]), float(ss[j]))


# -- evolution ---------------------------------------------------------------------


def ground_projector(H, tol=DEGENERACY_TOL):
    vals, vecs = np.linalg.eigh(as_dense(H))
    G = vecs[:, vals <= vals[0] + tol * max(1.0, abs(vals[0]))]
    return G @ G.conj().T


def ground_fidelity(H, psi, tol=DEGENERACY_TOL):
    """Weight of ``psi`` in the ground space of ``H`` (degenerate levels included)."""
    vals, vecs = np.linalg.eigh(as_dense(H))
    G = vecs[:, vals <= vals[0] + tol * max(1.0, abs(vals[0]))]
    return float(np.linalg.norm(G.conj().T @ psi) ** 2)


@dataclass
class StepRecord:
    step: int
    s: float
    fidelity: float
    gap: float


@dataclass
class EvolutionResult:
    state: np.ndarray
    fidelity: float
    min_gap: float
    steps: int
    records: list = field(default_factory=list, repr=False)

    def to_csv(self):
        lines = ["step,s,fidelity,gap"]
        for r in self.records:
            lines.append(f"{r.step},{r.s!r},{r.fidelity!r},{r.gap!r}")
        return "\n".join(lines) + "\n"


def _step(H, dt):
    vals, vecs = np.linalg.eigh(H)
    return (vecs * np.exp(-1j * vals * dt)[None, :]) @ vecs.conj().T, vals


def evolve(p, total_time, steps, initial, record=True):
    """Integrate ``i d/dt psi = H(t / total_time) psi`` with midpoint exponentials.

    Parameters
    ----------
    p : HamiltonianPath
    total_time : float
        Non-negative run length.
    steps : int
        Number of uniform slices (at least 1).
    initial : array_like
        Normalized start state.
    record : bool
        Keep a per-step record of fidelity to the instantaneous ground space
        at the end of the slice and the gap at the slice midpoint.

    Returns
    -------
    EvolutionResult
        ``fidelity`` is the weight of the final state in the ground space of
        ``H(1)``; ``min_gap`` is the smallest midpoint gap seen.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if total_time < 0:
        raise ValueError("total_time must be non-negative")
    check_dense(2 ** p.n, "evolution")
    psi = np.asarray(initial, dtype=complex).ravel()
    if psi.shape[0] != 2 ** p.n:
        raise ValueError(f"initial state has length {psi.shape[0]}, expected {2 ** p.n}")
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("initial state is not normalized")
    dt = total_time / steps
    records, min_gap = [], np.inf
    for k in range(steps):
        s_mid = (k + 0.5) / steps
        U, vals = _step(p.dense(s_mid), dt)
        psi = U @ psi
        distinct = vals[vals > vals[0] + DEGENERACY_TOL]
        gap = float(distinct[0] - vals[0]) if distinct.size else float("nan")
        if distinct.size:
            min_gap = min(min_gap, gap)
        if record:
            s_end = (k + 1) / steps
            records.append(StepRecord(k + 1, s_end, ground_fidelity(p.dense(s_end), psi), gap))
    psi /= np.linalg.norm(psi)
    fid = ground_fidelity(p.dense(1.0), psi)
    return EvolutionResult(psi, min(1.0, fid), float(min_gap), steps, records)


# -- ground-state closeness --------------------------------------------------------


def overlap_lower_bound(norm_V, lam_plus, lam_eff1, lam_eff2, eps):
    """``1 - 2||V||^2 / (lambda_+ - l1 - eps)^2 - 4 eps / (l2 - l1)``."""
    if not lam_eff2 > lam_eff1:
        raise ValueError("effective ground level must be non-degenerate (l2 > l1)")
    return 1.0 - 2.0 * norm_V ** 2 / (lam_plus - lam_eff1 - eps) ** 2 - 4.0 * eps / (lam_eff2 - lam_eff1)


@dataclass
class FidelityBound:
    bound: float
    overlap: float
    eps: float
    norm_V: float
    lam_plus: float
    lam_eff: tuple
    ok: bool

    def to_text(self):
        return (
            f"groundstate bound {self.bound!r} overlap {self.overlap!r} eps {self.eps!r} "
            f"ok {str(self.ok).lower()}\n"
        )


def groundstate_fidelity_bound(ctx, H_eff, eps=None, degeneracy_tol=DEGENERACY_TOL, tol=1e-9):
    """Lower bound on ``|<v~|v_eff>|`` and the measured overlap.

    ``eps`` defaults to the self-consistent closeness measured by
    :func:`effective_hamiltonian_check`. ``v_eff`` is embedded into the full
    space through the split's ``L_-`` basis.
    """
    He = as_dense(H_eff)
    He = (He + He.conj().T) / 2
    vals, vecs = np.linalg.eigh(He)
    if vals.size < 2 or vals[1] - vals[0] <= degeneracy_tol:
        raise ValueError("H_eff ground level is degenerate; the bound needs l2 > l1")
    if eps is None:
        if ctx.norm_V == 0:
            eps = 0.0
        else:
            eps = effective_hamiltonian_check(ctx, He).eps_measured
    bound = overlap_lower_bound(ctx.norm_V, ctx.split.lam_plus, vals[0], vals[1], eps)
    v_t = ctx.perturbed_spectrum[1][:, 0]
    v_e = ctx.split.minus @ vecs[:, 0]
    overlap = float(abs(np.vdot(v_t, v_e)))
    return FidelityBound(float(bound), overlap, float(eps), ctx.norm_V, ctx.split.lam_plus,
                         (float(vals[0]), float(vals[1])), bool(overlap >= bound - tol))


def endpoint_overlap(p3, lifted, s=1.0):
    """Ground-state weight of the lifted ``H2(s)`` on ``ground(H3(s)) ⊗ |+_eff>^M``."""
    n, M = lifted.n, lifted.M
    check_dense(2 ** (n + 3 * M), "endpoint overlap")
    H2 = lifted.path.dense(s)
    v = np.linalg.eigh(H2)[1][:, 0]
    P3 = ground_projector(p3.at(s))
    embed = effective_basis(n, M) @ plus_sector_basis(n, M)
    target = embed @ P3 @ embed.conj().T
    return float(np.real(np.vdot(v, target @ v)))


def lifted_context(p3, lifted, s):
    H, V, He = lifted.gadget_parts(p3, s)
    return gadget_context(H, V, lifted.n, lifted.M, lifted.delta), He


# -- norms -------------------------------------------------------------------------


@dataclass
class PathNorms:
    H: float
    dH: float
    d2H: float


def path_norm_report(p):
    """Bounds on ``sup_s ||H(s)||``, ``||H'(s)||``, ``||H''(s)||`` from coefficient norms."""
    a, b, c = norm_bound(p.A), norm_bound(p.B), norm_bound(p.C)
    return PathNorms(a + b + c, b + 2 * c, 2 * c)


# -- toy paths ---------------------------------------------------------------------


def two_level_path():
    """``(1 - s) Z + s X`` on one qubit; gap ``2 sqrt((1-s)^2 + s^2)``."""
    return HamiltonianPath.linear(PauliSum.single(1, {0: "Z"}), PauliSum.single(1, {0: "X"}))


def toy_three_local_path():
    """``(1 - s)(-X_0) + s Z_0 Z_1 Z_2`` on three qubits."""
    return HamiltonianPath.linear(
        PauliSum.single(3, {0: "X"}, -1.0), PauliSum.single(3, {0: "Z", 1: "Z", 2: "Z"})
    )
