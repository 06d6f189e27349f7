"""Two-sided bound on the ground energy of ``H1 + H2`` when ``H2`` penalizes ``S^perp``.

For ``H2`` vanishing on ``S`` and at least ``J`` on its complement, with
``K = ||H1||`` and ``J > 2K``::

    lambda(H1|_S) - K^2 / (J - 2K)  <=  lambda(H1 + H2)  <=  lambda(H1|_S)
"""

from dataclasses import dataclass

import numpy as np

from ._config import DENSE_SWITCHOVER
from .pauli import PauliSum, norm_bound
from .spectral import Subspace, as_dense, as_operator, eigen_low, restrict


class PreconditionError(ValueError):
    """A hypothesis of the bound does not hold for the given instance."""


@dataclass(frozen=True)
class ProjectionInstance:
    H1: object
    H2: object
    S: Subspace
    J: float


@dataclass(frozen=True)
class ProjectionResult:
    lower: float
    lambda_H: float
    lambda_restricted: float
    J: float
    K: float
    ok: bool
    K_exact: bool = True

    @property
    def upper(self):
        return self.lambda_restricted

    @property
    def offset(self):
        """``lambda_restricted - lower``, i.e. ``K^2 / (J - 2K)``."""
        return self.lambda_restricted - self.lower

    def to_text(self):
        row = (
            f"projlemma lower {self.lower!r} lambda {self.lambda_H!r} restricted {self.lambda_restricted!r} "
            f"J {self.J!r} K {self.K!r} ok {str(self.ok).lower()}"
        )
        if not self.K_exact:
            row += " # K from norm bound"
        return row


def _norm(H1):
    A = as_operator(H1)
    if A.shape[0] <= DENSE_SWITCHOVER:
        return float(np.abs(np.linalg.eigvalsh(as_dense(A))).max()), True
    if isinstance(H1, PauliSum):
        return norm_bound(H1), False
    raise PreconditionError("operator too large for an exact norm and not a PauliSum; cannot bound K")


def check_instance(inst, tol=1e-9):
    """Validate the hypotheses and return ``K``; raise :class:`PreconditionError` otherwise."""
    H2 = as_operator(inst.H2)
    if H2.shape[0] != inst.S.ambient_dim or as_operator(inst.H1).shape != H2.shape:
        raise PreconditionError("H1, H2 and S must share the ambient dimension")
    scale = tol * max(1.0, abs(inst.J))
    leak = np.linalg.norm(H2 @ inst.S.basis, axis=0).max()
    if leak > scale:
        raise PreconditionError(f"H2 does not annihilate S (||H2 v|| = {leak:.3e})")
    comp = inst.S.complement()
    if comp is not None:
        floor = float(np.linalg.eigvalsh(restrict(H2, comp))[0])
        if floor < inst.J - scale:
            raise PreconditionError(f"H2 on the complement of S has eigenvalue {floor:.6g} below J = {inst.J:.6g}")
    K, exact = _norm(inst.H1)
    if not inst.J > 2 * K:
        raise PreconditionError(f"need J > 2K, got J = {inst.J:.6g}, K = {K:.6g}")
    return K, exact


def projection_bounds(inst, tol=1e-9):
    """Evaluate both sides of the bound and certify the sandwich.

    Returns
    -------
    ProjectionResult
        ``ok`` is true when ``lower - tol <= lambda_H <= lambda_restricted + tol``.
    """
    K, exact = check_instance(inst, tol)
    H = as_operator(inst.H1) + as_operator(inst.H2)
    lam = float(eigen_low(H, 1).eigenvalues[0])
    lam_S = float(np.linalg.eigvalsh(restrict(inst.H1, inst.S))[0])
    lower = lam_S - K * K / (inst.J - 2 * K)
    ok = lower - tol <= lam <= lam_S + tol
    return ProjectionResult(lower, lam, lam_S, float(inst.J), K, bool(ok), exact)


def penalty_instance(H1, S, J):
    """Instance with ``H2 = J (I - Pi_S)``."""
    H2 = J * (np.eye(S.ambient_dim) - S.projector())
    return ProjectionInstance(H1, (H2 + H2.conj().T) / 2, S, float(J))


def canned_instance(J=10.0):
    """``H1 = sigma_x`` penalized by ``J |1><1|``, with ``S = span{|0>}``."""
    H1 = np.array([[0, 1], [1, 0]], dtype=complex)
    S = Subspace.standard(2, [0])
    return penalty_instance(H1, S, J)


def random_instance(rng, dim=None, J_factor=None, max_norm=1.0):
    """Random Hermitian ``H1`` with ``||H1|| <= max_norm`` and a random subspace.

    ``J`` is drawn from ``(2K, 100K]`` unless ``J_factor`` fixes ``J = J_factor * K``.
    """
    dim = int(rng.integers(2, 17)) if dim is None else dim
    A = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    H1 = (A + A.conj().T) / 2
    H1 *= max_norm * rng.uniform(0.1, 1.0) / np.abs(np.linalg.eigvalsh(H1)).max()
    k = int(rng.integers(1, dim))
    Q, _ = np.linalg.qr(rng.normal(size=(dim, k)) + 1j * rng.normal(size=(dim, k)))
    S = Subspace(Q)
    K = float(np.abs(np.linalg.eigvalsh(H1)).max())
    if J_factor is None:
        J = K * rng.uniform(2.0, 100.0)
        J = max(J, 2 * K * (1 + 1e-6))
    else:
        J = J_factor * K
    return penalty_instance(H1, S, J)
