"""scikit-learn style wrappers around the compiler, gadget reducer and eigensolver.

The fitted object is a Hamiltonian, so ``fit`` takes a circuit or a Pauli sum
rather than a data matrix; ``transform`` acts on state vectors stored as rows.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .circuit import Circuit, canonicalize
from .clock import build_log_local, build_two_local
from .gadgets import decompose_3local, reduce_3to2
from .pauli import PauliSum, realize
from .spectral import eigen_low


def _states(X, dim):
    # check_array refuses complex input, so state rows are validated here
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of state rows, got {X.ndim} dimensions")
    if not np.isfinite(X).all():
        raise ValueError("states contain NaN or infinity")
    if X.shape[1] != dim:
        raise ValueError(f"states must have {dim} columns, got {X.shape[1]}")
    return X


class ClockCompiler(TransformerMixin, BaseEstimator):
    """Compile a circuit; ``transform`` maps states to their energies.

    Parameters
    ----------
    form : {"two-local", "log-local"}
    weights : "auto" or tuple
        ``(J_in, J_prop)`` for log-local, ``(J_in, J_1, J_2, J_clock)`` for two-local.
    """

    def __init__(self, form="two-local", weights="auto"):
        self.form = form
        self.weights = weights

    def fit(self, X, y=None):
        if not isinstance(X, Circuit):
            raise TypeError(f"ClockCompiler.fit expects a Circuit, got {type(X).__name__}")
        w = None if self.weights == "auto" else tuple(float(v) for v in self.weights)
        if self.form == "log-local":
            self.compiled_ = build_log_local(X, *(w or (None, None)))
        elif self.form == "two-local":
            J_in, J_1, J_2, J_clock = w or (None,) * 4
            self.compiled_ = build_two_local(canonicalize(X), J_in=J_in, J_2=J_2, J_1=J_1, J_clock=J_clock)
        else:
            raise ValueError(f"unknown form {self.form!r}")
        self.hamiltonian_ = self.compiled_.total()
        self.weights_ = self.compiled_.weights()
        self.n_qubits_ = self.hamiltonian_.n
        return self

    def transform(self, X):
        check_is_fitted(self, "hamiltonian_")
        S = _states(X, 2 ** self.n_qubits_)
        return np.array([self.hamiltonian_.expectation(s) for s in S])[:, None]


class GadgetReducer(TransformerMixin, BaseEstimator):
    """Learn the decomposition of a 3-local Pauli sum; ``transform`` returns the 2-local Hamiltonian."""

    def __init__(self, delta=0.1):
        self.delta = delta

    def fit(self, X, y=None):
        if not isinstance(X, PauliSum):
            raise TypeError(f"GadgetReducer.fit expects a PauliSum, got {type(X).__name__}")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        self.decomposition_ = decompose_3local(X)
        self.c_r_ = self.decomposition_.c_r
        self.n_triples_ = self.decomposition_.M
        return self

    def transform(self, X):
        check_is_fitted(self, "decomposition_")
        if X != self.decomposition_.source:
            raise ValueError("transform must receive the Hamiltonian the reducer was fitted on")
        return reduce_3to2(X, self.delta, decomposition=self.decomposition_)[0]


class LowEnergySpectrum(TransformerMixin, BaseEstimator):
    """Lowest ``k`` eigenpairs; ``transform`` gives amplitudes on them (like a PCA projection)."""

    def __init__(self, k=1, method=None, seed=0):
        self.k = k
        self.method = method
        self.seed = seed

    def fit(self, X, y=None):
        H = realize(X) if isinstance(X, PauliSum) else X
        rep = eigen_low(H, self.k, method=self.method, seed=self.seed)
        self.report_ = rep
        self.eigenvalues_ = rep.eigenvalues
        self.eigenvectors_ = rep.eigenvectors
        return self

    def transform(self, X):
        check_is_fitted(self, "eigenvectors_")
        S = _states(X, self.eigenvectors_.shape[0])
        return S @ self.eigenvectors_.conj()
