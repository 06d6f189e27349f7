"""Compile verifier circuits into local Hamiltonians and reduce locality with gadgets."""

from .circuit import Circuit, Gate, canonicalize
from .clock import build_log_local, build_two_local, build_history_state
from .gadgets import decompose_3local, reduce_3to2, verify_reduction
from .pauli import PauliString, PauliSum, realize
from .spectral import eigen_low, spectral_gap

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "Gate",
    "PauliString",
    "PauliSum",
    "build_history_state",
    "build_log_local",
    "build_two_local",
    "canonicalize",
    "decompose_3local",
    "eigen_low",
    "realize",
    "reduce_3to2",
    "spectral_gap",
    "verify_reduction",
]
