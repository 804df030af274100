"""Toric and surface code threshold simulations with a minimum-weight
perfect matching decoder."""

from .lattice import CodeKind, CodeSpec, Stab, build_lattice
from .pauli_noise import ErrorModel, Extraction, PauliFrame, RngStream

__version__ = "0.1.0"

__all__ = [
    "CodeKind",
    "CodeSpec",
    "ErrorModel",
    "Extraction",
    "PauliFrame",
    "RngStream",
    "Stab",
    "build_lattice",
]
