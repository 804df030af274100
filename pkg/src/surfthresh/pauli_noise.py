"""Pauli-frame error tracking and the four error processes.

Single-qubit Paulis are encoded in two bits: bit 0 is the X component and
bit 1 the Z component, so 0 = I, 1 = X, 2 = Z, 3 = Y.  A two-qubit Pauli is
``pc | (pt << 2)`` for control Pauli ``pc`` and target Pauli ``pt``; codes
1..15 are the nontrivial ones.

The low-level ``_``-prefixed helpers are compiled and shared with the trial
kernels, so the Python API and the fast path run the same code.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numba import njit

PAULI_CODES = {"I": 0, "X": 1, "Z": 2, "Y": 3}
PAULI_NAMES = {v: k for k, v in PAULI_CODES.items()}


class Extraction(str, enum.Enum):
    IDEAL = "ideal"
    CIRCUIT = "circuit"


@dataclass(frozen=True)
class ErrorModel:
    """Uniform error model: every process fails with probability ``p0``.

    ``time_boundaries`` lets detection events terminate on a future time
    boundary; it is off by default since the experiments append an ideal
    final round.
    """

    p0: float
    extraction: Extraction = Extraction.IDEAL
    time_edge_weight: int = 1
    time_boundaries: bool = False

    def __post_init__(self):
        p = float(self.p0)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"p0 must lie in [0, 1], got {self.p0}")
        object.__setattr__(self, "p0", p)
        object.__setattr__(self, "extraction", Extraction(self.extraction))
        tw = self.time_edge_weight
        if isinstance(tw, bool) or int(tw) != tw or tw < 1:
            raise ValueError(f"time_edge_weight must be a positive integer, got {tw}")
        object.__setattr__(self, "time_edge_weight", int(tw))


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by a master seed and a tuple of
    integers (configuration and trial index).

    Philox is counter-based, so a stream depends only on its key and not on
    which worker draws it or in which order.
    """

    seed: int
    key: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([int(self.seed) & (2**64 - 1), *(int(k) for k in self.key)])
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(key))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng)).generator()
    raise TypeError(f"cannot make a random generator from {type(rng).__name__}")


@dataclass
class PauliFrame:
    """X and Z flip bits over data qubits followed by ancillas."""

    x: np.ndarray
    z: np.ndarray = field(default=None)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.uint8)
        if self.z is None:
            self.z = np.zeros_like(self.x)
        self.z = np.asarray(self.z, dtype=np.uint8)
        if self.x.shape != self.z.shape or self.x.ndim != 1:
            raise ValueError("x and z flip arrays must be 1-d and the same length")

    @classmethod
    def zeros(cls, n: int) -> "PauliFrame":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    def __len__(self):
        return len(self.x)

    def copy(self) -> "PauliFrame":
        return PauliFrame(self.x.copy(), self.z.copy())

    def __xor__(self, other: "PauliFrame") -> "PauliFrame":
        return PauliFrame(self.x ^ other.x, self.z ^ other.z)

    def __eq__(self, other):
        if not isinstance(other, PauliFrame):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def pauli(self, q: int) -> str:
        return PAULI_NAMES[int(self.x[q]) | (int(self.z[q]) << 1)]

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())


# compiled primitives


@njit(cache=True)
def _apply_pauli(x, z, q, code):
    x[q] ^= code & 1
    z[q] ^= (code >> 1) & 1


@njit(cache=True)
def _cnot(x, z, c, t):
    x[t] ^= x[c]
    z[c] ^= z[t]


@njit(cache=True)
def _memory(x, z, q, p0, rng):
    u = rng.random()
    if u < p0:
        k = int(u / p0 * 3.0)
        if k > 2:
            k = 2
        _apply_pauli(x, z, q, k + 1)


@njit(cache=True)
def _two_qubit(x, z, c, t, p0, rng):
    u = rng.random()
    if u < p0:
        k = int(u / p0 * 15.0)
        if k > 14:
            k = 14
        k += 1
        _apply_pauli(x, z, c, k & 3)
        _apply_pauli(x, z, t, k >> 2)


@njit(cache=True)
def _flip(p0, rng):
    return rng.random() < p0


# Python API


def _code(p) -> int:
    if isinstance(p, str):
        return PAULI_CODES[p.upper()]
    return int(p)


def apply_pauli(frame: PauliFrame, qubit: int, pauli) -> PauliFrame:
    _apply_pauli(frame.x, frame.z, int(qubit), _code(pauli))
    return frame


def apply_memory_error(frame: PauliFrame, qubit: int, p0: float, rng, forced=None) -> PauliFrame:
    """With probability ``p0`` apply a uniformly chosen X, Y or Z.

    ``forced`` skips sampling and applies the given Pauli directly.
    """
    if forced is not None:
        code = _code(forced)
        if code not in (1, 2, 3):
            raise ValueError("a memory error is X, Y or Z")
        return apply_pauli(frame, qubit, code)
    _memory(frame.x, frame.z, int(qubit), float(p0), as_generator(rng))
    return frame


def apply_two_qubit_error(frame: PauliFrame, control: int, target: int, p0: float, rng, forced=None) -> PauliFrame:
    """With probability ``p0`` apply one of the 15 nontrivial two-qubit Paulis.

    ``forced`` may be a code 1..15 or a pair of Pauli names like ``("X", "I")``.
    """
    if forced is not None:
        if isinstance(forced, (tuple, list)):
            code = _code(forced[0]) | (_code(forced[1]) << 2)
        else:
            code = int(forced)
        if not 1 <= code <= 15:
            raise ValueError("two-qubit error code must be in 1..15")
        apply_pauli(frame, control, code & 3)
        return apply_pauli(frame, target, code >> 2)
    _two_qubit(frame.x, frame.z, int(control), int(target), float(p0), as_generator(rng))
    return frame


def sample_flip(p0: float, rng) -> bool:
    return bool(_flip(float(p0), as_generator(rng)))


def propagate_cnot(frame: PauliFrame, control: int, target: int) -> PauliFrame:
    """Conjugate the frame by a CNOT: X spreads control to target, Z spreads
    target to control."""
    if control == target:
        raise ValueError("control and target must differ")
    _cnot(frame.x, frame.z, int(control), int(target))
    return frame
