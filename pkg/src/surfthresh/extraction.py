"""Syndrome extraction rounds and detection events.

A circuit-level round takes six time steps:

1. ancilla preparation (init flips) while data qubits idle,
2-5. CNOTs with the north, west, east and south neighbours,
6. ancilla readout (readout flips) while data qubits idle.

Face (Z-type) ancillas are CNOT targets of their data qubits and read out in
the Z basis.  Intersection (X-type) ancillas control CNOTs onto their data
qubits and read out in the X basis.  Any qubit not in a gate during steps
2-5 suffers a memory error; on the torus this never happens, on the planar
code it hits qubits next to the boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .lattice import Lattice, Stab
from .pauli_noise import (
    ErrorModel,
    Extraction,
    PauliFrame,
    _apply_pauli,
    _cnot,
    _memory,
    _two_qubit,
    as_generator,
)

# Whether data qubits that are busy in a CNOT also take a memory error in
# the same time step.  Off: a gate step carries only the gate's own error.
MEMORY_DURING_INTERACTIONS = False

# Fault-injection table columns: round, step (1-6), kind, qubit a, qubit b,
# Pauli code.  Kinds: a single-qubit Pauli on ``a`` at the end of the step,
# a two-qubit Pauli on (a, b), or a flipped readout of ancilla ``a``.
FAULT_PAULI, FAULT_GATE, FAULT_READOUT = 0, 1, 2


class ScheduleConflict(RuntimeError):
    """Two gates of one interaction step touch the same qubit."""


@dataclass(frozen=True, eq=False)
class Schedule:
    n_data: int
    n_z: int
    n_x: int
    gates: np.ndarray  # (4, G, 2) control, target
    n_gates: np.ndarray  # (4,)
    idle: np.ndarray  # (4, I)
    n_idle: np.ndarray  # (4,)
    z_support: np.ndarray  # (n_z, 4), -1 padded
    x_support: np.ndarray  # (n_x, 4)


@lru_cache(maxsize=None)
def _schedule_cached(lattice: Lattice) -> Schedule:
    nd = lattice.n_data
    nz = len(lattice.z_stabilizers)
    nx = len(lattice.x_stabilizers)
    nq = nd + nz + nx
    zsup = np.array([s.nwes for s in lattice.z_stabilizers], dtype=np.int64).reshape(nz, 4)
    xsup = np.array([s.nwes for s in lattice.x_stabilizers], dtype=np.int64).reshape(nx, 4)
    gates = np.full((4, nz + nx, 2), -1, dtype=np.int64)
    ngates = np.zeros(4, dtype=np.int64)
    idle = np.full((4, nq), -1, dtype=np.int64)
    nidle = np.zeros(4, dtype=np.int64)
    for step in range(4):
        busy = np.zeros(nq, dtype=bool)
        pairs = []
        for k in range(nz):
            q = zsup[k, step]
            if q >= 0:
                pairs.append((q, nd + k))
        for k in range(nx):
            q = xsup[k, step]
            if q >= 0:
                pairs.append((nd + nz + k, q))
        for c, t in pairs:
            if busy[c] or busy[t]:
                raise ScheduleConflict(f"qubit used twice in interaction step {step + 2}")
            busy[c] = busy[t] = True
        ngates[step] = len(pairs)
        if pairs:
            gates[step, : len(pairs)] = pairs
        free = np.flatnonzero(~busy)
        nidle[step] = len(free)
        idle[step, : len(free)] = free
    return Schedule(nd, nz, nx, gates, ngates, idle, nidle, zsup, xsup)


def build_schedule(lattice: Lattice) -> Schedule:
    """Interaction schedule of ``lattice``; validated as a partial matching
    on qubits in every step."""
    return _schedule_cached(lattice)


@njit(cache=True)
def _syndrome(bits, support, out):
    for k in range(support.shape[0]):
        par = 0
        for j in range(4):
            q = support[k, j]
            if q >= 0:
                par ^= bits[q]
        out[k] = par


@njit(cache=True)
def _inject(x, z, faults, rnd, step):
    for i in range(faults.shape[0]):
        if faults[i, 0] != rnd or faults[i, 1] != step:
            continue
        kind = faults[i, 2]
        if kind == FAULT_PAULI:
            _apply_pauli(x, z, faults[i, 3], faults[i, 5])
        elif kind == FAULT_GATE:
            code = faults[i, 5]
            _apply_pauli(x, z, faults[i, 3], code & 3)
            _apply_pauli(x, z, faults[i, 4], code >> 2)


@njit(cache=True)
def _circuit_round(x, z, nd, nz, nx, gates, ngates, idle, nidle, p0, rng, faults, rnd, mem_busy, zout, xout):
    """One noisy round on frame bits (x, z); writes reported flips (0/1)."""
    noisy = p0 > 0.0
    za = nd
    xa = nd + nz
    # 1: preparation
    for k in range(nz):
        a = za + k
        x[a] = 0
        z[a] = 0
        if noisy and rng.random() < p0:
            x[a] = 1
    for k in range(nx):
        a = xa + k
        x[a] = 0
        z[a] = 0
        if noisy and rng.random() < p0:
            z[a] = 1
    if noisy:
        for q in range(nd):
            _memory(x, z, q, p0, rng)
    _inject(x, z, faults, rnd, 1)
    # 2-5: interactions
    for s in range(4):
        for g in range(ngates[s]):
            c = gates[s, g, 0]
            t = gates[s, g, 1]
            _cnot(x, z, c, t)
            if noisy:
                _two_qubit(x, z, c, t, p0, rng)
                if mem_busy:
                    if c < nd:
                        _memory(x, z, c, p0, rng)
                    if t < nd:
                        _memory(x, z, t, p0, rng)
        if noisy:
            for i in range(nidle[s]):
                _memory(x, z, idle[s, i], p0, rng)
        _inject(x, z, faults, rnd, s + 2)
    # 6: readout
    for k in range(nz):
        f = x[za + k]
        if noisy and rng.random() < p0:
            f ^= 1
        zout[k] = f
    for k in range(nx):
        f = z[xa + k]
        if noisy and rng.random() < p0:
            f ^= 1
        xout[k] = f
    for i in range(faults.shape[0]):
        if faults[i, 0] == rnd and faults[i, 2] == FAULT_READOUT:
            a = faults[i, 3]
            if a < xa:
                zout[a - za] ^= 1
            else:
                xout[a - xa] ^= 1
    if noisy:
        for q in range(nd):
            _memory(x, z, q, p0, rng)
    _inject(x, z, faults, rnd, 6)
    for a in range(za, xa + nx):
        x[a] = 0
        z[a] = 0


_NO_FAULTS = np.zeros((0, 6), dtype=np.int64)


def _to_eigen(bits: np.ndarray) -> np.ndarray:
    return (1 - 2 * bits.astype(np.int8)).astype(np.int8)


def run_ideal_round(lattice: Lattice, frame: PauliFrame) -> tuple[np.ndarray, np.ndarray]:
    """Noiseless measurement of every stabilizer.

    Returns ``(z_values, x_values)`` as arrays of +1/-1 in stabilizer index
    order.  Faces read the parity of X flips, intersections of Z flips.
    """
    sch = build_schedule(lattice)
    zb = np.zeros(sch.n_z, np.uint8)
    xb = np.zeros(sch.n_x, np.uint8)
    _syndrome(frame.x, sch.z_support, zb)
    _syndrome(frame.z, sch.x_support, xb)
    return _to_eigen(zb), _to_eigen(xb)


def run_circuit_round(
    lattice: Lattice,
    frame: PauliFrame,
    model: ErrorModel,
    rng=None,
    faults: np.ndarray | None = None,
    round_index: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Run one noisy six-step round in place on ``frame``.

    ``faults`` is an optional injection table (see ``FAULT_*``); rows whose
    round column differs from ``round_index`` are ignored.  Returns the
    reported ``(z_values, x_values)`` as +1/-1 arrays.
    """
    if model.extraction is not Extraction.CIRCUIT:
        raise ValueError("run_circuit_round needs a circuit-level error model")
    sch = build_schedule(lattice)
    if len(frame) != sch.n_data + sch.n_z + sch.n_x:
        raise ValueError("frame size does not match the lattice")
    if rng is None:
        if model.p0 > 0:
            raise ValueError("a random generator is required when p0 > 0")
        rng = np.random.Generator(np.random.Philox(0))
    rng = as_generator(rng)
    faults = _NO_FAULTS if faults is None else np.asarray(faults, dtype=np.int64).reshape(-1, 6)
    zb = np.zeros(sch.n_z, np.uint8)
    xb = np.zeros(sch.n_x, np.uint8)
    _circuit_round(
        frame.x, frame.z, sch.n_data, sch.n_z, sch.n_x, sch.gates, sch.n_gates, sch.idle, sch.n_idle,
        model.p0, rng, faults, int(round_index), MEMORY_DURING_INTERACTIONS, zb, xb,
    )
    return _to_eigen(zb), _to_eigen(xb)


@dataclass(frozen=True, order=True)
class DetectionEvent:
    """A change of a stabilizer's reported value between rounds ``t - 1``
    and ``t``.  Ordering is by (t, row, col, kind)."""

    t: int
    row: int
    col: int
    kind: str

    @property
    def stab(self) -> Stab:
        return Stab(self.kind, self.row, self.col)


@dataclass
class SyndromeRecord:
    """Reported eigenvalues per round; round 0 is the all +1 reference."""

    lattice: Lattice
    z_rounds: list = field(default_factory=list)
    x_rounds: list = field(default_factory=list)

    def append(self, z_values, x_values) -> None:
        z_values = np.asarray(z_values, dtype=np.int8)
        x_values = np.asarray(x_values, dtype=np.int8)
        if z_values.shape != (len(self.lattice.z_stabilizers),) or x_values.shape != (
            len(self.lattice.x_stabilizers),
        ):
            raise ValueError("round shape does not match the lattice")
        if not (np.isin(z_values, (-1, 1)).all() and np.isin(x_values, (-1, 1)).all()):
            raise ValueError("eigenvalues must be +1 or -1")
        self.z_rounds.append(z_values.copy())
        self.x_rounds.append(x_values.copy())

    @property
    def n_rounds(self) -> int:
        return len(self.z_rounds)

    def rounds(self, kind: str) -> np.ndarray:
        """Array of shape (n_rounds + 1, n_stabilizers) including round 0."""
        rows = self.z_rounds if kind == "Z" else self.x_rounds
        n = len(self.lattice.stabilizers(kind))
        return np.vstack([np.ones((1, n), np.int8), *[r.reshape(1, n) for r in rows]])

    def copy(self) -> "SyndromeRecord":
        return SyndromeRecord(self.lattice, list(self.z_rounds), list(self.x_rounds))


def collect_detection_events(record: SyndromeRecord, kind: str | None = None) -> list[DetectionEvent]:
    """Every (stabilizer, round) whose value differs from the previous round,
    sorted by (t, row, col)."""
    if record.n_rounds < 1:
        raise ValueError("record has no rounds")
    kinds = ("Z", "X") if kind is None else (kind,)
    out = []
    for k in kinds:
        hist = record.rounds(k)
        stabs = record.lattice.stabilizers(k)
        ts, idx = np.nonzero(hist[1:] != hist[:-1])
        for t, i in zip(ts, idx):
            c = stabs[i].coord
            out.append(DetectionEvent(int(t) + 1, c.row, c.col, k))
    out.sort()
    return out


def dump_syndrome(record: SyndromeRecord) -> str:
    """One line per round: the Z values then the X values, in index order."""
    lines = []
    for t in range(record.n_rounds):
        z = " ".join(f"{v:+d}" for v in record.z_rounds[t])
        x = " ".join(f"{v:+d}" for v in record.x_rounds[t])
        lines.append(f"{t + 1} Z {z} X {x}")
    return "\n".join(lines) + "\n"
