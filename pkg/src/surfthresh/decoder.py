"""Matchings to corrections, and logical failure checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extraction import DetectionEvent, SyndromeRecord, collect_detection_events, run_ideal_round
from .lattice import Lattice, shortest_correction_path
from .matching import FUTURE, BoundaryNode, Matching, build_graph, match_decomposed
from .pauli_noise import ErrorModel, PauliFrame

FAILURE_CLASSES = ("X1", "X2", "Z1", "Z2")


class ConsistencyError(RuntimeError):
    """An internal invariant was violated (a bug, not a bad input)."""


@dataclass(frozen=True)
class Correction:
    x_flips: frozenset = field(default_factory=frozenset)
    z_flips: frozenset = field(default_factory=frozenset)

    def is_empty(self) -> bool:
        return not self.x_flips and not self.z_flips

    def __xor__(self, other: "Correction") -> "Correction":
        return Correction(self.x_flips ^ other.x_flips, self.z_flips ^ other.z_flips)


@dataclass(frozen=True)
class FailureReport:
    classes: frozenset = field(default_factory=frozenset)

    @property
    def failed(self) -> bool:
        return bool(self.classes)


def _pair_path(lattice: Lattice, a, b) -> frozenset:
    if isinstance(a, BoundaryNode) and isinstance(b, BoundaryNode):
        return frozenset()
    if isinstance(a, BoundaryNode):
        a, b = b, a
    if isinstance(b, BoundaryNode):
        if b.owner != a:
            raise ConsistencyError("event matched to another event's boundary node")
        if b.boundary == FUTURE:
            return frozenset()
        return shortest_correction_path(lattice, a.stab, b.boundary)
    if a.stab == b.stab:
        # Same stabilizer at two times: a measurement error, no data flips.
        return frozenset()
    return shortest_correction_path(lattice, a.stab, b.stab)


def matching_to_correction(matching: Matching, lattice: Lattice) -> Correction:
    """XOR together the correction chains of every matched pair.

    Face events call for X corrections, intersection events for Z ones.
    """
    xs: frozenset = frozenset()
    zs: frozenset = frozenset()
    for a, b in matching.pairs:
        real = a if isinstance(a, DetectionEvent) else b if isinstance(b, DetectionEvent) else None
        path = _pair_path(lattice, a, b)
        if not path:
            continue
        if real.kind == "Z":
            xs = xs ^ path
        else:
            zs = zs ^ path
    return Correction(xs, zs)


def _mask(n: int, flips) -> np.ndarray:
    m = np.zeros(n, np.uint8)
    for q in flips:
        m[q] ^= 1
    return m


def residual(frame: PauliFrame, correction: Correction, lattice: Lattice) -> PauliFrame:
    nd = lattice.n_data
    return PauliFrame(frame.x[:nd] ^ _mask(nd, correction.x_flips), frame.z[:nd] ^ _mask(nd, correction.z_flips))


def assess_logical_failure(frame: PauliFrame, correction: Correction, lattice: Lattice) -> FailureReport:
    """Logical classes flipped by the residual ``frame + correction`` on the
    data qubits.  The residual must have a trivial syndrome."""
    res = residual(frame, correction, lattice)
    padded = PauliFrame.zeros(lattice.n_qubits)
    padded.x[: lattice.n_data] = res.x
    padded.z[: lattice.n_data] = res.z
    zv, xv = run_ideal_round(lattice, padded)
    if (zv != 1).any() or (xv != 1).any():
        raise ConsistencyError("residual error has a nontrivial syndrome")
    classes = set()
    for k, chain in enumerate(lattice.logical_z):
        if int(res.x[list(chain)].sum()) & 1:
            classes.add(f"X{k + 1}")
    for k, chain in enumerate(lattice.logical_x):
        if int(res.z[list(chain)].sum()) & 1:
            classes.add(f"Z{k + 1}")
    return FailureReport(frozenset(classes))


def decode_events(events, lattice: Lattice, model: ErrorModel) -> Correction:
    """Match each stabilizer type separately and combine the corrections."""
    corr = Correction()
    last = max((e.t for e in events), default=0)
    for kind in ("Z", "X"):
        ev = [e for e in events if e.kind == kind]
        if not ev:
            continue
        graph = build_graph(ev, lattice, model, last_round=last)
        corr = corr ^ matching_to_correction(match_decomposed(graph), lattice)
    return corr


def decode_ideal(frame: PauliFrame, lattice: Lattice, model: ErrorModel | None = None) -> Correction:
    """Correction for ``frame`` from one noiseless syndrome measurement."""
    model = model or ErrorModel(0.0)
    rec = SyndromeRecord(lattice)
    rec.append(*run_ideal_round(lattice, frame))
    return decode_events(collect_detection_events(rec), lattice, model)
