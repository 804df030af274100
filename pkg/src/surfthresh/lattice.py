"""Toric and planar surface code geometry.

Everything lives on a doubled-coordinate grid ``(i, j)``:

* Z-stabilizers (faces) sit at ``(2r, 2c + 1)``,
* X-stabilizers (intersections) sit at ``(2r + 1, 2c)``,
* data qubits sit at ``(2r, 2c)`` (orientation 0) and ``(2r + 1, 2c + 1)``
  (orientation 1).

For the toric code the grid is ``2d x 2d`` with periodic wrap on both axes.
The planar code is the ``(2d - 1) x (2d - 1)`` window of the same grid without
wrap: faces are truncated on the top and bottom rows, intersections on the
left and right columns. X-error chains (seen by faces) terminate on the left
and right boundaries; Z-error chains (seen by intersections) on the top and
bottom boundaries.

Data qubits are indexed in row-major order of their doubled coordinates.
Stabilizers of each type are indexed row-major over their own ``(row, col)``
sublattice. Stabilizer supports are stored in north, west, east, south order,
which is also the interaction order of the extraction circuits.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

# Offsets of the four neighbours in extraction order: north, west, east, south.
NWES = ((-1, 0), (0, -1), (0, 1), (1, 0))

# Boundary identifiers, in tie-break order.
LEFT, RIGHT, TOP, BOTTOM = 0, 1, 2, 3
BOUNDARY_NAMES = ("left", "right", "top", "bottom")


class CodeKind(str, enum.Enum):
    TORIC = "toric"
    SURFACE = "surface"


@dataclass(frozen=True)
class CodeSpec:
    kind: CodeKind
    distance: int

    def __post_init__(self):
        object.__setattr__(self, "kind", CodeKind(self.kind))
        d = self.distance
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
            raise ValueError(f"distance must be an integer, got {d!r}")
        if d < 3 or d % 2 == 0:
            raise ValueError(f"distance must be odd and >= 3, got {d}")
        object.__setattr__(self, "distance", int(d))


class Stab(NamedTuple):
    """Address of a stabilizer: its type ('Z' face or 'X' intersection) and
    its (row, col) on the sublattice of that type."""

    kind: str
    row: int
    col: int


@dataclass(frozen=True)
class Stabilizer:
    coord: Stab
    # Data-qubit indices in NWES order; -1 where the neighbour is missing.
    nwes: tuple[int, int, int, int]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(q for q in self.nwes if q >= 0)

    @property
    def weight(self) -> int:
        return sum(q >= 0 for q in self.nwes)


@dataclass(frozen=True, eq=False)
class Lattice:
    spec: CodeSpec
    data_coords: tuple[tuple[int, int], ...]
    z_stabilizers: tuple[Stabilizer, ...]
    x_stabilizers: tuple[Stabilizer, ...]
    # Logical chains are tuples of data-qubit indices.  logical_x[k] pairs
    # with logical_z[k].
    logical_x: tuple[tuple[int, ...], ...]
    logical_z: tuple[tuple[int, ...], ...]
    periodic: tuple[bool, bool]
    _data_at: dict = field(repr=False)
    _stab_index: dict = field(repr=False)

    @property
    def distance(self) -> int:
        return self.spec.distance

    @property
    def kind(self) -> CodeKind:
        return self.spec.kind

    @property
    def n_data(self) -> int:
        return len(self.data_coords)

    @property
    def n_qubits(self) -> int:
        """Data qubits plus one ancilla per stabilizer."""
        return self.n_data + len(self.z_stabilizers) + len(self.x_stabilizers)

    def stabilizers(self, kind: str) -> tuple[Stabilizer, ...]:
        if kind == "Z":
            return self.z_stabilizers
        if kind == "X":
            return self.x_stabilizers
        raise ValueError(f"unknown stabilizer type {kind!r}")

    def shape(self, kind: str) -> tuple[int, int]:
        """Rows and columns of the sublattice holding stabilizers of ``kind``."""
        d = self.distance
        if self.kind is CodeKind.TORIC:
            return d, d
        return (d, d - 1) if kind == "Z" else (d - 1, d)

    def stab_index(self, a: Stab) -> int:
        try:
            return self._stab_index[a]
        except KeyError:
            raise ValueError(f"{a} is not a stabilizer of this lattice") from None

    def data_at(self, i: int, j: int) -> int:
        """Index of the data qubit at doubled coordinate (i, j), or -1."""
        if self.kind is CodeKind.TORIC:
            n = 2 * self.distance
            i %= n
            j %= n
        return self._data_at.get((i, j), -1)

    def ancilla(self, a: Stab) -> int:
        """Frame index of the ancilla measuring stabilizer ``a``."""
        k = self.stab_index(a)
        return self.n_data + k if a.kind == "Z" else self.n_data + len(self.z_stabilizers) + k

    def logical_pairs(self) -> int:
        return len(self.logical_x)


def _doubled(a: Stab) -> tuple[int, int]:
    if a.kind == "Z":
        return 2 * a.row, 2 * a.col + 1
    return 2 * a.row + 1, 2 * a.col


@lru_cache(maxsize=None)
def _build(kind: CodeKind, d: int) -> Lattice:
    toric = kind is CodeKind.TORIC
    n = 2 * d if toric else 2 * d - 1

    data_coords = []
    for i in range(n):
        for j in range(n):
            if (i + j) % 2 == 0:
                data_coords.append((i, j))
    data_at = {c: q for q, c in enumerate(data_coords)}

    def neighbours(i, j):
        out = []
        for di, dj in NWES:
            a, b = i + di, j + dj
            if toric:
                out.append(data_at[(a % n, b % n)])
            else:
                out.append(data_at.get((a, b), -1))
        return tuple(out)

    stab_index = {}
    stabs = {}
    for t in ("Z", "X"):
        if toric:
            rows, cols = d, d
        else:
            rows, cols = (d, d - 1) if t == "Z" else (d - 1, d)
        lst = []
        for r in range(rows):
            for c in range(cols):
                s = Stab(t, r, c)
                stab_index[s] = len(lst)
                lst.append(Stabilizer(s, neighbours(*_doubled(s))))
        stabs[t] = tuple(lst)

    row0 = tuple(data_at[(0, 2 * c)] for c in range(d))
    col0 = tuple(data_at[(2 * r, 0)] for r in range(d))
    if toric:
        logical_x = (row0, tuple(data_at[(2 * r + 1, 1)] for r in range(d)))
        logical_z = (col0, tuple(data_at[(1, 2 * c + 1)] for c in range(d)))
    else:
        logical_x = (row0,)
        logical_z = (col0,)

    return Lattice(
        spec=CodeSpec(kind, d),
        data_coords=tuple(data_coords),
        z_stabilizers=stabs["Z"],
        x_stabilizers=stabs["X"],
        logical_x=logical_x,
        logical_z=logical_z,
        periodic=(toric, toric),
        _data_at=data_at,
        _stab_index=stab_index,
    )


def build_lattice(spec: CodeSpec) -> Lattice:
    """Build (or fetch the cached, immutable) lattice for ``spec``."""
    if not isinstance(spec, CodeSpec):
        raise TypeError("build_lattice expects a CodeSpec")
    return _build(spec.kind, spec.distance)


def _axis_steps(a: int, b: int, size: int, periodic: bool) -> tuple[int, int]:
    """Signed unit step and count to go from a to b along one axis.

    Wraparound is used only when strictly shorter.
    """
    delta = b - a
    if periodic:
        delta %= size
        if delta > size - delta:
            delta -= size
    return (1 if delta > 0 else -1), abs(delta)


def _check_same_type(lattice: Lattice, a: Stab, b: Stab) -> None:
    if a.kind != b.kind:
        raise ValueError(f"stabilizers {a} and {b} are of different types")
    lattice.stab_index(a)
    lattice.stab_index(b)


def chain_distance(lattice: Lattice, a: Stab, b: Stab) -> int:
    """Length of the shortest data-qubit chain with terminals ``a`` and ``b``."""
    _check_same_type(lattice, a, b)
    rows, cols = lattice.shape(a.kind)
    pr, pc = lattice.periodic
    return _axis_steps(a.row, b.row, rows, pr)[1] + _axis_steps(a.col, b.col, cols, pc)[1]


def _require_boundaries(lattice: Lattice) -> None:
    if lattice.kind is not CodeKind.SURFACE:
        raise ValueError("the toric code has no boundaries")


def boundary_distances(lattice: Lattice, a: Stab) -> dict[int, int]:
    """Exit-chain length from ``a`` to each boundary its chains may end on."""
    _require_boundaries(lattice)
    lattice.stab_index(a)
    d = lattice.distance
    if a.kind == "Z":
        return {LEFT: a.col + 1, RIGHT: d - 1 - a.col}
    return {TOP: a.row + 1, BOTTOM: d - 1 - a.row}


def nearest_boundary(lattice: Lattice, a: Stab) -> tuple[int, int]:
    """Closest boundary to ``a`` as ``(boundary id, exit-chain weight)``.

    Face events exit through the left/right boundaries and intersection events
    through the top/bottom ones.  Ties go to the lower boundary id.
    """
    dist = boundary_distances(lattice, a)
    bid = min(dist, key=lambda k: (dist[k], k))
    return bid, dist[bid]


def shortest_correction_path(lattice: Lattice, a: Stab, b: Stab | int | None = None) -> frozenset[int]:
    """A minimum-length chain of data qubits with the given terminals.

    ``b`` is either another stabilizer of the same type, a boundary id, or
    ``None`` for the nearest boundary.  The path walks along the row index
    first (vertical moves), then along the column index, taking the periodic
    wrap only when it is strictly shorter.
    """
    if isinstance(b, Stab):
        _check_same_type(lattice, a, b)
        rows, cols = lattice.shape(a.kind)
        pr, pc = lattice.periodic
        i, j = _doubled(a)
        flips = []
        step, count = _axis_steps(a.row, b.row, rows, pr)
        for _ in range(count):
            flips.append(lattice.data_at(i + step, j))
            i += 2 * step
        step, count = _axis_steps(a.col, b.col, cols, pc)
        for _ in range(count):
            flips.append(lattice.data_at(i, j + step))
            j += 2 * step
        return frozenset(flips)

    dist = boundary_distances(lattice, a)
    bid = nearest_boundary(lattice, a)[0] if b is None else int(b)
    if bid not in dist:
        raise ValueError(f"{a.kind}-type chains do not terminate on the {BOUNDARY_NAMES[bid]} boundary")
    i, j = _doubled(a)
    di, dj = {LEFT: (0, -1), RIGHT: (0, 1), TOP: (-1, 0), BOTTOM: (1, 0)}[bid]
    flips = []
    for _ in range(dist[bid]):
        flips.append(lattice.data_at(i + di, j + dj))
        i += 2 * di
        j += 2 * dj
    assert all(q >= 0 for q in flips)
    return frozenset(flips)


def dump_lattice(lattice: Lattice) -> str:
    """Text dump: one stabilizer support or logical chain per line."""
    lines = [
        f"# code={lattice.kind.value} d={lattice.distance} data={lattice.n_data} "
        f"z_stabilizers={len(lattice.z_stabilizers)} x_stabilizers={len(lattice.x_stabilizers)}"
    ]
    for q, (i, j) in enumerate(lattice.data_coords):
        lines.append(f"D {q} orientation={i % 2} row={i // 2} col={j // 2}")
    for t in ("Z", "X"):
        for k, s in enumerate(lattice.stabilizers(t)):
            nwes = " ".join(str(q) if q >= 0 else "-" for q in s.nwes)
            lines.append(f"{t} {k} ({s.coord.row},{s.coord.col}) {nwes}")
    for name, chains in (("XL", lattice.logical_x), ("ZL", lattice.logical_z)):
        for k, chain in enumerate(chains):
            lines.append(f"{name}{k + 1} " + " ".join(map(str, chain)))
    return "\n".join(lines) + "\n"
