"""Detection-event graphs for matching.

A ``MatchGraph`` is a plain weighted graph over an ordered tuple of nodes.
Real nodes are detection events; on the planar code every real node also
gets its own boundary node, connected to it at its exit-chain weight, and
all boundary nodes are joined to each other at weight 0.  Any node objects
work, which is what the random-graph tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable

from ..extraction import DetectionEvent
from ..lattice import BOUNDARY_NAMES, CodeKind, Lattice, boundary_distances, chain_distance
from ..pauli_noise import ErrorModel

FUTURE = 4  # boundary id of the time-like boundary after the last round


@dataclass(frozen=True)
class BoundaryNode:
    owner: Hashable
    boundary: int
    weight: int

    def __repr__(self):
        name = BOUNDARY_NAMES[self.boundary] if self.boundary < len(BOUNDARY_NAMES) else "future"
        return f"BoundaryNode({self.owner!r}, {name}, {self.weight})"


@dataclass(frozen=True, eq=False)
class MatchGraph:
    nodes: tuple
    edges: dict  # (i, j) with i < j -> nonnegative int weight

    def __post_init__(self):
        n = len(self.nodes)
        clean = {}
        for (i, j), w in self.edges.items():
            if i == j or not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"bad edge ({i}, {j})")
            w = int(w)
            if w < 0:
                raise ValueError("edge weights must be nonnegative")
            clean[(min(i, j), max(i, j))] = w
        object.__setattr__(self, "edges", clean)

    def __len__(self):
        return len(self.nodes)

    def is_boundary(self, i: int) -> bool:
        return isinstance(self.nodes[i], BoundaryNode)

    @property
    def real_indices(self) -> list[int]:
        return [i for i in range(len(self.nodes)) if not self.is_boundary(i)]

    @property
    def boundary_indices(self) -> list[int]:
        return [i for i in range(len(self.nodes)) if self.is_boundary(i)]

    def weight(self, i: int, j: int):
        return self.edges.get((min(i, j), max(i, j)))

    def twin(self, i: int) -> int | None:
        """Index of the boundary node owned by real node ``i``."""
        owner = self.nodes[i]
        for k in self.boundary_indices:
            if self.nodes[k].owner == owner:
                return k
        return None

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, int]]) -> "MatchGraph":
        return cls(tuple(range(n)), {(u, v): w for u, v, w in edges})


def _event_key(e: DetectionEvent):
    return (e.t, e.row, e.col)


def build_graph(
    events: Iterable[DetectionEvent],
    lattice: Lattice,
    model: ErrorModel,
    last_round: int | None = None,
) -> MatchGraph:
    """Complete weighted graph over ``events`` plus boundary nodes.

    Real-real weights are the spatial chain distance plus
    ``time_edge_weight * |dt|``.  With ``model.time_boundaries`` each event
    may also exit through the time boundary after ``last_round`` (default:
    the latest event round).
    """
    events = sorted(events, key=_event_key)
    kinds = {e.kind for e in events}
    if len(kinds) > 1:
        raise ValueError("events must all be of one stabilizer type")
    if len(set(events)) != len(events):
        raise ValueError("duplicate detection events")
    tw = model.time_edge_weight
    surface = lattice.kind is CodeKind.SURFACE
    if not surface and not model.time_boundaries and len(events) % 2:
        raise ValueError("toric graphs need an even number of detection events")
    if last_round is None:
        last_round = max((e.t for e in events), default=0)

    nodes: list = list(events)
    edges = {}
    n = len(events)
    for i in range(n):
        for j in range(i + 1, n):
            a, b = events[i], events[j]
            edges[(i, j)] = chain_distance(lattice, a.stab, b.stab) + tw * abs(a.t - b.t)
    if surface or model.time_boundaries:
        for i, e in enumerate(events):
            options = []
            if surface:
                dist = boundary_distances(lattice, e.stab)
                options.extend((w, bid) for bid, w in dist.items())
            if model.time_boundaries:
                options.append((tw * (last_round + 1 - e.t), FUTURE))
            w, bid = min(options)
            nodes.append(BoundaryNode(e, bid, w))
            edges[(i, n + i)] = w
        for i in range(n, 2 * n):
            for j in range(i + 1, 2 * n):
                edges[(i, j)] = 0
    return MatchGraph(tuple(nodes), edges)


def _boundary_weights(graph: MatchGraph) -> dict[int, int]:
    out = {}
    for k in graph.boundary_indices:
        owner = graph.nodes[k].owner
        for i in graph.real_indices:
            if graph.nodes[i] == owner:
                out[i] = graph.nodes[k].weight
                break
    return out


def prune_edges(graph: MatchGraph) -> MatchGraph:
    """Drop real-real edges of weight >= a + b, where a and b are the
    endpoints' boundary weights.  Matching both endpoints to their
    boundaries is never worse, so the optimum weight is unchanged."""
    bw = _boundary_weights(graph)
    if not bw:
        return graph
    keep = {}
    for (i, j), w in graph.edges.items():
        if i in bw and j in bw and w >= bw[i] + bw[j]:
            continue
        keep[(i, j)] = w
    return MatchGraph(graph.nodes, keep)


def _subgraph(graph: MatchGraph, idx: list[int]) -> MatchGraph:
    pos = {v: k for k, v in enumerate(idx)}
    edges = {(pos[i], pos[j]): w for (i, j), w in graph.edges.items() if i in pos and j in pos}
    return MatchGraph(tuple(graph.nodes[i] for i in idx), edges)


def connected_components(graph: MatchGraph) -> list[MatchGraph]:
    """Split by real-real connectivity; each part keeps its real nodes'
    boundary nodes (joined among themselves at weight 0)."""
    real = graph.real_indices
    if not real:
        return []
    parent = {i: i for i in real}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, j in graph.edges:
        if i in parent and j in parent:
            ra, rb = find(i), find(j)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    twins = {}
    for k in graph.boundary_indices:
        twins[graph.nodes[k].owner] = k
    groups: dict[int, list[int]] = {}
    for i in real:
        groups.setdefault(find(i), []).append(i)
    out = []
    for root in sorted(groups):
        members = groups[root]
        idx = members + [twins[graph.nodes[i]] for i in members if graph.nodes[i] in twins]
        out.append(_subgraph(graph, idx))
    return out


def dump_graph(graph: MatchGraph) -> str:
    """One node per ``n`` line (``b`` marks boundary nodes), then one edge
    per ``u v w`` line."""
    lines = [f"# nodes={len(graph)} edges={len(graph.edges)}"]
    for i, node in enumerate(graph.nodes):
        if isinstance(node, BoundaryNode):
            lines.append(f"n {i} b boundary={node.boundary}")
        elif isinstance(node, DetectionEvent):
            lines.append(f"n {i} r {node.kind} {node.row} {node.col} {node.t}")
        else:
            lines.append(f"n {i} r {node!r}")
    for (i, j), w in sorted(graph.edges.items()):
        lines.append(f"{i} {j} {w}")
    return "\n".join(lines) + "\n"
