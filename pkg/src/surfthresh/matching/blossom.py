from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine as E
from .graph import MatchGraph


class NoPerfectMatching(ValueError):
    pass


@dataclass(frozen=True)
class Matching:
    pairs: tuple  # tuples of two node objects
    total_weight: int

    def partner(self, node):
        for a, b in self.pairs:
            if a == node:
                return b
            if b == node:
                return a
        raise KeyError(node)


class BlossomMatcher:
    """Incremental minimum-weight perfect matcher.

    Vertices are added with their weights to the vertices already present
    (``None`` for a missing edge) and may be removed again; ``solve`` then
    repairs the previous optimum instead of starting over.
    """

    def __init__(self, capacity: int = 16):
        self.S, self.W = E.new_state(max(2, int(capacity)))

    @property
    def capacity(self) -> int:
        return int(self.S[E.META, E.M_CAP])

    def vertices(self) -> list[int]:
        na = self.S[E.META, E.M_NA]
        return sorted(int(v) for v in self.S[E.ALIST, :na])

    def _free_slot(self) -> int:
        alive = self.S[E.AIDX, : self.capacity] >= 0
        free = np.flatnonzero(~alive)
        if len(free) == 0:
            self.S, self.W = E.grow(self.S, self.W, 2 * self.capacity)
            return self._free_slot()
        return int(free[0])

    def add_vertex(self, weights: dict[int, int]) -> int:
        v = self._free_slot()
        alive = set(self.vertices())
        self.W[v, :] = E.INF
        self.W[:, v] = E.INF
        for u, w in weights.items():
            if u not in alive:
                raise KeyError(f"vertex {u} is not present")
            if w is None:
                continue
            if w < 0:
                raise ValueError("weights must be nonnegative")
            self.W[u, v] = self.W[v, u] = 2 * int(w)
        E.insert_vertex(self.S, self.W, v)
        return v

    def remove_vertex(self, v: int) -> None:
        if not E.delete_vertex(self.S, int(v)):
            raise KeyError(f"vertex {v} is not present")

    def solve(self) -> None:
        if E.solve(self.S, self.W) != 0:
            raise NoPerfectMatching("graph has no perfect matching")

    def mate(self, v: int) -> int:
        return int(self.S[E.MATE, v])

    def pairs(self) -> list[tuple[int, int]]:
        return [(v, self.mate(v)) for v in self.vertices() if self.mate(v) > v]

    def total_weight(self) -> int:
        return int(E.matched_weight(self.S, self.W)) // 2


def _check_perfect(graph: MatchGraph, pairs) -> None:
    seen = set()
    for i, j in pairs:
        if graph.weight(i, j) is None:
            raise AssertionError(f"matched pair ({i}, {j}) is not an edge")
        seen.update((i, j))
    if len(seen) != len(graph) or 2 * len(pairs) != len(graph):
        raise AssertionError("matching does not cover every node exactly once")


def min_weight_perfect_matching(graph: MatchGraph) -> Matching:
    """Exact minimum-weight perfect matching with the blossom solver.

    Vertices are inserted in node order, so the result is deterministic.
    """
    n = len(graph)
    if n == 0:
        return Matching((), 0)
    if n % 2:
        raise NoPerfectMatching("odd number of nodes")
    S, W = E.new_state(n)
    for (i, j), w in graph.edges.items():
        W[i, j] = W[j, i] = 2 * w
    for v in range(n):
        E.insert_vertex(S, W, v)
    if E.solve(S, W) != 0:
        raise NoPerfectMatching("graph has no perfect matching")
    pairs = [(v, int(S[E.MATE, v])) for v in range(n) if S[E.MATE, v] > v]
    _check_perfect(graph, pairs)
    total = sum(graph.weight(i, j) for i, j in pairs)
    return Matching(tuple((graph.nodes[i], graph.nodes[j]) for i, j in pairs), total)
