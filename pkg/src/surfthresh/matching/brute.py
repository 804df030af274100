from __future__ import annotations

from .blossom import Matching, NoPerfectMatching
from .graph import MatchGraph

MAX_NODES = 12


def brute_force_matching(graph: MatchGraph) -> Matching:
    """Exact optimum by enumerating every perfect matching.

    Only meant as a test oracle: at most 12 nodes, i.e. 10395 matchings.
    """
    n = len(graph)
    if n > MAX_NODES:
        raise ValueError(f"brute force is limited to {MAX_NODES} nodes, got {n}")
    if n == 0:
        return Matching((), 0)
    adj = [[None] * n for _ in range(n)]
    for (i, j), w in graph.edges.items():
        adj[i][j] = adj[j][i] = w

    best_w = None
    best_pairs = None
    pairs: list[tuple[int, int]] = []

    def rec(remaining: int, acc: int):
        nonlocal best_w, best_pairs
        if remaining == 0:
            if best_w is None or acc < best_w:
                best_w = acc
                best_pairs = list(pairs)
            return
        a = (remaining & -remaining).bit_length() - 1
        rest = remaining & ~(1 << a)
        r = rest
        while r:
            b = (r & -r).bit_length() - 1
            r &= r - 1
            w = adj[a][b]
            if w is None:
                continue
            pairs.append((a, b))
            rec(rest & ~(1 << b), acc + w)
            pairs.pop()

    rec((1 << n) - 1, 0)
    if best_w is None:
        raise NoPerfectMatching("graph has no perfect matching")
    return Matching(tuple((graph.nodes[i], graph.nodes[j]) for i, j in best_pairs), best_w)
