from .blossom import BlossomMatcher, Matching, NoPerfectMatching, min_weight_perfect_matching
from .brute import brute_force_matching
from .graph import (
    FUTURE,
    BoundaryNode,
    MatchGraph,
    build_graph,
    connected_components,
    dump_graph,
    prune_edges,
)


def match_decomposed(graph: MatchGraph) -> Matching:
    """Prune, split into components and match each one separately."""
    pairs = []
    total = 0
    for comp in connected_components(prune_edges(graph)):
        m = min_weight_perfect_matching(comp)
        pairs.extend(m.pairs)
        total += m.total_weight
    return Matching(tuple(pairs), total)


__all__ = [
    "BlossomMatcher",
    "BoundaryNode",
    "FUTURE",
    "MatchGraph",
    "Matching",
    "NoPerfectMatching",
    "brute_force_matching",
    "build_graph",
    "connected_components",
    "dump_graph",
    "match_decomposed",
    "min_weight_perfect_matching",
    "prune_edges",
]
