from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from surfthresh.extraction import run_ideal_round
from surfthresh.lattice import (
    LEFT,
    RIGHT,
    CodeKind,
    CodeSpec,
    Stab,
    boundary_distances,
    build_lattice,
    chain_distance,
    dump_lattice,
    nearest_boundary,
    shortest_correction_path,
)
from surfthresh.pauli_noise import PauliFrame


def lat(kind, d):
    return build_lattice(CodeSpec(kind, d))


@pytest.mark.parametrize(
    "kind,d,nd,nz,nx,pairs",
    [("toric", 3, 18, 9, 9, 2), ("surface", 3, 13, 6, 6, 1), ("toric", 5, 50, 25, 25, 2), ("surface", 5, 41, 20, 20, 1)],
)
def test_counts(kind, d, nd, nz, nx, pairs):
    L = lat(kind, d)
    assert L.n_data == nd
    assert len(L.z_stabilizers) == nz
    assert len(L.x_stabilizers) == nx
    assert L.logical_pairs() == pairs


@pytest.mark.parametrize("d", [0, 1, 2, 4, -3])
def test_invalid_distance(d):
    with pytest.raises(ValueError):
        CodeSpec("toric", d)


def test_cached_and_immutable():
    assert lat("toric", 3) is lat("toric", 3)
    with pytest.raises(Exception):
        lat("toric", 3).logical_x = ()


@pytest.mark.parametrize("kind", ["toric", "surface"])
@pytest.mark.parametrize("d", [3, 5, 7])
def test_stabilizers_commute(kind, d):
    L = lat(kind, d)
    for s in L.z_stabilizers:
        for t in L.x_stabilizers:
            assert len(s.support & t.support) % 2 == 0


@pytest.mark.parametrize("kind", ["toric", "surface"])
@pytest.mark.parametrize("d", [3, 5, 7])
def test_logical_operators(kind, d):
    L = lat(kind, d)
    for k, xl in enumerate(L.logical_x):
        assert len(xl) == d
        # a logical chain has a trivial syndrome
        f = PauliFrame.zeros(L.n_qubits)
        f.x[list(xl)] = 1
        zv, xv = run_ideal_round(L, f)
        assert (zv == 1).all() and (xv == 1).all()
        for j, zl in enumerate(L.logical_z):
            assert len(set(xl) & set(zl)) % 2 == (1 if j == k else 0)
    for zl in L.logical_z:
        f = PauliFrame.zeros(L.n_qubits)
        f.z[list(zl)] = 1
        zv, xv = run_ideal_round(L, f)
        assert (zv == 1).all() and (xv == 1).all()


def test_stabilizer_weights():
    L = lat("surface", 5)
    w = sorted({s.weight for s in L.z_stabilizers})
    assert w == [3, 4]
    assert all(s.weight == 4 for s in lat("toric", 5).z_stabilizers)


def test_chain_distance_examples():
    L = lat("toric", 5)
    assert chain_distance(L, Stab("Z", 0, 0), Stab("Z", 1, 2)) == 3
    assert chain_distance(L, Stab("Z", 0, 0), Stab("Z", 0, 4)) == 1
    assert chain_distance(L, Stab("Z", 2, 3), Stab("Z", 2, 3)) == 0
    with pytest.raises(ValueError):
        chain_distance(L, Stab("Z", 0, 0), Stab("X", 0, 0))


def _stab_strategy(draw_kind=st.sampled_from(["toric", "surface"])):
    @st.composite
    def strat(draw):
        kind = draw(draw_kind)
        d = draw(st.sampled_from([3, 5, 7]))
        t = draw(st.sampled_from(["Z", "X"]))
        L = lat(kind, d)
        stabs = L.stabilizers(t)
        a, b, c = (stabs[draw(st.integers(0, len(stabs) - 1))].coord for _ in range(3))
        return L, a, b, c

    return strat()


@settings(max_examples=200, deadline=None)
@given(_stab_strategy())
def test_chain_distance_is_a_metric(args):
    L, a, b, c = args
    assert chain_distance(L, a, a) == 0
    assert chain_distance(L, a, b) == chain_distance(L, b, a)
    assert chain_distance(L, a, c) <= chain_distance(L, a, b) + chain_distance(L, b, c)


def _event_graph(L, kind):
    """Data qubit -> stabilizers of ``kind`` it touches.  A qubit touching
    only one stabilizer lies on a boundary."""
    owners = {}
    for s in L.stabilizers(kind):
        for q in s.support:
            owners.setdefault(q, []).append(s.coord)
    return owners


def _bfs_boundary(L, a):
    owners = _event_graph(L, a.kind)
    seen = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for q, ss in owners.items():
            if u not in ss:
                continue
            if len(ss) == 1:
                return seen[u] + 1
            v = ss[0] if ss[1] == u else ss[1]
            if v not in seen:
                seen[v] = seen[u] + 1
                queue.append(v)
    raise AssertionError("no boundary reachable")


def _bfs_pair(L, a, b):
    owners = _event_graph(L, a.kind)
    seen = {a: 0}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            return seen[u]
        for ss in owners.values():
            if u in ss and len(ss) == 2:
                v = ss[0] if ss[1] == u else ss[1]
                if v not in seen:
                    seen[v] = seen[u] + 1
                    queue.append(v)
    raise AssertionError("unreachable")


@pytest.mark.parametrize("d", [3, 5, 7])
@pytest.mark.parametrize("kind", ["Z", "X"])
def test_nearest_boundary_matches_bfs(d, kind):
    L = lat("surface", d)
    for s in L.stabilizers(kind):
        assert nearest_boundary(L, s.coord)[1] == _bfs_boundary(L, s.coord)


@pytest.mark.parametrize("kind,d", [("toric", 5), ("surface", 5)])
def test_chain_distance_matches_bfs(kind, d):
    L = lat(kind, d)
    stabs = [s.coord for s in L.z_stabilizers]
    for a in stabs[::3]:
        for b in stabs:
            assert chain_distance(L, a, b) == _bfs_pair(L, a, b)


def test_boundary_examples():
    L = lat("surface", 5)
    assert nearest_boundary(L, Stab("Z", 2, 0)) == (LEFT, 1)
    assert nearest_boundary(L, Stab("Z", 2, 3)) == (RIGHT, 1)
    # central face of d=5: two columns to either side, tie to the lower id
    assert nearest_boundary(L, Stab("Z", 2, 1)) == (LEFT, 2)
    assert boundary_distances(L, Stab("Z", 2, 1)) == {LEFT: 2, RIGHT: 3}
    assert nearest_boundary(lat("surface", 3), Stab("Z", 0, 0))[1] == 1
    with pytest.raises(ValueError):
        nearest_boundary(lat("toric", 5), Stab("Z", 0, 0))


def _syndrome_of(L, flips, kind):
    f = PauliFrame.zeros(L.n_qubits)
    arr = f.x if kind == "Z" else f.z
    for q in flips:
        arr[q] ^= 1
    zv, xv = run_ideal_round(L, f)
    vals = zv if kind == "Z" else xv
    return {L.stabilizers(kind)[i].coord for i in np.flatnonzero(vals == -1)}


def test_path_examples():
    L = lat("toric", 5)
    a, b = Stab("Z", 0, 0), Stab("Z", 0, 2)
    p = shortest_correction_path(L, a, b)
    assert p == {L.data_at(0, 2), L.data_at(0, 4)}
    a, b = Stab("Z", 0, 0), Stab("Z", 2, 2)
    p = shortest_correction_path(L, a, b)
    assert len(p) == 4 == chain_distance(L, a, b)
    assert _syndrome_of(L, p, "Z") == {a, b}
    S = lat("surface", 5)
    p = shortest_correction_path(S, Stab("Z", 1, 0))
    assert p == {S.data_at(2, 0)}


@settings(max_examples=200, deadline=None)
@given(_stab_strategy())
def test_path_has_the_right_terminals(args):
    L, a, b, _ = args
    p = shortest_correction_path(L, a, b)
    assert len(p) == chain_distance(L, a, b)
    assert _syndrome_of(L, p, a.kind) == ({a, b} if a != b else set())
    if L.kind is CodeKind.SURFACE:
        for bid, w in boundary_distances(L, a).items():
            e = shortest_correction_path(L, a, bid)
            assert len(e) == w
            assert _syndrome_of(L, e, a.kind) == {a}


def test_dump_lattice():
    text = dump_lattice(lat("surface", 3))
    assert text.startswith("# code=surface d=3 data=13")
    assert text.count("\nZ ") == 6 and text.count("\nX ") == 6
