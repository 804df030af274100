"""Compiled Monte Carlo loops.

Decoding inside the loops never builds explicit correction chains.  For a
pair of stabilizers (or a stabilizer and its boundary) the parity of the
correction path against each logical chain is looked up in a table built
from ``shortest_correction_path``, so deciding failure costs one pass over
the matching.

Failure classes are returned as a bit mask: bit ``k`` is X(k+1), bit
``2 + k`` is Z(k+1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from .extraction import MEMORY_DURING_INTERACTIONS, _circuit_round, _syndrome, build_schedule
from .lattice import CodeKind, Lattice, chain_distance, nearest_boundary, shortest_correction_path
from .matching import _engine as E
from .pauli_noise import _memory

INF = E.INF

# rows of the per-vertex metadata array used by the circuit-level loop
V_STAB, V_TIME, V_TWIN, V_REAL, V_FREE = range(5)


@dataclass(frozen=True, eq=False)
class TypeTables:
    """Everything the loops need to decode one stabilizer type."""

    support: np.ndarray  # (n, 4) data qubits of each stabilizer
    dist: np.ndarray  # (n, n) chain distance
    bdist: np.ndarray  # (n,) exit weight, 0 on the torus
    ppar: np.ndarray  # (K, n, n) correction-path parity against chain k
    bpar: np.ndarray  # (K, n) exit-path parity against chain k
    chains: np.ndarray  # (K, n_data) logical chain masks
    surface: bool


def _parity(path, mask) -> int:
    return int(sum(int(mask[q]) for q in path) & 1)


@lru_cache(maxsize=None)
def type_tables(lattice: Lattice, kind: str) -> TypeTables:
    stabs = [s.coord for s in lattice.stabilizers(kind)]
    n = len(stabs)
    nd = lattice.n_data
    chains_src = lattice.logical_z if kind == "Z" else lattice.logical_x
    K = len(chains_src)
    chains = np.zeros((K, nd), np.uint8)
    for k, ch in enumerate(chains_src):
        chains[k, list(ch)] = 1
    dist = np.zeros((n, n), np.int64)
    ppar = np.zeros((K, n, n), np.uint8)
    for i in range(n):
        for j in range(i + 1, n):
            dist[i, j] = dist[j, i] = chain_distance(lattice, stabs[i], stabs[j])
            path = shortest_correction_path(lattice, stabs[i], stabs[j])
            for k in range(K):
                ppar[k, i, j] = ppar[k, j, i] = _parity(path, chains[k])
    surface = lattice.kind is CodeKind.SURFACE
    bdist = np.zeros(n, np.int64)
    bpar = np.zeros((K, n), np.uint8)
    if surface:
        for i in range(n):
            bid, w = nearest_boundary(lattice, stabs[i])
            bdist[i] = w
            path = shortest_correction_path(lattice, stabs[i], bid)
            for k in range(K):
                bpar[k, i] = _parity(path, chains[k])
    support = np.array([s.nwes for s in lattice.stabilizers(kind)], np.int64).reshape(n, 4)
    return TypeTables(support, dist, bdist, ppar, bpar, chains, surface)


# single-timeslice decoding (ideal extraction)


@njit(cache=True)
def _chain_parity(bits, chains, k):
    par = 0
    for q in range(chains.shape[1]):
        if chains[k, q]:
            par ^= bits[q]
    return par


@njit(cache=True)
def _decode_slice(bits, support, dist, bdist, surface, ppar, bpar, chains, S, W, syn, ev):
    """Decode the syndrome of ``bits`` (data-qubit flips) and return the mask
    of logical chains the residual crosses oddly; -1 if matching fails."""
    n = support.shape[0]
    _syndrome(bits, support, syn)
    m = 0
    for i in range(n):
        if syn[i]:
            ev[m] = i
            m += 1
    K = chains.shape[0]
    corr = np.zeros(K, np.int64)
    if m > 0:
        E.reset(S)
        for a in range(m):
            sa = ev[a]
            for b in range(a + 1, m):
                sb = ev[b]
                w = dist[sa, sb]
                if surface and w >= bdist[sa] + bdist[sb]:
                    w = INF
                else:
                    w *= 2
                W[a, b] = w
                W[b, a] = w
        if surface:
            for a in range(m):
                for b in range(m):
                    W[m + a, b] = INF
                    W[b, m + a] = INF
                    W[m + a, m + b] = 0
                W[a, m + a] = 2 * bdist[ev[a]]
                W[m + a, a] = 2 * bdist[ev[a]]
            tot = 2 * m
        else:
            tot = m
        for v in range(tot):
            E.insert_vertex(S, W, v)
        if E.solve(S, W) != 0:
            return -1
        for a in range(m):
            mt = S[E.MATE, a]
            if mt < m:
                if mt > a:
                    for k in range(K):
                        corr[k] ^= ppar[k, ev[a], ev[mt]]
            else:
                for k in range(K):
                    corr[k] ^= bpar[k, ev[a]]
    mask = 0
    for k in range(K):
        if corr[k] != _chain_parity(bits, chains, k):
            mask |= 1 << k
    return mask


@njit(cache=True)
def ideal_ttf(
    nd, zsup, zdist, zbd, zppar, zbpar, zch, xsup, xdist, xbd, xppar, xbpar, xch,
    surface, p0, max_rounds, x_only, rng,
):
    """Rounds survived under ideal extraction.

    Each round adds fresh memory errors, measures, decodes both types and
    applies the correction.  Returns (failure round or -1 if censored,
    class mask).
    """
    x = np.zeros(nd, np.uint8)
    z = np.zeros(nd, np.uint8)
    nmax = max(zsup.shape[0], xsup.shape[0])
    S, W = E.new_state(2 * nmax + 2)
    syn = np.zeros(nmax, np.uint8)
    ev = np.zeros(nmax, np.int64)
    for t in range(1, max_rounds + 1):
        for q in range(nd):
            _memory(x, z, q, p0, rng)
        mx = _decode_slice(x, zsup, zdist, zbd, surface, zppar, zbpar, zch, S, W, syn, ev)
        mz = 0
        if not x_only:
            mz = _decode_slice(z, xsup, xdist, xbd, surface, xppar, xbpar, xch, S, W, syn, ev)
        if mx < 0 or mz < 0:
            return -2, 0
        mask = mx | (mz << 2)
        if mask:
            return t, mask
        x[:] = 0
        z[:] = 0
    return -1, 0


@njit(cache=True)
def count_failures(configs, nd, zsup, zdist, zbd, zppar, zbpar, zch, surface):
    """Number of bit-flip configurations (rows of data-qubit indices) that
    end in a logical X failure; -1 on a matching failure."""
    n = zsup.shape[0]
    S, W = E.new_state(2 * n + 2)
    syn = np.zeros(n, np.uint8)
    ev = np.zeros(n, np.int64)
    x = np.zeros(nd, np.uint8)
    fails = 0
    for r in range(configs.shape[0]):
        x[:] = 0
        for j in range(configs.shape[1]):
            x[configs[r, j]] ^= 1
        mask = _decode_slice(x, zsup, zdist, zbd, surface, zppar, zbpar, zch, S, W, syn, ev)
        if mask < 0:
            return -1
        if mask:
            fails += 1
    return fails


@njit(cache=True)
def sample_failures(k, samples, nd, zsup, zdist, zbd, zppar, zbpar, zch, surface, rng):
    """Like ``count_failures`` over ``samples`` uniform random k-subsets."""
    n = zsup.shape[0]
    S, W = E.new_state(2 * n + 2)
    syn = np.zeros(n, np.uint8)
    ev = np.zeros(n, np.int64)
    x = np.zeros(nd, np.uint8)
    perm = np.arange(nd)
    fails = 0
    for _ in range(samples):
        x[:] = 0
        for i in range(k):
            j = i + rng.integers(0, nd - i)
            tmp = perm[i]
            perm[i] = perm[j]
            perm[j] = tmp
            x[perm[i]] = 1
        mask = _decode_slice(x, zsup, zdist, zbd, surface, zppar, zbpar, zch, S, W, syn, ev)
        if mask < 0:
            return -1
        if mask:
            fails += 1
    return fails


# space-time decoding with a growing history (circuit-level extraction)


@njit(cache=True)
def _new_meta(cap):
    M = np.zeros((5, cap), np.int64)
    for i in range(cap):
        M[V_FREE, i] = cap - 1 - i
    return M


@njit(cache=True)
def _grow_all(S, W, M, nfree):
    cap = S[E.META, E.M_CAP]
    newcap = 2 * cap
    S2, W2 = E.grow(S, W, newcap)
    M2 = np.zeros((5, newcap), np.int64)
    M2[:, :cap] = M
    # free stack: new ids first out last, so low ids stay preferred
    nf = nfree[0]
    tmp = M[V_FREE, :nf].copy()
    k = 0
    for v in range(newcap - 1, cap - 1, -1):
        M2[V_FREE, k] = v
        k += 1
    for i in range(nf):
        M2[V_FREE, k] = tmp[i]
        k += 1
    nfree[0] = k
    return S2, W2, M2


@njit(cache=True)
def _take_id(M, nfree):
    nfree[0] -= 1
    return M[V_FREE, nfree[0]]


@njit(cache=True)
def _give_id(M, nfree, v):
    M[V_FREE, nfree[0]] = v
    nfree[0] += 1


@njit(cache=True)
def _add_event(S, W, M, nfree, s, t, dist, bdist, surface, tw):
    need = 2 if surface else 1
    if nfree[0] < need:
        S, W, M = _grow_all(S, W, M, nfree)
    v = _take_id(M, nfree)
    M[V_STAB, v] = s
    M[V_TIME, v] = t
    M[V_REAL, v] = 1
    M[V_TWIN, v] = -1
    na = S[E.META, E.M_NA]
    for i in range(na):
        u = S[E.ALIST, i]
        if M[V_REAL, u]:
            su = M[V_STAB, u]
            dt = t - M[V_TIME, u]
            if dt < 0:
                dt = -dt
            w = dist[s, su] + tw * dt
            if surface and w >= bdist[s] + bdist[su]:
                w = INF
            else:
                w *= 2
        else:
            w = INF
        W[u, v] = w
        W[v, u] = w
    E.insert_vertex(S, W, v)
    if surface:
        b = _take_id(M, nfree)
        M[V_REAL, b] = 0
        M[V_TWIN, b] = v
        M[V_TWIN, v] = b
        na = S[E.META, E.M_NA]
        for i in range(na):
            u = S[E.ALIST, i]
            if M[V_REAL, u]:
                w = 2 * bdist[s] if u == v else INF
            else:
                w = 0
            W[u, b] = w
            W[b, u] = w
        E.insert_vertex(S, W, b)
    return S, W, M, v


@njit(cache=True)
def _remove_event(S, M, nfree, v):
    E.delete_vertex(S, v)
    _give_id(M, nfree, v)
    b = M[V_TWIN, v]
    if b >= 0:
        E.delete_vertex(S, b)
        _give_id(M, nfree, b)


@njit(cache=True)
def _history_mask(S, M, ppar, bpar, K):
    corr = np.zeros(K, np.int64)
    na = S[E.META, E.M_NA]
    for i in range(na):
        v = S[E.ALIST, i]
        if not M[V_REAL, v]:
            continue
        m = S[E.MATE, v]
        sv = M[V_STAB, v]
        if M[V_REAL, m]:
            if m > v:
                for k in range(K):
                    corr[k] ^= ppar[k, sv, M[V_STAB, m]]
        else:
            for k in range(K):
                corr[k] ^= bpar[k, sv]
    return corr


@njit(cache=True)
def circuit_ttf(
    nd, nz, nx, gates, ngates, idle, nidle,
    zsup, zdist, zbd, zppar, zbpar, zch, xsup, xdist, xbd, xppar, xbpar, xch,
    surface, p0, tw, max_rounds, x_only, faults, rng,
):
    """Rounds survived under circuit-level extraction.

    After every noisy round the whole history plus one ideal final round is
    decoded (on the side; the simulated frame is never corrected).  The
    matchers keep their state between rounds: the previous round's final
    layer is deleted, the new history layer and final layer are inserted,
    and the optimum is repaired.  Returns (failure round or -1 if censored,
    class mask); -2 signals a matching failure.
    """
    nq = nd + nz + nx
    x = np.zeros(nq, np.uint8)
    z = np.zeros(nq, np.uint8)
    rep = [np.zeros(nz, np.uint8), np.zeros(nx, np.uint8)]
    prev = [np.zeros(nz, np.uint8), np.zeros(nx, np.uint8)]
    ideal = [np.zeros(nz, np.uint8), np.zeros(nx, np.uint8)]
    cap0 = 64
    Sz, Wz = E.new_state(cap0)
    Sx, Wx = E.new_state(cap0)
    Mz = _new_meta(cap0)
    Mx = _new_meta(cap0)
    fz = np.array([cap0], np.int64)
    fx = np.array([cap0], np.int64)
    fin_z = np.zeros(nz, np.int64)
    fin_x = np.zeros(nx, np.int64)
    nfin = np.zeros(2, np.int64)
    ntypes = 1 if x_only else 2
    for t in range(1, max_rounds + 1):
        _circuit_round(x, z, nd, nz, nx, gates, ngates, idle, nidle, p0, rng, faults, t,
                       MEMORY_DURING_INTERACTIONS, rep[0], rep[1])
        _syndrome(x, zsup, ideal[0])
        _syndrome(z, xsup, ideal[1])
        mask = 0
        for ty in range(ntypes):
            if ty == 0:
                S, W, M, nf, fin = Sz, Wz, Mz, fz, fin_z
                dist, bd, ppar, bpar, ch, bits = zdist, zbd, zppar, zbpar, zch, x
            else:
                S, W, M, nf, fin = Sx, Wx, Mx, fx, fin_x
                dist, bd, ppar, bpar, ch, bits = xdist, xbd, xppar, xbpar, xch, z
            for i in range(nfin[ty]):
                _remove_event(S, M, nf, fin[i])
            r = rep[ty]
            pv = prev[ty]
            idl = ideal[ty]
            for s in range(r.shape[0]):
                if r[s] != pv[s]:
                    S, W, M, _v = _add_event(S, W, M, nf, s, t, dist, bd, surface, tw)
                pv[s] = r[s]
            k = 0
            for s in range(r.shape[0]):
                if idl[s] != r[s]:
                    S, W, M, v = _add_event(S, W, M, nf, s, t + 1, dist, bd, surface, tw)
                    fin[k] = v
                    k += 1
            nfin[ty] = k
            if E.solve(S, W) != 0:
                return -2, 0
            K = ch.shape[0]
            corr = _history_mask(S, M, ppar, bpar, K)
            for kk in range(K):
                if corr[kk] != _chain_parity(bits, ch, kk):
                    mask |= 1 << (kk + 2 * ty)
            if ty == 0:
                Sz, Wz, Mz = S, W, M
            else:
                Sx, Wx, Mx = S, W, M
        if mask:
            return t, mask
    return -1, 0


def ideal_args(lattice: Lattice):
    tz = type_tables(lattice, "Z")
    tx = type_tables(lattice, "X")
    return (
        lattice.n_data,
        tz.support, tz.dist, tz.bdist, tz.ppar, tz.bpar, tz.chains,
        tx.support, tx.dist, tx.bdist, tx.ppar, tx.bpar, tx.chains,
        tz.surface,
    )


def circuit_args(lattice: Lattice):
    sch = build_schedule(lattice)
    tz = type_tables(lattice, "Z")
    tx = type_tables(lattice, "X")
    return (
        sch.n_data, sch.n_z, sch.n_x, sch.gates, sch.n_gates, sch.idle, sch.n_idle,
        tz.support, tz.dist, tz.bdist, tz.ppar, tz.bpar, tz.chains,
        tx.support, tx.dist, tx.bdist, tx.ppar, tx.bpar, tx.chains,
        tz.surface,
    )


def counting_args(lattice: Lattice):
    tz = type_tables(lattice, "Z")
    return (lattice.n_data, tz.support, tz.dist, tz.bdist, tz.ppar, tz.bpar, tz.chains, tz.surface)

