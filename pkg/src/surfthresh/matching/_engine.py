"""Dynamic primal-dual blossom solver for minimum-weight perfect matching.

The solver keeps its whole state in one ``int64`` array ``S`` of shape
``(NROWS, 2 * cap)`` plus a dense weight matrix ``W`` of shape ``(cap, cap)``.
Ids ``0 .. cap-1`` are vertices, ``cap .. 2cap-1`` are blossoms.  Weights are
stored doubled so every dual value stays integral.

Vertices can be inserted and deleted between solves.  The matching and the
dual solution survive these edits (a deleted vertex dissolves the blossoms
around it), so re-solving after a small edit costs a few augmentations
rather than a full solve.  This is what makes decoding an ever-growing
space-time history once per round affordable.

Dual bookkeeping: ``POT[v]`` is the sum of the vertex dual and the duals of
every blossom containing ``v``; ``Y[B]`` is the dual of blossom ``B``.  For
two vertices in different top-level nodes the reduced cost is simply
``W[u, v] - POT[u] - POT[v]``.

Each solve grows one alternating tree at a time.  ``BEST[v]`` holds the
smallest reduced cost from ``v`` to any even vertex outside ``v``'s top node,
which gives the dual step in O(n).
"""

import numpy as np
from numba import njit

INF = 1 << 50

(
    MATE, TOP, PARENT, Y, POT, LABEL, LABU, LABV, BBASE, BFIRST, NXT, PRV,
    EX, EY, BLEN, BEST, BESTV, AIDX, ALIST, BPOS, BLIST, BFREE, STK, STK2,
    BUF, MARK, META,
) = range(27)
NROWS = 27

# META columns
M_NA, M_NB, M_NFREE, M_CAP, M_STAMP = 0, 1, 2, 3, 4

EVEN, ODD = 1, 2


@njit(cache=True)
def new_state(cap):
    S = np.zeros((NROWS, 2 * cap), dtype=np.int64)
    S[MATE, :] = -1
    S[PARENT, :] = -1
    S[AIDX, :] = -1
    S[BESTV, :] = -1
    S[LABU, :] = -1
    S[LABV, :] = -1
    for v in range(2 * cap):
        S[TOP, v] = v
    for i in range(cap):
        S[BFREE, i] = 2 * cap - 1 - i
    S[META, M_NFREE] = cap
    S[META, M_CAP] = cap
    W = np.full((cap, cap), INF, dtype=np.int64)
    return S, W


@njit(cache=True)
def grow(S, W, newcap):
    """Copy the state into arrays with room for ``newcap`` vertices."""
    cap = S[META, M_CAP]
    S2, W2 = new_state(newcap)
    W2[:cap, :cap] = W
    shift = newcap - cap
    for r in range(NROWS):
        if r == META or r == BFREE:
            continue
        node_valued = r == TOP or r == PARENT or r == BFIRST or r == NXT or r == PRV or r == BLIST
        for x in range(2 * cap):
            val = S[r, x]
            if node_valued and val >= cap:
                val += shift
            if x < cap:
                S2[r, x] = val
            else:
                S2[r, x + shift] = val
    # Slots past the old vertex capacity keep their fresh defaults.
    for v in range(cap, newcap):
        S2[MATE, v] = -1
        S2[PARENT, v] = -1
        S2[AIDX, v] = -1
        S2[BESTV, v] = -1
        S2[LABU, v] = -1
        S2[LABV, v] = -1
        S2[TOP, v] = v
        S2[Y, v] = 0
        S2[POT, v] = 0
        S2[LABEL, v] = 0
    nb = S[META, M_NB]
    used = np.zeros(2 * newcap, dtype=np.bool_)
    for i in range(nb):
        used[S2[BLIST, i]] = True
    nf = 0
    for x in range(2 * newcap - 1, newcap - 1, -1):
        if not used[x]:
            S2[BFREE, nf] = x
            nf += 1
    S2[META, M_NA] = S[META, M_NA]
    S2[META, M_NB] = nb
    S2[META, M_NFREE] = nf
    S2[META, M_CAP] = newcap
    S2[META, M_STAMP] = S[META, M_STAMP]
    return S2, W2


@njit(cache=True)
def reset(S):
    """Forget every vertex and blossom, keeping the allocation."""
    cap = S[META, M_CAP]
    na = S[META, M_NA]
    for i in range(na):
        v = S[ALIST, i]
        S[AIDX, v] = -1
        S[MATE, v] = -1
        S[TOP, v] = v
        S[PARENT, v] = -1
        S[LABEL, v] = 0
    nb = S[META, M_NB]
    for i in range(nb):
        _free_blossom_slot(S, S[BLIST, nb - 1 - i])
    S[META, M_NA] = 0


@njit(cache=True)
def _base(S, x):
    if x < S[META, M_CAP]:
        return x
    return S[BBASE, x]


@njit(cache=True)
def _leaves(S, x, out):
    """Write the vertices inside node ``x`` to ``S[out, :]``; return count."""
    cap = S[META, M_CAP]
    if x < cap:
        S[out, 0] = x
        return 1
    n = 0
    sp = 0
    S[STK, 0] = x
    sp = 1
    while sp > 0:
        sp -= 1
        b = S[STK, sp]
        c = S[BFIRST, b]
        for _ in range(S[BLEN, b]):
            if c < cap:
                S[out, n] = c
                n += 1
            else:
                S[STK, sp] = c
                sp += 1
            c = S[NXT, c]
    return n


@njit(cache=True)
def _alloc_blossom(S):
    nf = S[META, M_NFREE] - 1
    B = S[BFREE, nf]
    S[META, M_NFREE] = nf
    nb = S[META, M_NB]
    S[BLIST, nb] = B
    S[BPOS, B] = nb
    S[META, M_NB] = nb + 1
    S[Y, B] = 0
    S[PARENT, B] = -1
    S[LABEL, B] = 0
    S[LABU, B] = -1
    S[LABV, B] = -1
    return B


@njit(cache=True)
def _free_blossom_slot(S, B):
    nb = S[META, M_NB] - 1
    pos = S[BPOS, B]
    last = S[BLIST, nb]
    S[BLIST, pos] = last
    S[BPOS, last] = pos
    S[META, M_NB] = nb
    nf = S[META, M_NFREE]
    S[BFREE, nf] = B
    S[META, M_NFREE] = nf + 1
    S[Y, B] = 0
    S[PARENT, B] = -1
    S[LABEL, B] = 0
    S[BLEN, B] = 0


@njit(cache=True)
def _dissolve(S, B, drop_dual):
    """Turn the children of top-level blossom ``B`` into top-level nodes.

    With ``drop_dual`` the blossom's dual is removed from its vertices'
    potentials; a positive dual then makes the base's outside edge non-tight,
    so that edge is unmatched.
    """
    z = S[Y, B]
    if drop_dual and z > 0:
        b = S[BBASE, B]
        m = S[MATE, b]
        if m >= 0:
            S[MATE, b] = -1
            S[MATE, m] = -1
    c = S[BFIRST, B]
    for _ in range(S[BLEN, B]):
        S[PARENT, c] = -1
        S[LABEL, c] = 0
        n = _leaves(S, c, BUF)
        for i in range(n):
            v = S[BUF, i]
            S[TOP, v] = c
            if drop_dual:
                S[POT, v] -= z
        c = S[NXT, c]
    _free_blossom_slot(S, B)


@njit(cache=True)
def insert_vertex(S, W, v):
    """Activate vertex ``v``; row/column ``v`` of ``W`` must already be set.

    Returns False if ``v`` is out of capacity or already present.
    """
    cap = S[META, M_CAP]
    if v < 0 or v >= cap or S[AIDX, v] >= 0:
        return False
    na = S[META, M_NA]
    pot = INF
    for i in range(na):
        u = S[ALIST, i]
        w = W[u, v]
        if w < INF:
            s = w - S[POT, u]
            if s < pot:
                pot = s
    if pot == INF:
        pot = 0
    S[ALIST, na] = v
    S[AIDX, v] = na
    S[META, M_NA] = na + 1
    S[TOP, v] = v
    S[PARENT, v] = -1
    S[MATE, v] = -1
    S[LABEL, v] = 0
    S[POT, v] = pot
    return True


@njit(cache=True)
def delete_vertex(S, v):
    if S[AIDX, v] < 0:
        return False
    while S[TOP, v] != v:
        _dissolve(S, S[TOP, v], True)
    m = S[MATE, v]
    if m >= 0:
        S[MATE, m] = -1
        S[MATE, v] = -1
    na = S[META, M_NA] - 1
    pos = S[AIDX, v]
    last = S[ALIST, na]
    S[ALIST, pos] = last
    S[AIDX, last] = pos
    S[AIDX, v] = -1
    S[META, M_NA] = na
    return True


@njit(cache=True)
def _scan_vertex(S, W, u):
    """``u`` just became even: refresh BEST everywhere against it and
    recompute ``u``'s own BEST from scratch."""
    tu = S[TOP, u]
    pu = S[POT, u]
    na = S[META, M_NA]
    best = INF
    bv = -1
    for i in range(na):
        v = S[ALIST, i]
        tv = S[TOP, v]
        if tv == tu:
            continue
        w = W[u, v]
        if w >= INF:
            continue
        s = w - pu - S[POT, v]
        if s < S[BEST, v]:
            S[BEST, v] = s
            S[BESTV, v] = u
        if S[LABEL, tv] == EVEN and s < best:
            best = s
            bv = v
    S[BEST, u] = best
    S[BESTV, u] = bv


@njit(cache=True)
def _scan_node(S, W, X):
    n = _leaves(S, X, BUF2_ROW)
    for i in range(n):
        _scan_vertex(S, W, S[BUF2_ROW, i])


# Second leaf buffer so node scans never clobber BUF.
BUF2_ROW = STK2


@njit(cache=True)
def _even_parent(S, X):
    """Even tree-parent of even top node ``X``, or -1 for the root."""
    m = S[MATE, _base(S, X)]
    if m < 0:
        return -1
    return S[TOP, S[LABV, S[TOP, m]]]


@njit(cache=True)
def _child_index(S, B, c):
    x = S[BFIRST, B]
    j = 0
    while x != c:
        x = S[NXT, x]
        j += 1
    return j


@njit(cache=True)
def _child_containing(S, B, v):
    t = v
    while S[PARENT, t] != B:
        t = S[PARENT, t]
    return t


@njit(cache=True)
def _add_blossom(S, W, u, v):
    cap = S[META, M_CAP]
    bu = S[TOP, u]
    bv = S[TOP, v]
    # Lowest common even ancestor.
    stamp = S[META, M_STAMP] + 1
    S[META, M_STAMP] = stamp
    x = bu
    while x >= 0:
        S[MARK, x] = stamp
        x = _even_parent(S, x)
    lca = bv
    while S[MARK, lca] != stamp:
        lca = _even_parent(S, lca)

    B = _alloc_blossom(S)
    S[BBASE, B] = _base(S, lca)
    S[LABEL, B] = EVEN

    # Gather the u-side path (bu .. just below lca) into BUF, then link:
    # lca -> reversed(u-path) -> (u,v) -> v-path -> lca.
    nu = 0
    x = bu
    while x != lca:
        S[BUF, nu] = x
        nu += 1
        if S[LABEL, x] == EVEN:
            x = S[TOP, S[MATE, _base(S, x)]]
        else:
            x = S[TOP, S[LABV, x]]

    S[BFIRST, B] = lca
    prev = lca
    count = 1
    # Descend from lca to bu.
    for i in range(nu - 1, -1, -1):
        c = S[BUF, i]
        if S[LABEL, c] == ODD:
            S[EX, prev] = S[LABV, c]
            S[EY, prev] = S[LABU, c]
        else:
            b = _base(S, c)
            S[EX, prev] = S[MATE, b]
            S[EY, prev] = b
        S[NXT, prev] = c
        S[PRV, c] = prev
        prev = c
        count += 1
    # Cross the new edge.
    S[EX, prev] = u
    S[EY, prev] = v
    S[NXT, prev] = bv
    S[PRV, bv] = prev
    prev = bv
    if bv != lca:
        count += 1
        x = bv
        while True:
            if S[LABEL, x] == ODD:
                S[EX, x] = S[LABU, x]
                S[EY, x] = S[LABV, x]
                nx = S[TOP, S[LABV, x]]
            else:
                b = _base(S, x)
                S[EX, x] = b
                S[EY, x] = S[MATE, b]
                nx = S[TOP, S[MATE, b]]
            S[NXT, x] = nx
            S[PRV, nx] = x
            if nx == lca:
                break
            x = nx
            count += 1
    S[BLEN, B] = count

    # Adopt children; odd children's vertices become even and need a scan.
    # Even vertices whose best partner is now internal also need one.
    c = lca
    nscan = 0
    for _ in range(count):
        S[PARENT, c] = B
        was_odd = S[LABEL, c] == ODD
        S[LABEL, c] = 0
        n = _leaves(S, c, BUF)
        for i in range(n):
            w = S[BUF, i]
            S[TOP, w] = B
            if was_odd:
                S[MARK, w] = -stamp
        c = S[NXT, c]
    n = _leaves(S, B, BUF)
    for i in range(n):
        w = S[BUF, i]
        bw = S[BESTV, w]
        if S[MARK, w] == -stamp or (bw >= 0 and S[TOP, bw] == B):
            S[MARK, w] = 0
            S[BUF2_ROW, nscan] = w
            nscan += 1
    # BUF2_ROW is reused by _scan_node, so copy out through the stack row.
    for i in range(nscan):
        S[STK, cap * 2 - 1 - i] = S[BUF2_ROW, i]
    for i in range(nscan):
        _scan_vertex(S, W, S[STK, cap * 2 - 1 - i])


@njit(cache=True)
def _augment_blossom(S, B, v):
    """Rematch inside ``B`` so that vertex ``v`` becomes its base."""
    cap = S[META, M_CAP]
    sp = 0
    S[STK, 0] = B
    S[STK2, 0] = v
    sp = 1
    while sp > 0:
        sp -= 1
        b = S[STK, sp]
        w = S[STK2, sp]
        t = _child_containing(S, b, w)
        if t >= cap:
            S[STK, sp] = t
            S[STK2, sp] = w
            sp += 1
        c0 = S[BFIRST, b]
        j = _child_index(S, b, t)
        forward = (j & 1) == 1
        cur = t
        while cur != c0:
            if forward:
                a = S[NXT, cur]
                a2 = S[NXT, a]
                xa = S[EX, a]
                xb = S[EY, a]
            else:
                a = S[PRV, cur]
                a2 = S[PRV, a]
                xa = S[EY, a2]
                xb = S[EX, a2]
            if a >= cap:
                S[STK, sp] = a
                S[STK2, sp] = xa
                sp += 1
            if a2 >= cap:
                S[STK, sp] = a2
                S[STK2, sp] = xb
                sp += 1
            S[MATE, xa] = xb
            S[MATE, xb] = xa
            cur = a2
        S[BFIRST, b] = t
        S[BBASE, b] = w


@njit(cache=True)
def _augment(S, u, v):
    """Augment along the tree path to even ``u`` plus edge ``(u, v)``, where
    ``v`` lies in a free unlabeled top node."""
    cap = S[META, M_CAP]
    X = S[TOP, v]
    if X >= cap:
        _augment_blossom(S, X, v)
    S[MATE, v] = u
    s = u
    p = v
    while True:
        bs = S[TOP, s]
        t = S[MATE, _base(S, bs)]
        if bs >= cap:
            _augment_blossom(S, bs, s)
        S[MATE, s] = p
        if t < 0:
            break
        bt = S[TOP, t]
        x = S[LABU, bt]
        y = S[LABV, bt]
        if bt >= cap:
            _augment_blossom(S, bt, x)
        S[MATE, x] = y
        s = y
        p = x


@njit(cache=True)
def _expand_odd(S, W, B):
    """Expand an odd top-level blossom whose dual reached zero."""
    cap = S[META, M_CAP]
    u = S[LABU, B]
    vout = S[LABV, B]
    cj = _child_containing(S, B, u)
    j = _child_index(S, B, cj)
    c0 = S[BFIRST, B]
    forward = (j & 1) == 1
    _dissolve(S, B, False)
    # Relabel the even-length path from the entry child to the base child.
    nscan = 0
    cur = cj
    S[LABEL, cur] = ODD
    S[LABU, cur] = u
    S[LABV, cur] = vout
    while cur != c0:
        if forward:
            a = S[NXT, cur]
            a2 = S[NXT, a]
            xa = S[EX, a]
            xb = S[EY, a]
        else:
            a = S[PRV, cur]
            a2 = S[PRV, a]
            xa = S[EY, a2]
            xb = S[EX, a2]
        S[LABEL, a] = EVEN
        S[STK, 2 * cap - 1 - nscan] = a
        nscan += 1
        S[LABEL, a2] = ODD
        S[LABU, a2] = xb
        S[LABV, a2] = xa
        cur = a2
    for i in range(nscan):
        _scan_node(S, W, S[STK, 2 * cap - 1 - i])


@njit(cache=True)
def _phase(S, W, r):
    """Grow an alternating tree from free vertex ``r`` until it augments.

    Returns False if no augmenting path exists.
    """
    cap = S[META, M_CAP]
    na = S[META, M_NA]
    for i in range(na):
        v = S[ALIST, i]
        S[BEST, v] = INF
        S[BESTV, v] = -1
    R = S[TOP, r]
    S[LABEL, R] = EVEN
    S[LABU, R] = -1
    S[LABV, R] = -1
    _scan_node(S, W, R)
    ok = True
    while True:
        d1 = INF
        d1v = -1
        d2 = INF
        d2v = -1
        for i in range(na):
            v = S[ALIST, i]
            lab = S[LABEL, S[TOP, v]]
            bst = S[BEST, v]
            if bst >= INF:
                continue
            if lab == 0:
                if bst < d1:
                    d1 = bst
                    d1v = v
            elif lab == EVEN:
                h = bst >> 1
                if h < d2:
                    d2 = h
                    d2v = v
        d3 = INF
        d3b = -1
        nb = S[META, M_NB]
        for i in range(nb):
            B = S[BLIST, i]
            if S[PARENT, B] < 0 and S[LABEL, B] == ODD and S[Y, B] < d3:
                d3 = S[Y, B]
                d3b = B
        delta = d1
        kind = 1
        if d2 < delta:
            delta = d2
            kind = 2
        if d3 < delta:
            delta = d3
            kind = 3
        if delta >= INF:
            ok = False
            break
        if delta > 0:
            for i in range(na):
                v = S[ALIST, i]
                lab = S[LABEL, S[TOP, v]]
                if lab == EVEN:
                    S[POT, v] += delta
                    if S[BEST, v] < INF:
                        S[BEST, v] -= 2 * delta
                elif lab == ODD:
                    S[POT, v] -= delta
                elif S[BEST, v] < INF:
                    S[BEST, v] -= delta
            for i in range(nb):
                B = S[BLIST, i]
                if S[PARENT, B] < 0:
                    lab = S[LABEL, B]
                    if lab == EVEN:
                        S[Y, B] += delta
                    elif lab == ODD:
                        S[Y, B] -= delta
        if kind == 1:
            v = d1v
            u = S[BESTV, v]
            X = S[TOP, v]
            m = S[MATE, _base(S, X)]
            if m < 0:
                _augment(S, u, v)
                break
            S[LABEL, X] = ODD
            S[LABU, X] = v
            S[LABV, X] = u
            Z = S[TOP, m]
            S[LABEL, Z] = EVEN
            _scan_node(S, W, Z)
        elif kind == 2:
            v = d2v
            if S[BEST, v] & 1:
                # Odd reduced cost between two even vertices of one tree
                # cannot happen with even weights; bail out loudly.
                ok = False
                break
            _add_blossom(S, W, S[BESTV, v], v)
        else:
            _expand_odd(S, W, d3b)
    # Clear labels and dissolve zero-dual top blossoms.
    for i in range(na):
        v = S[ALIST, i]
        S[LABEL, S[TOP, v]] = 0
        S[LABEL, v] = 0
    changed = True
    while changed:
        changed = False
        i = 0
        while i < S[META, M_NB]:
            B = S[BLIST, i]
            S[LABEL, B] = 0
            if S[PARENT, B] < 0 and S[Y, B] == 0:
                _dissolve(S, B, False)
                changed = True
            else:
                i += 1
    return ok


@njit(cache=True)
def solve(S, W):
    """Complete the current matching to a minimum-weight perfect matching.

    Returns 0 on success, -1 if no perfect matching exists.
    """
    while True:
        na = S[META, M_NA]
        r = -1
        for i in range(na):
            v = S[ALIST, i]
            if S[MATE, v] < 0:
                r = v
                break
        if r < 0:
            return 0
        if not _phase(S, W, r):
            return -1


@njit(cache=True)
def matched_weight(S, W):
    """Sum of doubled weights over matched pairs."""
    na = S[META, M_NA]
    tot = 0
    for i in range(na):
        v = S[ALIST, i]
        m = S[MATE, v]
        if m > v:
            tot += W[v, m]
    return tot
