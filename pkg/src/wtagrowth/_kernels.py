"""Integer-array kernels behind the structural analyses.

Automata reach this module as flat int64 tables (see ``automaton.Tables``):

* transitions ``t`` with ``tr_letter[t]``, ``tr_target[t]`` and children
  ``tr_child[tr_off[t]:tr_off[t + 1]]``;
* "slots" ``s`` = (letter, child position) for every letter of positive rank,
  and the index ``pi_tr[pi_off[s * n + p]:pi_off[s * n + p + 1]]`` of
  transitions whose child at that position is state ``p``;
* rank-0 transitions grouped per letter in ``leaf_tr``/``leaf_off``;
* per-state child occurrences ``occ_tr``/``occ_off`` for Horn counters.

A k-fold product state ``(p_0, ..., p_{k-1})`` is the integer
``sum(p_j * n ** (k - 1 - j))``; product transitions are never materialised.
"""

import numpy as np

from ._jit import njit

# degree fixed point status codes
DEG_OK = 0
DEG_DIVERGED = 1
DEG_OVERFLOW = 2
_DEG_LIMIT = 1 << 61


@njit
def horn_accessible(n, tr_off, tr_child, tr_target, occ_off, occ_tr):
    """Minimal model of the Horn clauses ``q_1 & ... & q_m -> q``."""
    ntr = tr_target.shape[0]
    missing = np.empty(ntr, np.int64)
    acc = np.zeros(n, np.uint8)
    stack = np.empty(n, np.int64)
    sp = 0
    for t in range(ntr):
        missing[t] = tr_off[t + 1] - tr_off[t]
        if missing[t] == 0 and acc[tr_target[t]] == 0:
            acc[tr_target[t]] = 1
            stack[sp] = tr_target[t]
            sp += 1
    while sp > 0:
        sp -= 1
        p = stack[sp]
        for e in range(occ_off[p], occ_off[p + 1]):
            t = occ_tr[e]
            missing[t] -= 1
            if missing[t] == 0:
                q = tr_target[t]
                if acc[q] == 0:
                    acc[q] = 1
                    stack[sp] = q
                    sp += 1
    return acc


@njit
def shallow_edges(tr_off, tr_child, tr_target, acc, fill, out_src, out_dst, out_tr, out_pos):
    """Edges child -> target of the shallow digraph, with provenance.

    A transition contributes all its child edges when every child is
    accessible, only the edge of its single inaccessible child otherwise, and
    nothing when two or more children are inaccessible.
    """
    ntr = tr_target.shape[0]
    m = 0
    for t in range(ntr):
        bad = 0
        bad_pos = -1
        for e in range(tr_off[t], tr_off[t + 1]):
            if acc[tr_child[e]] == 0:
                bad += 1
                bad_pos = e - tr_off[t]
        if bad == 0:
            for e in range(tr_off[t], tr_off[t + 1]):
                if fill:
                    out_src[m] = tr_child[e]
                    out_dst[m] = tr_target[t]
                    out_tr[m] = t
                    out_pos[m] = e - tr_off[t]
                m += 1
        elif bad == 1:
            if fill:
                out_src[m] = tr_child[tr_off[t] + bad_pos]
                out_dst[m] = tr_target[t]
                out_tr[m] = t
                out_pos[m] = bad_pos
            m += 1
    return m


@njit
def tarjan(nv, off, dst):
    """Iterative Tarjan.  Components are numbered sinks first, i.e. in
    reverse topological order of the condensation."""
    index = np.full(nv, -1, np.int64)
    low = np.zeros(nv, np.int64)
    onstack = np.zeros(nv, np.uint8)
    comp = np.full(nv, -1, np.int64)
    stack = np.empty(nv, np.int64)
    call_v = np.empty(nv, np.int64)
    call_e = np.empty(nv, np.int64)
    sp = 0
    counter = 0
    ncomp = 0
    for root in range(nv):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack[sp] = root
        sp += 1
        onstack[root] = 1
        call_v[0] = root
        call_e[0] = off[root]
        csp = 1
        while csp > 0:
            v = call_v[csp - 1]
            e = call_e[csp - 1]
            if e < off[v + 1]:
                call_e[csp - 1] = e + 1
                w = dst[e]
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack[sp] = w
                    sp += 1
                    onstack[w] = 1
                    call_v[csp] = w
                    call_e[csp] = off[w]
                    csp += 1
                elif onstack[w] == 1 and index[w] < low[v]:
                    low[v] = index[w]
            else:
                csp -= 1
                if low[v] == index[v]:
                    while True:
                        sp -= 1
                        w = stack[sp]
                        onstack[w] = 0
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
                if csp > 0:
                    u = call_v[csp - 1]
                    if low[v] < low[u]:
                        low[u] = low[v]
    return comp, ncomp


@njit
def comp_reach(ncomp, csrc, cdst):
    """Reachability between components numbered in reverse topological order."""
    reach = np.zeros((ncomp, ncomp), np.uint8)
    order = np.argsort(csrc, kind="mergesort")
    off = np.zeros(ncomp + 1, np.int64)
    for e in range(csrc.shape[0]):
        off[csrc[e] + 1] += 1
    for c in range(ncomp):
        off[c + 1] += off[c]
    for c in range(ncomp):
        reach[c, c] = 1
        for k in range(off[c], off[c + 1]):
            d = cdst[order[k]]
            if d != c:
                for x in range(ncomp):
                    if reach[d, x]:
                        reach[c, x] = 1
    return reach


@njit
def _decode(x, n, k, out):
    for j in range(k - 1, -1, -1):
        out[j] = x % n
        x //= n


@njit
def tuple_accessible(k, n, rank, slot_letter, slot_pos, pi_off, pi_tr,
                     leaf_off, leaf_tr, tr_off, tr_child, tr_target):
    """Accessible states of the k-fold product, by lazy saturation.

    A product transition fires when the child tuple popped last finds all
    its siblings already marked; no per-product-transition counters exist.
    """
    nv = n ** k
    acc = np.zeros(nv, np.uint8)
    queue = np.empty(nv, np.int64)
    qh = 0
    qt = 0
    lo = np.zeros(k, np.int64)
    hi = np.zeros(k, np.int64)
    idx = np.zeros(k, np.int64)
    p = np.zeros(k, np.int64)
    nletters = rank.shape[0]
    for a in range(nletters):
        if rank[a] != 0 or leaf_off[a] == leaf_off[a + 1]:
            continue
        for j in range(k):
            lo[j] = leaf_off[a]
            hi[j] = leaf_off[a + 1]
            idx[j] = lo[j]
        while True:
            tgt = 0
            for j in range(k):
                tgt = tgt * n + tr_target[leaf_tr[idx[j]]]
            if acc[tgt] == 0:
                acc[tgt] = 1
                queue[qt] = tgt
                qt += 1
            j = k - 1
            while j >= 0:
                idx[j] += 1
                if idx[j] < hi[j]:
                    break
                idx[j] = lo[j]
                j -= 1
            if j < 0:
                break
    nslots = slot_letter.shape[0]
    while qh < qt:
        x = queue[qh]
        qh += 1
        _decode(x, n, k, p)
        for s in range(nslots):
            r = rank[slot_letter[s]]
            pos = slot_pos[s]
            empty = False
            for j in range(k):
                lo[j] = pi_off[s * n + p[j]]
                hi[j] = pi_off[s * n + p[j] + 1]
                idx[j] = lo[j]
                if lo[j] == hi[j]:
                    empty = True
            if empty:
                continue
            while True:
                ok = True
                for pp in range(r):
                    if pp == pos:
                        continue
                    c = 0
                    for j in range(k):
                        t = pi_tr[idx[j]]
                        c = c * n + tr_child[tr_off[t] + pp]
                    if acc[c] == 0:
                        ok = False
                        break
                if ok:
                    tgt = 0
                    for j in range(k):
                        tgt = tgt * n + tr_target[pi_tr[idx[j]]]
                    if acc[tgt] == 0:
                        acc[tgt] = 1
                        queue[qt] = tgt
                        qt += 1
                j = k - 1
                while j >= 0:
                    idx[j] += 1
                    if idx[j] < hi[j]:
                        break
                    idx[j] = lo[j]
                    j -= 1
                if j < 0:
                    break
    return acc


@njit
def tuple_edges(k, n, rank, slot_letter, slot_pos, pi_off, pi_tr, tr_off, tr_child,
                tr_target, acc, keep, comp, fixed, fill, out_src, out_dst, out_flag):
    """Shallow-digraph edges of the k-fold product between kept vertices.

    An edge child -> target is produced when every sibling tuple is
    accessible.  Coordinates ``j`` with ``fixed[j]`` must stay inside the
    same component of ``comp`` (the base automaton's SCCs).  ``out_flag`` is
    1 when the k transitions are not all the same transition.
    Returns the number of edges; arrays are written only when ``fill``.
    """
    nv = keep.shape[0]
    lo = np.zeros(k, np.int64)
    hi = np.zeros(k, np.int64)
    idx = np.zeros(k, np.int64)
    p = np.zeros(k, np.int64)
    nslots = slot_letter.shape[0]
    m = 0
    for x in range(nv):
        if keep[x] == 0:
            continue
        _decode(x, n, k, p)
        for s in range(nslots):
            r = rank[slot_letter[s]]
            pos = slot_pos[s]
            empty = False
            for j in range(k):
                lo[j] = pi_off[s * n + p[j]]
                hi[j] = pi_off[s * n + p[j] + 1]
                idx[j] = lo[j]
                if lo[j] == hi[j]:
                    empty = True
            if empty:
                continue
            while True:
                ok = True
                for j in range(k):
                    if fixed[j] and comp[tr_target[pi_tr[idx[j]]]] != comp[p[j]]:
                        ok = False
                        break
                if ok:
                    for pp in range(r):
                        if pp == pos:
                            continue
                        c = 0
                        for j in range(k):
                            t = pi_tr[idx[j]]
                            c = c * n + tr_child[tr_off[t] + pp]
                        if acc[c] == 0:
                            ok = False
                            break
                if ok:
                    tgt = 0
                    for j in range(k):
                        tgt = tgt * n + tr_target[pi_tr[idx[j]]]
                    if keep[tgt]:
                        if fill:
                            distinct = 0
                            for j in range(1, k):
                                if pi_tr[idx[j]] != pi_tr[idx[0]]:
                                    distinct = 1
                            out_src[m] = x
                            out_dst[m] = tgt
                            out_flag[m] = distinct
                        m += 1
                j = k - 1
                while j >= 0:
                    idx[j] += 1
                    if idx[j] < hi[j]:
                        break
                    idx[j] = lo[j]
                    j -= 1
                if j < 0:
                    break
    return m


@njit
def seidl_ambiguous(n, rank, slot_letter, slot_pos, pi_off, pi_tr, leaf_off, leaf_tr,
                    tr_off, tr_child, tr_target):
    """Accessibility in the product-like automaton with states ``(q, q')``
    (ids ``q * n + q'``) and ``(q, #)`` (ids ``n * n + q``).

    ``(q, q')`` is accessible iff one tree has a run to ``q`` and one to
    ``q'``; ``(q, #)`` iff some tree has two distinct runs to ``q``.  Rules:
    two distinct transitions into the same ``q`` over pair-accessible
    children give ``(q, #)``; one transition with a single ``#`` child and
    diagonal pairs elsewhere propagates ``#`` to its target.
    """
    nn = n * n
    nv = nn + n
    acc = np.zeros(nv, np.uint8)
    queue = np.empty(nv, np.int64)
    qh = 0
    qt = 0
    nletters = rank.shape[0]
    for a in range(nletters):
        if rank[a] != 0:
            continue
        for e1 in range(leaf_off[a], leaf_off[a + 1]):
            t1 = leaf_tr[e1]
            for e2 in range(leaf_off[a], leaf_off[a + 1]):
                t2 = leaf_tr[e2]
                tgt = tr_target[t1] * n + tr_target[t2]
                if acc[tgt] == 0:
                    acc[tgt] = 1
                    queue[qt] = tgt
                    qt += 1
                if t1 != t2 and tr_target[t1] == tr_target[t2]:
                    h = nn + tr_target[t1]
                    if acc[h] == 0:
                        acc[h] = 1
                        queue[qt] = h
                        qt += 1
    nslots = slot_letter.shape[0]
    while qh < qt:
        x = queue[qh]
        qh += 1
        if x < nn:
            p0 = x // n
            p1 = x % n
            for s in range(nslots):
                r = rank[slot_letter[s]]
                pos = slot_pos[s]
                for e1 in range(pi_off[s * n + p0], pi_off[s * n + p0 + 1]):
                    t1 = pi_tr[e1]
                    for e2 in range(pi_off[s * n + p1], pi_off[s * n + p1 + 1]):
                        t2 = pi_tr[e2]
                        ok = True
                        for pp in range(r):
                            if pp != pos:
                                c = tr_child[tr_off[t1] + pp] * n + tr_child[tr_off[t2] + pp]
                                if acc[c] == 0:
                                    ok = False
                                    break
                        if not ok:
                            continue
                        tgt = tr_target[t1] * n + tr_target[t2]
                        if acc[tgt] == 0:
                            acc[tgt] = 1
                            queue[qt] = tgt
                            qt += 1
                        if t1 != t2 and tr_target[t1] == tr_target[t2]:
                            h = nn + tr_target[t1]
                            if acc[h] == 0:
                                acc[h] = 1
                                queue[qt] = h
                                qt += 1
                if p0 == p1:
                    # diagonal child at pos, some other position carries '#'
                    for e1 in range(pi_off[s * n + p0], pi_off[s * n + p0 + 1]):
                        t = pi_tr[e1]
                        h = nn + tr_target[t]
                        if acc[h] == 1:
                            continue
                        for hp in range(r):
                            if hp == pos or acc[nn + tr_child[tr_off[t] + hp]] == 0:
                                continue
                            ok = True
                            for pp in range(r):
                                if pp != pos and pp != hp:
                                    c = tr_child[tr_off[t] + pp]
                                    if acc[c * n + c] == 0:
                                        ok = False
                                        break
                            if ok:
                                acc[h] = 1
                                queue[qt] = h
                                qt += 1
                                break
        else:
            q = x - nn
            for s in range(nslots):
                r = rank[slot_letter[s]]
                pos = slot_pos[s]
                for e1 in range(pi_off[s * n + q], pi_off[s * n + q + 1]):
                    t = pi_tr[e1]
                    h = nn + tr_target[t]
                    if acc[h] == 1:
                        continue
                    ok = True
                    for pp in range(r):
                        if pp != pos:
                            c = tr_child[tr_off[t] + pp]
                            if acc[c * n + c] == 0:
                                ok = False
                                break
                    if ok:
                        acc[h] = 1
                        queue[qt] = h
                        qt += 1
    return acc


@njit
def degree_fixpoint(n, tr_off, tr_child, tr_target, bb_src, bb_dst, max_rounds):
    """Jacobi iteration of the degree operator from the zero map.

    Returns ``(deg, settled_round, rounds, status)``; ``rounds`` counts every
    application of the operator including the final one that changes nothing.
    """
    f = np.zeros(n, np.int64)
    g = np.zeros(n, np.int64)
    settled = np.zeros(n, np.int64)
    ntr = tr_target.shape[0]
    rounds = 0
    while True:
        rounds += 1
        for q in range(n):
            g[q] = f[q]
        for t in range(ntr):
            s = 0
            for e in range(tr_off[t], tr_off[t + 1]):
                s += f[tr_child[e]]
            if s > _DEG_LIMIT:
                return f, settled, rounds, DEG_OVERFLOW
            if s > g[tr_target[t]]:
                g[tr_target[t]] = s
        for b in range(bb_src.shape[0]):
            v = f[bb_src[b]] + 1
            if v > g[bb_dst[b]]:
                g[bb_dst[b]] = v
        changed = False
        for q in range(n):
            if g[q] != f[q]:
                changed = True
                settled[q] = rounds
                f[q] = g[q]
        if not changed:
            return f, settled, rounds, DEG_OK
        if rounds >= max_rounds:
            return f, settled, rounds, DEG_DIVERGED


@njit
def product_keep(k, n, comp, cyclic, reach, acc):
    """Vertices of the k-fold product (k = 2 or 3) that can lie on a
    relevant cycle.

    k = 2: both coordinates in one cyclic component (pair cycles through a
    diagonal vertex project to cycles of the base digraph).
    k = 3: outer coordinates in cyclic components with
    comp(u) ->* comp(v) ->* comp(w) (barbell cycles)."""
    nv = n ** k
    keep = np.zeros(nv, np.uint8)
    for x in range(nv):
        if acc[x] == 0:
            continue
        if k == 2:
            u = x // n
            v = x % n
            if comp[u] == comp[v] and cyclic[comp[u]]:
                keep[x] = 1
        else:
            u = x // (n * n)
            v = (x // n) % n
            w = x % n
            cu = comp[u]
            cv = comp[v]
            cw = comp[w]
            if cyclic[cu] and cyclic[cw] and reach[cu, cv] and reach[cv, cw]:
                keep[x] = 1
    return keep
