"""Concrete trees and contexts behind the structural verdicts.

Everything here runs on demand in plain Python: minimal common trees for
state tuples (Knuth's generalisation of Dijkstra to size-additive costs),
breadth-first paths in (product) shallow digraphs, and the contexts those
paths spell out.
"""

from __future__ import annotations

import heapq
from collections import deque
from itertools import product as cartesian

import numpy as np

from .automaton import WeightedTreeAutomaton
from .core import IDENTITY, Context, Tree, compose_contexts, shallow_context
from .errors import WitnessReconstructionFailed


def encode(x, n):
    v = 0
    for p in x:
        v = v * n + p
    return v


def decode(v, n, k):
    out = [0] * k
    for j in range(k - 1, -1, -1):
        v, out[j] = divmod(v, n)
    return tuple(out)


class MinTrees:
    """Smallest tree admitting a run to every coordinate of a k-tuple of
    states.  Ties are broken by tuple index, so the result is canonical."""

    def __init__(self, A: WeightedTreeAutomaton, k: int = 1):
        self.A = A
        self.k = k
        self.size: dict = {}
        self.choice: dict = {}
        self._memo: dict = {}
        self._run()

    def _run(self):
        A, k = self.A, self.k
        n = A.n
        trs = A.transitions
        best: dict = {}
        heap = []
        for a in range(len(A.alphabet)):
            if A.alphabet.rank(a) == 0:
                for combo in cartesian(A.by_letter[a], repeat=k):
                    tgt = encode((trs[t].target for t in combo), n)
                    if tgt not in best or (1, combo) < best[tgt]:
                        best[tgt] = (1, combo)
                        heapq.heappush(heap, (1, tgt, combo))
        # transitions grouped by (letter, position, child state)
        index: dict = {}
        for i, tr in enumerate(trs):
            for p, c in enumerate(tr.children):
                index.setdefault((tr.letter, p, c), []).append(i)
        size = self.size
        while heap:
            s, x, combo = heapq.heappop(heap)
            if x in size:
                continue
            size[x] = s
            self.choice[x] = combo
            xs = decode(x, n, k)
            for a in range(len(A.alphabet)):
                r = A.alphabet.rank(a)
                for pos in range(r):
                    lists = [index.get((a, pos, c), ()) for c in xs]
                    if not all(lists):
                        continue
                    for combo2 in cartesian(*lists):
                        total = 1
                        ok = True
                        for pp in range(r):
                            c = encode((trs[t].children[pp] for t in combo2), n)
                            cs = size.get(c)
                            if cs is None:
                                ok = False
                                break
                            total += cs
                        if not ok:
                            continue
                        tgt = encode((trs[t].target for t in combo2), n)
                        if tgt in size:
                            continue
                        cand = (total, combo2)
                        if tgt not in best or cand < best[tgt]:
                            best[tgt] = cand
                            heapq.heappush(heap, (total, tgt, combo2))

    def __contains__(self, x) -> bool:
        return self._key(x) in self.size

    def _key(self, x):
        return x if isinstance(x, int) else encode(x, self.A.n)

    def tree(self, x) -> Tree:
        x = self._key(x)
        if x not in self.size:
            raise WitnessReconstructionFailed(f"tuple {decode(x, self.A.n, self.k)} is not accessible")
        memo = self._memo
        trs = self.A.transitions
        n = self.A.n
        stack = [(x, False)]
        while stack:
            y, ready = stack.pop()
            if y in memo:
                continue
            combo = self.choice[y]
            r = len(trs[combo[0]].children)
            kids = [encode((trs[t].children[pp] for t in combo), n) for pp in range(r)]
            if not ready:
                stack.append((y, True))
                stack.extend((c, False) for c in kids if c not in memo)
                continue
            memo[y] = Tree(trs[combo[0]].letter, tuple(memo[c] for c in kids))
        return memo[x]


def bfs_path(succ, sources, goal):
    """Shortest path ``[v0, ..., goal]`` with ``v0`` in ``sources``; ``succ``
    maps a vertex to its successors in a fixed order."""
    sources = list(sources)
    parent = {s: None for s in sources}
    dq = deque(sources)
    while dq:
        v = dq.popleft()
        if v == goal:
            path = []
            while v is not None:
                path.append(v)
                v = parent[v]
            return path[::-1]
        for w in succ(v):
            if w not in parent:
                parent[w] = v
                dq.append(w)
    return None


def chain_contexts(contexts) -> Context:
    """Contexts listed from the hole upwards, composed into one."""
    out = IDENTITY
    for c in contexts:
        out = compose_contexts(c, out)
    return out


class Witnesses:
    """Per-automaton witness factory for a trim automaton."""

    def __init__(self, A: WeightedTreeAutomaton):
        self.A = A
        self._mins: dict = {}
        g_src = [[] for _ in range(A.n)]
        for i, tr in enumerate(A.transitions):
            for p, c in enumerate(tr.children):
                g_src[c].append((tr.target, i, p))
        for lst in g_src:
            lst.sort()
        self.out_edges = g_src

    def mins(self, k: int) -> MinTrees:
        if k not in self._mins:
            self._mins[k] = MinTrees(self.A, k)
        return self._mins[k]

    def min_tree(self, q: int) -> Tree:
        return self.mins(1).tree(q)

    # -- base shallow digraph --------------------------------------------------

    def edge_context(self, tr_index: int, pos: int, override=None) -> Context:
        """Shallow context of one transition with the hole at ``pos``
        (0-based); ``override`` maps child positions to custom side trees."""
        tr = self.A.transitions[tr_index]
        side = []
        for p, c in enumerate(tr.children):
            if p == pos:
                continue
            if override and p in override:
                side.append(override[p])
            else:
                side.append(self.min_tree(c))
        return shallow_context(tr.letter, pos + 1, side)

    def state_path(self, sources, goal):
        """Shortest path in the shallow digraph as a list of (transition,
        position) steps from some source to ``goal``."""
        sources = list(sources)
        parent = {s: None for s in sources}
        dq = deque(sources)
        while dq:
            v = dq.popleft()
            if v == goal:
                steps = []
                while parent[v] is not None:
                    u, i, p = parent[v]
                    steps.append((i, p))
                    v = u
                return v, steps[::-1]
            for w, i, p in self.out_edges[v]:
                if w not in parent:
                    parent[w] = (v, i, p)
                    dq.append(w)
        return None

    def path_context(self, src: int, dst: int) -> Context:
        found = self.state_path([src], dst)
        if found is None:
            raise WitnessReconstructionFailed(f"no shallow path from {src} to {dst}")
        return chain_contexts(self.edge_context(i, p) for i, p in found[1])

    def to_accepting(self, q: int) -> Context:
        best = None
        for f in self.A.accepting:
            found = self.state_path([q], f)
            if found is not None and (best is None or len(found[1]) < len(best[1])):
                best = found
        if best is None:
            raise WitnessReconstructionFailed(f"state {q} is not co-accessible")
        return chain_contexts(self.edge_context(i, p) for i, p in best[1])

    # -- product shallow digraphs ----------------------------------------------

    def product_step(self, x, y, distinct=False):
        """Transitions ``(t_1..t_k)`` and a position realising the product
        edge ``x -> y`` with accessible side tuples, or None."""
        A = self.A
        trs = A.transitions
        k = len(x)
        mt = self.mins(k)
        for a in range(len(A.alphabet)):
            r = A.alphabet.rank(a)
            for pos in range(r):
                lists = []
                for j in range(k):
                    lists.append([i for i in A.by_letter[a]
                                  if trs[i].children[pos] == x[j] and trs[i].target == y[j]])
                if not all(lists):
                    continue
                for combo in cartesian(*lists):
                    if distinct and len(set(combo)) == 1:
                        continue
                    if all(tuple(trs[t].children[pp] for t in combo) in mt
                           for pp in range(r) if pp != pos):
                        return combo, pos
        return None

    def product_context(self, combo, pos) -> Context:
        trs = self.A.transitions
        tr = trs[combo[0]]
        mt = self.mins(len(combo))
        side = [mt.tree(tuple(trs[t].children[pp] for t in combo))
                for pp in range(len(tr.children)) if pp != pos]
        return shallow_context(tr.letter, pos + 1, side)

    def product_path_context(self, path, skip=None) -> Context:
        """Context along consecutive product vertices; pairs for which
        ``skip(u, v)`` holds contribute nothing (tagged auxiliary edges)."""
        ctxs = []
        for u, v in zip(path, path[1:]):
            if skip is not None and skip(u, v):
                continue
            step = self.product_step(u, v)
            if step is None:
                raise WitnessReconstructionFailed(f"no product transition {u} -> {v}")
            ctxs.append(self.product_context(*step))
        return chain_contexts(ctxs)

    # -- special trees ---------------------------------------------------------

    def heavy_tree(self, q: int):
        """A tree with a single run of weight >= 2 to ``q``, or None."""
        A = self.A
        seeds = {}
        for i, tr in enumerate(A.transitions):
            if tr.weight >= 2 and tr.target not in seeds:
                seeds[tr.target] = i
        if not seeds:
            return None
        found = self.state_path(sorted(seeds), q)
        if found is None:
            return None
        start, steps = found
        tr = A.transitions[seeds[start]]
        base = Tree(tr.letter, tuple(self.min_tree(c) for c in tr.children))
        return chain_contexts(self.edge_context(i, p) for i, p in steps)(base)

    def ambiguous_tree(self, q: int):
        """A tree with two distinct runs to ``q``, or None."""
        A = self.A
        trs = A.transitions
        m2 = self.mins(2)
        seeds = {}
        for a in range(len(A.alphabet)):
            lst = A.by_letter[a]
            for x in range(len(lst)):
                for y in range(x + 1, len(lst)):
                    t1, t2 = trs[lst[x]], trs[lst[y]]
                    if t1.target != t2.target or t1.target in seeds:
                        continue
                    pairs = list(zip(t1.children, t2.children))
                    if all(p in m2 for p in pairs):
                        seeds[t1.target] = Tree(a, tuple(m2.tree(p) for p in pairs))
        if not seeds:
            return None
        found = self.state_path(sorted(seeds), q)
        if found is None:
            return None
        start, steps = found
        return chain_contexts(self.edge_context(i, p) for i, p in steps)(seeds[start])


def csr_succ(nv, src, dst):
    order = np.lexsort((dst, src))
    off = np.zeros(nv + 1, np.int64)
    np.add.at(off, src + 1, 1)
    np.cumsum(off, out=off)
    d = dst[order].tolist()
    o = off.tolist()
    return lambda v: d[o[v]:o[v + 1]]
