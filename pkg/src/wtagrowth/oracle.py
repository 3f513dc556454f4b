"""Exhaustive ground truth over small trees and contexts.

Nothing here is clever on purpose: trees and contexts are enumerated in a
canonical order (size, then symbol index, then child sizes left to right)
and every quantity is recomputed from scratch.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as cartesian
from typing import Iterator

from .automaton import Run, WeightedTreeAutomaton, state_vectors
from .core import HOLE_TREE, Context, RankedAlphabet, Tree
from .errors import CapExceeded, NoNullarySymbol

DEFAULT_LIMIT = 2_000_000


def _compositions(total: int, parts: int):
    """Ordered tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class _Enumerator:
    def __init__(self, alphabet: RankedAlphabet):
        if not alphabet.nullary():
            raise NoNullarySymbol("the alphabet has no rank-0 symbol")
        self.alphabet = alphabet
        self.trees = lru_cache(maxsize=None)(self._trees)
        self.contexts = lru_cache(maxsize=None)(self._contexts)

    def _trees(self, size: int) -> tuple:
        al = self.alphabet
        out = []
        for a in range(len(al)):
            r = al.rank(a)
            if r == 0:
                if size == 1:
                    out.append(Tree(a))
                continue
            for sizes in _compositions(size - 1, r):
                for kids in cartesian(*(self.trees(s) for s in sizes)):
                    out.append(Tree(a, kids))
        return tuple(out)

    def _contexts(self, size: int) -> tuple:
        """Contexts of exactly ``size`` nodes, the hole included."""
        if size == 1:
            return (Context(HOLE_TREE),)
        al = self.alphabet
        out = []
        for a in range(len(al)):
            r = al.rank(a)
            if r == 0:
                continue
            for sizes in _compositions(size - 1, r):
                for h in range(r):
                    pools = [self.contexts(s) if i == h else self.trees(s)
                             for i, s in enumerate(sizes)]
                    for kids in cartesian(*pools):
                        out.append(Context(Tree(a, tuple(
                            k.tree if i == h else k for i, k in enumerate(kids)))))
        return tuple(out)


def enum_trees(alphabet: RankedAlphabet, max_size: int) -> Iterator[Tree]:
    e = _Enumerator(alphabet)
    for s in range(1, max_size + 1):
        yield from e.trees(s)


def enum_contexts(alphabet: RankedAlphabet, max_size: int) -> Iterator[Context]:
    e = _Enumerator(alphabet)
    for s in range(1, max_size + 1):
        yield from e.contexts(s)


def enum_runs(A: WeightedTreeAutomaton, t: Tree, limit: int = DEFAULT_LIMIT) -> Iterator[Run]:
    """Every run of ``A`` on ``t``, whatever the root state."""
    trs = A.transitions

    def go(x, addr):
        # list of (state, assignment) for subtree x
        res = []
        kid_runs = [go(c, addr + (i,)) for i, c in enumerate(x.children, 1)]
        for ti in A.by_letter[x.label]:
            tr = trs[ti]
            pools = [[r for r in kr if r[0] == c] for kr, c in zip(kid_runs, tr.children)]
            for combo in cartesian(*pools):
                asg = {addr: tr.target}
                for _, sub in combo:
                    asg.update(sub)
                res.append((tr.target, asg))
                if len(res) > limit:
                    raise CapExceeded(f"more than {limit} runs")
        return res

    for _, asg in go(t, ()):
        yield Run(asg)


def run_weight(A: WeightedTreeAutomaton, t: Tree, run: Run) -> int:
    index = {tr[:3]: tr.weight for tr in A.transitions}
    w = 1
    stack = [((), t)]
    while stack:
        addr, x = stack.pop()
        kids = tuple(run.assignment[addr + (i,)] for i in range(1, len(x.children) + 1))
        w *= index[(kids, x.label, run.assignment[addr])]
        for i, c in enumerate(x.children, 1):
            stack.append((addr + (i,), c))
    return w


def context_value(A: WeightedTreeAutomaton, C: Context, src: int, dst: int) -> int:
    """Sum of run weights on C with ``src`` at the hole and ``dst`` at the root."""
    hole = [0] * A.n
    hole[src] = 1
    return state_vectors(A, C.tree, hole=hole)[dst]


def context_matrix(A: WeightedTreeAutomaton, C: Context, weighted=True) -> list:
    """``M[p][q]`` = value of C from p at the hole to q at the root."""
    rows = []
    for p in range(A.n):
        hole = [0] * A.n
        hole[p] = 1
        rows.append(state_vectors(A, C.tree, weighted=weighted, hole=hole))
    return rows


def _check_cap(count, limit):
    if count > limit:
        raise CapExceeded(f"enumeration exceeded {limit} objects; lower the size cap")


def brute_growth(A: WeightedTreeAutomaton, max_size: int, limit: int = DEFAULT_LIMIT) -> list:
    """``curve[n - 1]`` = max accepting value over trees of size <= n."""
    e = _Enumerator(A.alphabet)
    ev = _ContextEvaluator(A)
    curve = []
    best = 0
    count = 0
    for s in range(1, max_size + 1):
        for t in e.trees(s):
            count += 1
            _check_cap(count, limit)
            vec = ev.vector(t)
            v = sum(vec[q] * w for q, w in A.accepting.items())
            if v > best:
                best = v
        curve.append(best)
    return curve


class _ContextEvaluator:
    """Value matrices of enumerated contexts, built bottom-up from the
    matrices of their hole-carrying child and the vectors of the others."""

    def __init__(self, A: WeightedTreeAutomaton, weighted=True):
        self.A = A
        self.weighted = weighted
        self._vec = {}
        self._mat = {}

    def vector(self, t: Tree) -> list:
        """Per-state values of ``t``; enumerated trees share their subtrees,
        so children are looked up rather than re-evaluated."""
        k = id(t)
        v = self._vec.get(k)
        if v is not None:
            return v[0]
        A = self.A
        kids = [self.vector(c) for c in t.children]
        vec = [0] * A.n
        for i in A.by_letter[t.label]:
            tr = A.transitions[i]
            w = tr.weight if self.weighted else 1
            for kv, c in zip(kids, tr.children):
                w *= kv[c]
                if not w:
                    break
            if w:
                vec[tr.target] += w
        self._vec[k] = (vec, t)
        return vec

    def matrix(self, t: Tree, hole: tuple) -> list:
        k = id(t)
        m = self._mat.get(k)
        if m is not None:
            return m[0]
        A = self.A
        n = A.n
        if not hole:
            m = [[int(p == q) for q in range(n)] for p in range(n)]
        else:
            h = hole[0] - 1
            sub = self.matrix(t.children[h], hole[1:])
            vecs = [None if i == h else self.vector(c) for i, c in enumerate(t.children)]
            m = [[0] * n for _ in range(n)]
            for ti in A.by_letter[t.label]:
                tr = A.transitions[ti]
                w = tr.weight if self.weighted else 1
                for i, c in enumerate(tr.children):
                    if i != h:
                        w *= vecs[i][c]
                if not w:
                    continue
                hc = tr.children[h]
                for p in range(n):
                    x = sub[p][hc]
                    if x:
                        m[p][tr.target] += w * x
        self._mat[k] = (m, t)
        return m


def _useful(A):
    from .automaton import accessible_states, coaccessible_states
    return sorted(accessible_states(A) & coaccessible_states(A))


def brute_heavy(A: WeightedTreeAutomaton, max_context_size: int, limit: int = DEFAULT_LIMIT):
    """First ``(q, C)`` with context value from q to q at least 2, or None.
    Only states that are accessible and co-accessible count."""
    useful = _useful(A)
    if not useful:
        return None
    ev = _ContextEvaluator(A)
    count = 0
    for C in enum_contexts(A.alphabet, max_context_size):
        count += 1
        _check_cap(count, limit)
        M = ev.matrix(C.tree, C.hole)
        for q in useful:
            if M[q][q] >= 2:
                return q, C
    return None


def brute_barbells(A: WeightedTreeAutomaton, max_context_size: int,
                   limit: int = DEFAULT_LIMIT) -> frozenset:
    """All ``(q1, q2)``, q1 != q2, with one context C giving q1 ->C q1,
    q1 ->C q2 and q2 ->C q2 (useful states only)."""
    useful = _useful(A)
    found = set()
    ev = _ContextEvaluator(A, weighted=False)
    count = 0
    for C in enum_contexts(A.alphabet, max_context_size):
        count += 1
        _check_cap(count, limit)
        M = ev.matrix(C.tree, C.hole)
        for q1 in useful:
            if not M[q1][q1]:
                continue
            for q2 in useful:
                if q1 != q2 and M[q1][q2] and M[q2][q2]:
                    found.add((q1, q2))
    return frozenset(found)


def count_trees(alphabet: RankedAlphabet, size: int) -> int:
    """Number of trees of exactly ``size`` nodes, by the counting recurrence."""
    memo = {}

    def n(s):
        if s in memo:
            return memo[s]
        total = 0
        for a in range(len(alphabet)):
            r = alphabet.rank(a)
            if r == 0:
                total += s == 1
            else:
                for sizes in _compositions(s - 1, r):
                    p = 1
                    for x in sizes:
                        p *= n(x)
                    total += p
        memo[s] = total
        return total

    return n(size)
