"""Growth analysis: heavy cycles, barbells, degrees, verdicts and witnesses.

All detectors expect a trim automaton.  Product digraphs are never built
in full: each analysis first restricts the product to vertices that can lie
on the cycles it looks for (coordinates inside suitable strongly connected
components of the base digraph), then runs Tarjan on what is left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels as K
from ._witness import Witnesses, bfs_path, chain_contexts, csr_succ, decode, encode
from .automaton import (
    WeightedTreeAutomaton, ambiguity_mask, check_run, count_accepting_runs, is_trim,
    pair_accessible_mask, scc_arrays, shallow_digraph, trim, value,
)
from .core import Context, Tree, apply_context, compose_contexts, power, print_context, print_tree
from .errors import HeavyCyclePresent, NotTrimmed, WitnessReconstructionFailed

SCALAR = "ScalarHeavy"
CENTER = "CenterAmbiguous"
SIDE = "SideAmbiguous"

_EMPTY = np.zeros(0, np.int64)


# -- shared structure ----------------------------------------------------------

class ProductGraph(NamedTuple):
    """A pruned k-fold product digraph on compact vertex ids.

    ``ids[i]`` is the product state of compact vertex ``i``; ``flag`` marks
    edges from distinct transitions (pairs) or auxiliary edges (triples)."""

    k: int
    n: int
    ids: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    flag: np.ndarray
    comp: np.ndarray
    ncomp: int

    def find(self, x: int) -> int:
        i = int(np.searchsorted(self.ids, x))
        return i if i < len(self.ids) and self.ids[i] == x else -1

    def path(self, x: int, y: int):
        """Shortest product-state path from ``x`` to ``y`` (both product ids)."""
        i, j = self.find(x), self.find(y)
        if i < 0 or j < 0:
            return None
        succ = csr_succ(len(self.ids), self.src, self.dst)
        p = bfs_path(succ, [i], j)
        if p is None:
            return None
        return [decode(int(self.ids[v]), self.n, self.k) for v in p]


class _Structure:
    """Lazily computed facts about one trim automaton."""

    def __init__(self, A: WeightedTreeAutomaton):
        self.A = A
        self.T = A.tables
        g = shallow_digraph(A)
        self.g = g
        s = scc_arrays(A.n, g.src, g.dst)
        self.comp = s.comp
        self.ncomp = s.ncomp
        self.cyclic = s.cyclic.astype(np.uint8)
        self._cache = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def acc2(self):
        return self._get("acc2", lambda: pair_accessible_mask(self.A, 2))

    @property
    def acc3(self):
        return self._get("acc3", lambda: pair_accessible_mask(self.A, 3))

    @property
    def amb(self):
        n = self.A.n
        return self._get("amb", lambda: ambiguity_mask(self.A)[n * n:])

    @property
    def witnesses(self) -> Witnesses:
        return self._get("wit", lambda: Witnesses(self.A))

    def _product_graph(self, k, acc, keep, fixed):
        T = self.T
        n = T.n
        args = (k, n, T.rank, T.slot_letter, T.slot_pos, T.pi_off, T.pi_tr, T.tr_off,
                T.tr_child, T.tr_target, acc, keep, self.comp, fixed)
        m = K.tuple_edges(*args, False, _EMPTY, _EMPTY, _EMPTY)
        src = np.empty(m, np.int64)
        dst = np.empty(m, np.int64)
        flag = np.empty(m, np.int64)
        K.tuple_edges(*args, True, src, dst, flag)
        ids = np.flatnonzero(keep).astype(np.int64)
        return ids, np.searchsorted(ids, src), np.searchsorted(ids, dst), flag

    @property
    def pair_graph(self) -> ProductGraph:
        def build():
            n = self.A.n
            keep = K.product_keep(2, n, self.comp, self.cyclic,
                                  np.zeros((1, 1), np.uint8), self.acc2)
            ids, src, dst, flag = self._product_graph(2, self.acc2, keep,
                                                      np.array([1, 1], np.int64))
            s = scc_arrays(len(ids), src, dst)
            return ProductGraph(2, n, ids, src, dst, flag, s.comp, s.ncomp)
        return self._get("pg", build)

    @property
    def triple_graph(self) -> ProductGraph:
        def build():
            n = self.A.n
            g = self.g
            reach = K.comp_reach(self.ncomp, self.comp[g.src], self.comp[g.dst])
            acc3 = self.acc3
            keep = K.product_keep(3, n, self.comp, self.cyclic, reach, acc3)
            ids, src, dst, flag = self._product_graph(3, acc3, keep,
                                                      np.array([1, 0, 1], np.int64))
            flag[:] = 0
            # auxiliary edges (q, q', q') -> (q, q, q'), q != q'
            u = ids // (n * n)
            v = (ids // n) % n
            w = ids % n
            sel = np.flatnonzero((v == w) & (u != v))
            tgt = u[sel] * n * n + u[sel] * n + w[sel]
            pos = np.searchsorted(ids, tgt)
            pos_c = np.minimum(pos, max(len(ids) - 1, 0))
            ok = (pos < len(ids)) & (ids[pos_c] == tgt) if len(ids) else np.zeros(0, bool)
            src = np.concatenate([src, sel[ok]])
            dst = np.concatenate([dst, pos[ok]])
            flag = np.concatenate([flag, np.ones(int(ok.sum()), np.int64)])
            s = scc_arrays(len(ids), src, dst)
            return ProductGraph(3, n, ids, src, dst, flag, s.comp, s.ncomp)
        return self._get("tg", build)


def _structure(A: WeightedTreeAutomaton, check=True) -> _Structure:
    s = A.__dict__.get("_growth_structure")
    if s is None:
        if check and not is_trim(A):
            raise NotTrimmed("the analysis expects a trim automaton; call trim() first")
        s = _Structure(A)
        A.__dict__["_growth_structure"] = s
    return s


# -- heavy cycles --------------------------------------------------------------

@dataclass(frozen=True)
class HeavyCycleEvidence:
    """Why a state carries a cycle of value >= 2.  ``detail`` holds the
    transitions, child indices (0-based) and product vertices needed to
    rebuild a context."""

    kind: str
    state: int
    detail: dict = field(default_factory=dict, compare=False)


def detect_scalar_heavy(A: WeightedTreeAutomaton):
    S = _structure(A)
    T = S.T
    heavy_tr = T.tr_weight >= 2
    if A.n == 0 or not heavy_tr.any():
        return None
    g = S.g
    heavy = g.reachable_from(np.unique(T.tr_target[heavy_tr]).tolist())
    hcount = np.zeros(len(T.tr_target), np.int64)
    np.add.at(hcount, np.repeat(np.arange(len(T.tr_target)), np.diff(T.tr_off)),
              heavy[T.tr_child].astype(np.int64))
    same = S.comp[g.src] == S.comp[g.dst]
    cond = same & (heavy_tr[g.tr] | (hcount[g.tr] - heavy[g.src] > 0))
    hits = np.flatnonzero(cond)
    if not len(hits):
        return None
    # first hit in transition order, then by child index
    e = hits[np.lexsort((g.pos[hits], g.tr[hits]))[0]]
    t, i = int(g.tr[e]), int(g.pos[e])
    tr = A.transitions[t]
    side = None
    if tr.weight < 2:
        side = next(j for j, c in enumerate(tr.children) if j != i and heavy[c])
    return HeavyCycleEvidence(SCALAR, tr.target, {
        "transition": t, "index": i, "heavy_child": side, "component": int(S.comp[tr.target])})


def _diag_comps(pg: ProductGraph):
    n = pg.n
    u, v = pg.ids // n, pg.ids % n
    diag = u == v
    has_diag = np.zeros(pg.ncomp, bool)
    has_diag[pg.comp[diag]] = True
    has_off = np.zeros(pg.ncomp, bool)
    has_off[pg.comp[~diag]] = True
    return diag, has_diag, has_off


def detect_center_ambiguous(A: WeightedTreeAutomaton):
    S = _structure(A)
    if A.n == 0 or not S.cyclic.any():
        return None
    pg = S.pair_graph
    if not len(pg.ids):
        return None
    n = A.n
    diag, has_diag, has_off = _diag_comps(pg)
    bad = has_diag & has_off
    cand = np.flatnonzero(diag & bad[pg.comp])
    if not len(cand):
        return None
    i = int(cand[0])
    c = pg.comp[i]
    j = int(np.flatnonzero((pg.comp == c) & ~diag)[0])
    q = int(pg.ids[i] // n)
    other = divmod(int(pg.ids[j]), n)
    return HeavyCycleEvidence(CENTER, q, {"pair": other, "component": int(c)})


def detect_side_ambiguous(A: WeightedTreeAutomaton):
    S = _structure(A)
    if A.n == 0 or not S.cyclic.any():
        return None
    n = A.n
    g = S.g
    trs = A.transitions
    amb = S.amb
    same = np.flatnonzero(S.comp[g.src] == S.comp[g.dst])
    best = None
    for e in same.tolist():
        t, j = int(g.tr[e]), int(g.pos[e])
        tr = trs[t]
        for i, c in enumerate(tr.children):
            if i != j and amb[c]:
                key = (t, j, i)
                if best is None or key < best:
                    best = key
                break
    if best is not None:
        t, j, i = best
        return HeavyCycleEvidence(SIDE, trs[t].target, {
            "rule": "ambiguous-side-child", "transition": t, "index": j, "side": i})
    pg = S.pair_graph
    if not len(pg.ids):
        return None
    diag, has_diag, _ = _diag_comps(pg)
    cs, cd = pg.comp[pg.src], pg.comp[pg.dst]
    hits = np.flatnonzero((pg.flag == 1) & (cs == cd) & has_diag[cs])
    if not len(hits):
        return None
    e = int(hits[0])
    c = int(cs[e])
    q = int(pg.ids[np.flatnonzero((pg.comp == c) & diag)[0]] // n)
    return HeavyCycleEvidence(SIDE, q, {
        "rule": "distinct-transitions",
        "edge": (divmod(int(pg.ids[pg.src[e]]), n), divmod(int(pg.ids[pg.dst[e]]), n)),
        "component": c})


def has_heavy_cycle(A: WeightedTreeAutomaton):
    for detect in (detect_scalar_heavy, detect_center_ambiguous, detect_side_ambiguous):
        ev = detect(A)
        if ev is not None:
            return ev
    return None


# -- barbells and degrees ------------------------------------------------------

class BarbellSet(frozenset):
    """Ordered pairs ``(q1, q2)``, ``q1 != q2``, with a common context C
    such that q1 ->C q1, q1 ->C q2 and q2 ->C q2."""

    @property
    def pairs(self) -> frozenset:
        return frozenset(self)


def barbell_pairs(A: WeightedTreeAutomaton) -> BarbellSet:
    S = _structure(A)
    n = A.n
    if n < 2 or S.cyclic.sum() == 0:
        return BarbellSet()
    tg = S.triple_graph
    if not len(tg.ids):
        return BarbellSet()
    orig = (tg.flag == 0) & (tg.comp[tg.src] == tg.comp[tg.dst])
    has_orig = np.zeros(tg.ncomp, bool)
    has_orig[tg.comp[tg.src[orig]]] = True
    q1, q2 = np.divmod(np.arange(n * n, dtype=np.int64), n)
    off = q1 != q2
    q1, q2 = q1[off], q2[off]
    x = q1 * n * n + q1 * n + q2
    y = q1 * n * n + q2 * n + q2
    ix = np.minimum(np.searchsorted(tg.ids, x), len(tg.ids) - 1)
    iy = np.minimum(np.searchsorted(tg.ids, y), len(tg.ids) - 1)
    ok = (tg.ids[ix] == x) & (tg.ids[iy] == y)
    ok &= tg.comp[ix] == tg.comp[iy]
    ok &= has_orig[tg.comp[ix]]
    return BarbellSet(zip(q1[ok].tolist(), q2[ok].tolist()))


def barbell_context(A: WeightedTreeAutomaton, q1: int, q2: int) -> Context:
    """A context C with q1 ->C q1, q1 ->C q2 and q2 ->C q2."""
    S = _structure(A)
    n = A.n
    path = S.triple_graph.path(encode((q1, q1, q2), n), encode((q1, q2, q2), n))
    if path is None:
        raise WitnessReconstructionFailed(f"({q1}, {q2}) is not a barbell")

    def aux(u, v):
        return u[1] == u[2] and u[0] != u[1] and v == (u[0], u[0], u[2])

    return S.witnesses.product_path_context(path, skip=aux)


class DegreeMap(NamedTuple):
    """``deg[q]`` per state; ``iterations`` counts operator applications up to
    and including the first one that changes nothing; ``settled[q]`` is the
    round in which ``deg[q]`` took its final value."""

    deg: tuple
    iterations: int
    settled: tuple

    @property
    def max(self) -> int:
        return max(self.deg, default=0)


def _degrees_bigint(A, pairs, max_rounds):
    f = [0] * A.n
    settled = [0] * A.n
    rounds = 0
    while True:
        rounds += 1
        g = list(f)
        for tr in A.transitions:
            s = sum(f[c] for c in tr.children)
            if s > g[tr.target]:
                g[tr.target] = s
        for a, b in pairs:
            if f[a] + 1 > g[b]:
                g[b] = f[a] + 1
        changed = False
        for q in range(A.n):
            if g[q] != f[q]:
                changed = True
                settled[q] = rounds
        f = g
        if not changed:
            return f, settled, rounds, K.DEG_OK
        if rounds >= max_rounds:
            return f, settled, rounds, K.DEG_DIVERGED


def degrees(A: WeightedTreeAutomaton, barbells=None, check=True) -> DegreeMap:
    """Least fixed point of the degree operator, by Jacobi iteration."""
    S = _structure(A)
    if check and has_heavy_cycle(A) is not None:
        raise HeavyCyclePresent("degrees are infinite on an automaton with a heavy cycle")
    if barbells is None:
        barbells = barbell_pairs(A)
    n = A.n
    if n == 0:
        return DegreeMap((), 0, ())
    pairs = sorted(barbells)
    bs = np.array([p[0] for p in pairs], np.int64)
    bd = np.array([p[1] for p in pairs], np.int64)
    T = S.T
    f, settled, rounds, status = K.degree_fixpoint(
        n, T.tr_off, T.tr_child, T.tr_target, bs, bd, n + 1)
    if status == K.DEG_OVERFLOW:
        f, settled, rounds, status = _degrees_bigint(A, pairs, n + 1)
    if status != K.DEG_OK:
        raise HeavyCyclePresent("degree iteration does not stabilise")
    return DegreeMap(tuple(int(x) for x in f), int(rounds), tuple(int(x) for x in settled))


# -- pumping patterns ----------------------------------------------------------

class PatternNode(NamedTuple):
    label: int
    children: tuple
    state: int


class PumpNode(NamedTuple):
    """``⟳[C]`` over a pattern for ``source``; ``source ⇛_C state``."""

    context: Context
    child: object
    source: int
    state: int


@dataclass(frozen=True)
class PumpingPattern:
    """A tree whose pump nodes ``⟳[C](P)`` unfold to ``C^n[P]``.  Plain
    subtrees without pump nodes are stored as :class:`Tree` values."""

    root: object
    root_state: int

    @property
    def degree(self) -> int:
        memo = {}

        def go(p):
            k = id(p)
            if k not in memo:
                if isinstance(p, PumpNode):
                    memo[k] = 1 + go(p.child)
                elif isinstance(p, PatternNode):
                    memo[k] = sum(go(c) for c in p.children)
                else:
                    memo[k] = 0
            return memo[k]

        return go(self.root)

    def pump(self, n: int) -> Tree:
        memo = {}

        def go(p):
            k = id(p)
            if k not in memo:
                if isinstance(p, PumpNode):
                    memo[k] = apply_context(power(p.context, n), go(p.child))
                elif isinstance(p, PatternNode):
                    memo[k] = Tree(p.label, tuple(go(c) for c in p.children))
                else:
                    memo[k] = p
            return memo[k]

        return go(self.root)

    def text(self, alphabet) -> str:
        def go(p):
            if isinstance(p, PumpNode):
                return f"_PUMP[{print_context(p.context, alphabet)}]({go(p.child)})"
            if isinstance(p, PatternNode):
                if not p.children:
                    return alphabet.name(p.label)
                return f"{alphabet.name(p.label)}({','.join(go(c) for c in p.children)})"
            return print_tree(p, alphabet)

        return go(self.root)


def _patterns(A: WeightedTreeAutomaton, dm: DegreeMap, barbells, q: int):
    S = _structure(A)
    W = S.witnesses
    deg, est = dm.deg, dm.settled
    into: dict = {}
    for i, tr in enumerate(A.transitions):
        into.setdefault(tr.target, []).append(i)
    bb_into: dict = {}
    for a, b in sorted(barbells):
        bb_into.setdefault(b, []).append(a)
    memo: dict = {}

    def build(p):
        if p in memo:
            return memo[p]
        if deg[p] == 0:
            memo[p] = W.min_tree(p)
            return memo[p]
        for i in into.get(p, ()):
            tr = A.transitions[i]
            if (sum(deg[c] for c in tr.children) == deg[p]
                    and all(est[c] < est[p] for c in tr.children)):
                memo[p] = PatternNode(tr.letter, tuple(build(c) for c in tr.children), p)
                return memo[p]
        for a in bb_into.get(p, ()):
            if deg[a] + 1 == deg[p] and est[a] < est[p]:
                memo[p] = PumpNode(barbell_context(A, a, p), build(a), a, p)
                return memo[p]
        raise WitnessReconstructionFailed(f"no trigger realises deg({p}) = {deg[p]}")

    return PumpingPattern(build(q), q)


def poly_witness(A: WeightedTreeAutomaton, dm: DegreeMap | None = None, barbells=None):
    """A maximal-degree pumping pattern and a context leading its root state
    to acceptance."""
    S = _structure(A)
    if barbells is None:
        barbells = barbell_pairs(A)
    if dm is None:
        dm = degrees(A, barbells)
    if A.n == 0:
        raise WitnessReconstructionFailed("empty automaton has no pattern")
    k = dm.max
    q = dm.deg.index(k)
    return _patterns(A, dm, barbells, q), S.witnesses.to_accepting(q)


def exp_witness(A: WeightedTreeAutomaton, ev: HeavyCycleEvidence):
    """``(C, t, C')`` with a cycle of value >= 2 on C, so that the value of
    ``C'[C^n[t]]`` is at least ``2 ** n``."""
    S = _structure(A)
    W = S.witnesses
    n = A.n
    q = ev.state
    d = ev.detail
    trs = A.transitions
    if ev.kind == SCALAR or d.get("rule") == "ambiguous-side-child":
        t, j = d["transition"], d["index"]
        tr = trs[t]
        over = None
        if ev.kind == SCALAR and d["heavy_child"] is not None:
            h = d["heavy_child"]
            over = {h: W.heavy_tree(tr.children[h])}
        elif ev.kind == SIDE:
            i = d["side"]
            over = {i: W.ambiguous_tree(tr.children[i])}
        if over and any(v is None for v in over.values()):
            raise WitnessReconstructionFailed("side witness tree missing")
        cyc = compose_contexts(W.edge_context(t, j, over), W.path_context(q, tr.children[j]))
    else:
        pg = S.pair_graph
        home = encode((q, q), n)
        if ev.kind == CENTER:
            mid = encode(d["pair"], n)
            p1 = pg.path(home, mid)
            p2 = pg.path(mid, home)
            if p1 is None or p2 is None:
                raise WitnessReconstructionFailed("center cycle not found")
            cyc = compose_contexts(W.product_path_context(p2), W.product_path_context(p1))
        else:
            a, b = d["edge"]
            p1 = pg.path(home, encode(a, n))
            p2 = pg.path(encode(b, n), home)
            step = W.product_step(a, b, distinct=True)
            if p1 is None or p2 is None or step is None:
                raise WitnessReconstructionFailed("side cycle not found")
            cyc = chain_contexts([W.product_path_context(p1), W.product_context(*step),
                                  W.product_path_context(p2)])
    return cyc, W.min_tree(q), W.to_accepting(q)


def check_exp_witness(A, w, ns=(1, 4, 8)) -> bool:
    C, t, C2 = w
    return all(value(A, C2(power(C, k)(t))).accepting >= 2 ** k for k in ns)


def check_poly_witness(A, pattern: PumpingPattern, C2: Context, k: int, ns=(2, 3, 5)) -> bool:
    return all(count_accepting_runs(A, C2(pattern.pump(m))) >= m ** k for m in ns)


# -- critical nodes ------------------------------------------------------------

def critical_nodes(A: WeightedTreeAutomaton, dm: DegreeMap, t: Tree, run) -> frozenset:
    """Addresses whose transition strictly raises the degree."""
    deg = dm.deg
    out = []
    for addr, i in check_run(A, t, run):
        tr = A.transitions[i]
        if deg[tr.target] > sum(deg[c] for c in tr.children):
            out.append(addr)
    return frozenset(out)


# -- verdicts ------------------------------------------------------------------

class Verdict(NamedTuple):
    kind: str
    degree: int | None = None

    def __str__(self):
        return f"Polynomial({self.degree})" if self.kind == "Polynomial" else self.kind


EMPTY = Verdict("Empty")
EXPONENTIAL = Verdict("Exponential")


def Polynomial(k: int) -> Verdict:
    return Verdict("Polynomial", int(k))


@dataclass
class GrowthReport:
    verdict: Verdict
    trimmed: WeightedTreeAutomaton
    evidence: HeavyCycleEvidence | None = None
    barbells: BarbellSet | None = None
    degrees: DegreeMap | None = None
    pattern: PumpingPattern | None = None
    accept_context: Context | None = None
    exp_witness: tuple | None = None

    def to_dict(self) -> dict:
        B = self.trimmed
        al = B.alphabet
        names = B.states
        out = {"verdict": str(self.verdict),
               "trimmed": {"states": len(names), "transitions": len(B.transitions)}}
        if self.evidence is not None:
            ev = self.evidence
            out["evidence"] = {"kind": ev.kind, "state": names[ev.state],
                               "detail": _jsonable(ev.detail, names)}
        if self.degrees is not None:
            out["degrees"] = {names[q]: d for q, d in enumerate(self.degrees.deg)}
            out["iterations"] = self.degrees.iterations
        if self.barbells is not None:
            out["barbells"] = [[names[a], names[b]] for a, b in sorted(self.barbells)]
        if self.exp_witness is not None:
            C, t, C2 = self.exp_witness
            out["witness"] = {"cycle": print_context(C, al), "tree": print_tree(t, al),
                              "accept": print_context(C2, al)}
        elif self.pattern is not None:
            out["witness"] = {"pattern": self.pattern.text(al),
                              "root": names[self.pattern.root_state],
                              "degree": self.pattern.degree,
                              "accept": print_context(self.accept_context, al)}
        return out


def _jsonable(d, names):
    out = {}
    for k, v in d.items():
        if k in ("pair",):
            v = [names[x] for x in v]
        elif k == "edge":
            v = [[names[x] for x in p] for p in v]
        out[k] = v
    return out


def analyze(A: WeightedTreeAutomaton, witness: bool = False) -> GrowthReport:
    """Trim, then decide Empty / Exponential / Polynomial(k).  With
    ``witness`` the report also carries a checked witness family."""
    B = trim(A)
    if B.n == 0:
        return GrowthReport(EMPTY, B)
    _structure(B, check=False)
    ev = has_heavy_cycle(B)
    if ev is not None:
        rep = GrowthReport(EXPONENTIAL, B, evidence=ev)
        if witness:
            rep.exp_witness = exp_witness(B, ev)
        return rep
    bb = barbell_pairs(B)
    dm = degrees(B, bb, check=False)
    rep = GrowthReport(Polynomial(dm.max), B, barbells=bb, degrees=dm)
    if witness:
        rep.pattern, rep.accept_context = poly_witness(B, dm, bb)
    return rep
