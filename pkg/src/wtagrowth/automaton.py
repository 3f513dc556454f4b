"""Weighted tree automata over (N, +, x): evaluation, trimming, shallow
digraphs, products, SCCs and ambiguity."""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels as K
from .core import HOLE, RankedAlphabet, Tree, addresses, subtree
from .errors import AlphabetMismatch, InvalidRun, WtaError


class Transition(NamedTuple):
    children: tuple
    letter: int
    target: int
    weight: int = 1


class Tables(NamedTuple):
    """Flat int64 view of an automaton consumed by the kernels."""

    n: int
    rank: np.ndarray
    tr_letter: np.ndarray
    tr_target: np.ndarray
    tr_weight: np.ndarray
    tr_off: np.ndarray
    tr_child: np.ndarray
    slot_letter: np.ndarray
    slot_pos: np.ndarray
    slot_base: np.ndarray
    pi_off: np.ndarray
    pi_tr: np.ndarray
    leaf_off: np.ndarray
    leaf_tr: np.ndarray
    occ_off: np.ndarray
    occ_tr: np.ndarray


def _csr(keys: np.ndarray, values: np.ndarray, nkeys: int):
    order = np.argsort(keys, kind="stable")
    off = np.zeros(nkeys + 1, np.int64)
    np.add.at(off, keys + 1, 1)
    np.cumsum(off, out=off)
    return off, np.ascontiguousarray(values[order], dtype=np.int64)


class WeightedTreeAutomaton:
    """States are integers ``0..n-1`` with display names; transitions keep
    their input order, which fixes every downstream iteration order."""

    def __init__(self, alphabet: RankedAlphabet, states: Sequence[str],
                 transitions: Iterable[Transition], accepting: Mapping[int, int],
                 origin: Sequence[int] | None = None):
        self.alphabet = alphabet
        self.states = tuple(str(s) for s in states)
        if len(set(self.states)) != len(self.states):
            raise ValueError("duplicate state names")
        n = len(self.states)
        seen = set()
        trs = []
        for tr in transitions:
            tr = Transition(tuple(int(c) for c in tr.children), int(tr.letter),
                            int(tr.target), int(tr.weight))
            if not 0 <= tr.letter < len(alphabet):
                raise AlphabetMismatch(f"letter {tr.letter} outside alphabet")
            if alphabet.rank(tr.letter) != len(tr.children):
                raise AlphabetMismatch(
                    f"transition on {alphabet.name(tr.letter)} has "
                    f"{len(tr.children)} children, rank is {alphabet.rank(tr.letter)}")
            if not all(0 <= q < n for q in tr.children + (tr.target,)):
                raise ValueError(f"transition {tr} mentions an unknown state")
            if tr.weight < 1:
                raise ValueError("transition weights must be positive")
            key = tr[:3]
            if key in seen:
                raise ValueError(f"duplicate transition {self._fmt(tr)}")
            seen.add(key)
            trs.append(tr)
        self.transitions = tuple(trs)
        acc = {}
        for q, w in accepting.items():
            q, w = int(q), int(w)
            if not 0 <= q < n:
                raise ValueError(f"accepting state {q} unknown")
            if w < 1:
                raise ValueError("accepting weights must be positive")
            acc[q] = w
        self.accepting = dict(sorted(acc.items()))
        self.origin = tuple(origin) if origin is not None else None

    @classmethod
    def build(cls, alphabet: RankedAlphabet, states: Sequence[str], transitions,
              accepting) -> "WeightedTreeAutomaton":
        """Name-based constructor: transitions are ``(children, letter,
        target[, weight])`` with state and letter names."""
        sidx = {s: i for i, s in enumerate(states)}
        trs = []
        for tr in transitions:
            ch, a, q = tr[0], tr[1], tr[2]
            w = tr[3] if len(tr) > 3 else 1
            trs.append(Transition(tuple(sidx[c] for c in ch), alphabet.index(a), sidx[q], w))
        if not isinstance(accepting, Mapping):
            accepting = {q: 1 for q in accepting}
        return cls(alphabet, states, trs, {sidx[q]: w for q, w in accepting.items()})

    @property
    def n(self) -> int:
        return len(self.states)

    def __repr__(self):
        return (f"WeightedTreeAutomaton({self.n} states, {len(self.transitions)} "
                f"transitions, accepting={list(self.accepting)})")

    def __eq__(self, other):
        return (isinstance(other, WeightedTreeAutomaton)
                and self.alphabet == other.alphabet and self.states == other.states
                and set(self.transitions) == set(other.transitions)
                and self.accepting == other.accepting)

    __hash__ = object.__hash__

    def _fmt(self, tr: Transition) -> str:
        ch = ",".join(self.states[c] if c < len(self.states) else str(c) for c in tr.children)
        return f"({ch}) -{self.alphabet.name(tr.letter)}-> {self.states[tr.target]} : {tr.weight}"

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def unweighted(self) -> "WeightedTreeAutomaton":
        return WeightedTreeAutomaton(
            self.alphabet, self.states, [t._replace(weight=1) for t in self.transitions],
            {q: 1 for q in self.accepting}, self.origin)

    @cached_property
    def by_letter(self) -> tuple:
        out = [[] for _ in range(len(self.alphabet))]
        for i, tr in enumerate(self.transitions):
            out[tr.letter].append(i)
        return tuple(tuple(x) for x in out)

    @cached_property
    def tables(self) -> Tables:
        n = self.n
        al = self.alphabet
        trs = self.transitions
        ntr = len(trs)
        rank = np.array([al.rank(a) for a in range(len(al))], np.int64)
        tr_letter = np.array([t.letter for t in trs], np.int64)
        tr_target = np.array([t.target for t in trs], np.int64)
        tr_weight = np.array([min(t.weight, 1 << 62) for t in trs], np.int64)
        tr_off = np.zeros(ntr + 1, np.int64)
        for i, t in enumerate(trs):
            tr_off[i + 1] = tr_off[i] + len(t.children)
        tr_child = np.array([c for t in trs for c in t.children], np.int64)

        slot_base = np.full(len(al), -1, np.int64)
        slot_letter, slot_pos = [], []
        for a in range(len(al)):
            if rank[a] > 0:
                slot_base[a] = len(slot_letter)
                for p in range(rank[a]):
                    slot_letter.append(a)
                    slot_pos.append(p)
        nslots = len(slot_letter)
        keys, vals = [], []
        for i, t in enumerate(trs):
            for p, c in enumerate(t.children):
                keys.append((slot_base[t.letter] + p) * n + c)
                vals.append(i)
        pi_off, pi_tr = _csr(np.array(keys, np.int64), np.array(vals, np.int64), nslots * n)

        leaves = [i for i, t in enumerate(trs) if not t.children]
        leaf_off, leaf_tr = _csr(np.array([trs[i].letter for i in leaves], np.int64),
                                 np.array(leaves, np.int64), len(al))
        occ_off, occ_tr = _csr(tr_child, np.repeat(np.arange(ntr, dtype=np.int64),
                                                   np.diff(tr_off)), n)
        return Tables(n, rank, tr_letter, tr_target, tr_weight, tr_off, tr_child,
                      np.array(slot_letter, np.int64), np.array(slot_pos, np.int64),
                      slot_base, pi_off, pi_tr, leaf_off, leaf_tr, occ_off, occ_tr)


# -- evaluation ----------------------------------------------------------------

class ValueVector(NamedTuple):
    per_state: tuple
    accepting: int


def state_vectors(A: WeightedTreeAutomaton, t: Tree, weighted=True, hole=None) -> list:
    """Per-state values at the root of ``t`` as a dense list of ints.

    ``hole`` supplies the vector used at a hole leaf (contexts)."""
    n = A.n
    by_letter = A.by_letter
    trs = A.transitions
    memo: dict = {}
    stack = [(t, False)]
    while stack:
        x, ready = stack.pop()
        if id(x) in memo:
            continue
        if x.label == HOLE:
            if hole is None:
                raise AlphabetMismatch("hole in a tree")
            memo[id(x)] = list(hole)
            continue
        if not 0 <= x.label < len(A.alphabet) or A.alphabet.rank(x.label) != len(x.children):
            raise AlphabetMismatch(f"label {x.label} does not fit the automaton's alphabet")
        if not ready:
            stack.append((x, True))
            for c in x.children:
                if id(c) not in memo:
                    stack.append((c, False))
            continue
        kids = [memo[id(c)] for c in x.children]
        vec = [0] * n
        for i in by_letter[x.label]:
            tr = trs[i]
            v = tr.weight if weighted else 1
            for k, c in zip(kids, tr.children):
                v *= k[c]
                if not v:
                    break
            if v:
                vec[tr.target] += v
        memo[id(x)] = vec
    return memo[id(t)]


def value(A: WeightedTreeAutomaton, t: Tree) -> ValueVector:
    vec = state_vectors(A, t)
    return ValueVector(tuple(vec), sum(vec[q] * w for q, w in A.accepting.items()))


def count_accepting_runs(A: WeightedTreeAutomaton, t: Tree) -> int:
    vec = state_vectors(A, t, weighted=False)
    return sum(vec[q] for q in A.accepting)


class Run(NamedTuple):
    """A state per node address."""

    assignment: dict

    @property
    def root(self) -> int:
        return self.assignment[()]


def check_run(A: WeightedTreeAutomaton, t: Tree, run: Run) -> list:
    """Validate ``run`` and return the transition index used at each address
    (in preorder)."""
    index = {tr[:3]: i for i, tr in enumerate(A.transitions)}
    used = []
    asg = run.assignment
    for addr in addresses(t):
        x = subtree(t, addr)
        try:
            key = (tuple(asg[addr + (i,)] for i in range(1, len(x.children) + 1)),
                   x.label, asg[addr])
        except KeyError:
            raise InvalidRun(f"run misses address {addr}") from None
        if key not in index:
            raise InvalidRun(f"no transition matches the run at {addr}")
        used.append((addr, index[key]))
    if len(asg) != len(used):
        raise InvalidRun("run assigns addresses outside the tree")
    return used


# -- structure -----------------------------------------------------------------

def _accessible_mask(A: WeightedTreeAutomaton) -> np.ndarray:
    T = A.tables
    return K.horn_accessible(T.n, T.tr_off, T.tr_child, T.tr_target, T.occ_off, T.occ_tr)


def accessible_states(A: WeightedTreeAutomaton) -> frozenset:
    if A.n == 0:
        return frozenset()
    return frozenset(np.flatnonzero(_accessible_mask(A)).tolist())


class ShallowDigraph:
    """Edges ``q' -> q`` witnessed by shallow contexts.  Parallel edges from
    different transitions are kept in ``src``/``dst`` with their provenance
    (``tr``, 0-based ``pos``); ``edges`` is the deduplicated relation."""

    def __init__(self, n, src, dst, tr=None, pos=None, labels=None):
        self.n = int(n)
        self.src = np.asarray(src, np.int64)
        self.dst = np.asarray(dst, np.int64)
        self.tr = tr
        self.pos = pos
        self.labels = labels

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(zip(self.src.tolist(), self.dst.tolist()))

    @cached_property
    def csr(self):
        order = np.argsort(self.src, kind="stable")
        off = np.zeros(self.n + 1, np.int64)
        np.add.at(off, self.src + 1, 1)
        np.cumsum(off, out=off)
        return off, np.ascontiguousarray(self.dst[order]), order

    def successors(self, v: int) -> list:
        off, dst, _ = self.csr
        return dst[off[v]:off[v + 1]].tolist()

    def reverse(self) -> "ShallowDigraph":
        return ShallowDigraph(self.n, self.dst, self.src, self.tr, self.pos, self.labels)

    def reachable_from(self, sources: Iterable[int]) -> np.ndarray:
        off, dst, _ = self.csr
        seen = np.zeros(self.n, bool)
        stack = [s for s in sources]
        for s in stack:
            seen[s] = True
        while stack:
            v = stack.pop()
            for w in dst[off[v]:off[v + 1]].tolist():
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return seen


def _shallow_arrays(T: Tables, acc: np.ndarray):
    z = np.zeros(0, np.int64)
    m = K.shallow_edges(T.tr_off, T.tr_child, T.tr_target, acc, False, z, z, z, z)
    out = [np.empty(m, np.int64) for _ in range(4)]
    K.shallow_edges(T.tr_off, T.tr_child, T.tr_target, acc, True, *out)
    return out


def shallow_digraph(A: WeightedTreeAutomaton) -> ShallowDigraph:
    T = A.tables
    if A.n == 0:
        return ShallowDigraph(0, [], [], np.zeros(0, np.int64), np.zeros(0, np.int64), A.states)
    src, dst, tr, pos = _shallow_arrays(T, _accessible_mask(A))
    return ShallowDigraph(A.n, src, dst, tr, pos, A.states)


def coaccessible_states(A: WeightedTreeAutomaton) -> frozenset:
    if A.n == 0:
        return frozenset()
    g = shallow_digraph(A).reverse()
    return frozenset(np.flatnonzero(g.reachable_from(A.accepting)).tolist())


def trim(A: WeightedTreeAutomaton) -> WeightedTreeAutomaton:
    """Restrict to useful states.  ``origin`` of the result maps each kept
    state to its index in ``A`` (composed through earlier trims)."""
    keep = sorted(accessible_states(A) & coaccessible_states(A))
    new = {q: i for i, q in enumerate(keep)}
    trs = [Transition(tuple(new[c] for c in t.children), t.letter, new[t.target], t.weight)
           for t in A.transitions
           if t.target in new and all(c in new for c in t.children)]
    base = A.origin
    origin = [base[q] for q in keep] if base is not None else keep
    return WeightedTreeAutomaton(A.alphabet, [A.states[q] for q in keep], trs,
                                 {new[q]: w for q, w in A.accepting.items() if q in new},
                                 origin)


def is_trim(A: WeightedTreeAutomaton) -> bool:
    full = frozenset(range(A.n))
    return accessible_states(A) == full and coaccessible_states(A) == full


def product(A: WeightedTreeAutomaton, B: WeightedTreeAutomaton) -> WeightedTreeAutomaton:
    """Synchronous product; weights are dropped and nothing is accepting."""
    if A.alphabet != B.alphabet:
        raise AlphabetMismatch("product of automata over different alphabets")
    nb = B.n
    names = [f"({p},{q})" for p in A.states for q in B.states]
    trs = []
    for a in range(len(A.alphabet)):
        for i in A.by_letter[a]:
            t1 = A.transitions[i]
            for j in B.by_letter[a]:
                t2 = B.transitions[j]
                trs.append(Transition(
                    tuple(p * nb + q for p, q in zip(t1.children, t2.children)),
                    a, t1.target * nb + t2.target, 1))
    return WeightedTreeAutomaton(A.alphabet, names, trs, {})


class SCC(NamedTuple):
    """``comp[v]`` numbers components sinks first (reverse topological)."""

    comp: np.ndarray
    ncomp: int
    cyclic: np.ndarray

    def components(self) -> list:
        out = [[] for _ in range(self.ncomp)]
        for v, c in enumerate(self.comp.tolist()):
            out[c].append(v)
        return out


def scc_arrays(nv: int, src: np.ndarray, dst: np.ndarray) -> SCC:
    order = np.argsort(src, kind="stable")
    off = np.zeros(nv + 1, np.int64)
    np.add.at(off, src + 1, 1)
    np.cumsum(off, out=off)
    comp, ncomp = K.tarjan(nv, off, np.ascontiguousarray(dst[order]))
    cyclic = np.zeros(ncomp, bool)
    same = comp[src] == comp[dst]
    cyclic[comp[src[same]]] = True
    return SCC(comp, int(ncomp), cyclic)


def scc(g: ShallowDigraph) -> SCC:
    return scc_arrays(g.n, g.src, g.dst)


def pair_accessible_mask(A: WeightedTreeAutomaton, k: int = 2) -> np.ndarray:
    T = A.tables
    return K.tuple_accessible(k, T.n, T.rank, T.slot_letter, T.slot_pos, T.pi_off, T.pi_tr,
                              T.leaf_off, T.leaf_tr, T.tr_off, T.tr_child, T.tr_target)


def pair_accessible(A: WeightedTreeAutomaton) -> frozenset:
    if A.n == 0:
        return frozenset()
    n = A.n
    return frozenset(divmod(x, n) for x in np.flatnonzero(pair_accessible_mask(A)).tolist())


def ambiguity_mask(A: WeightedTreeAutomaton) -> np.ndarray:
    """Accessibility of the pair/``#`` automaton; see ``_kernels.seidl_ambiguous``."""
    T = A.tables
    return K.seidl_ambiguous(T.n, T.rank, T.slot_letter, T.slot_pos, T.pi_off, T.pi_tr,
                             T.leaf_off, T.leaf_tr, T.tr_off, T.tr_child, T.tr_target)


def ambiguous_states(A: WeightedTreeAutomaton) -> frozenset:
    if A.n == 0:
        return frozenset()
    n = A.n
    return frozenset(np.flatnonzero(ambiguity_mask(A)[n * n:]).tolist())


def require_same_alphabet(A: WeightedTreeAutomaton, alphabet: RankedAlphabet):
    if A.alphabet != alphabet:
        raise AlphabetMismatch("tree and automaton use different alphabets")


__all__ = [
    "Transition", "WeightedTreeAutomaton", "ValueVector", "Run", "ShallowDigraph", "SCC",
    "value", "count_accepting_runs", "state_vectors", "check_run", "accessible_states",
    "shallow_digraph", "coaccessible_states", "trim", "is_trim", "product", "scc",
    "scc_arrays", "pair_accessible", "pair_accessible_mask", "ambiguous_states",
    "ambiguity_mask", "WtaError",
]
