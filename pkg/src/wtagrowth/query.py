"""Counting results of set queries through ambiguity.

A query with ``ell`` free set variables is given as an unambiguous
automaton over marked letters ``a@b1..bl``.  ``build_bf`` turns it into an
automaton over the plain alphabet whose accepting runs on ``t`` are in
bijection with the markings of ``t`` it accepts, so the growth of the
query's result count is the ambiguity growth of that automaton.
"""

from __future__ import annotations

from itertools import product as cartesian
from typing import Sequence

from .automaton import (
    Transition, WeightedTreeAutomaton, ambiguous_states, pair_accessible,
)
from .core import RankedAlphabet, Tree, addresses, subtree
from .errors import AlphabetMismatch, CapExceeded, InvalidAddress, NotUnambiguous
from .growth import GrowthReport, analyze

MAX_MARKS = 3


class MarkedAlphabet:
    """Letters ``(a, bits)`` of ``base x {0,1}^ell``, named ``a@bits``.
    Letter ``(a, bits)`` has index ``a * 2**ell + int(bits, 2)``."""

    def __init__(self, base: RankedAlphabet, ell: int, cap: int = MAX_MARKS):
        if ell < 1:
            raise ValueError("ell must be positive")
        if ell > cap:
            raise CapExceeded(
                f"{ell} mark coordinates exceed the limit of {cap}; the marked alphabet "
                f"has |base| * 2**ell letters, raise the cap explicitly if that is intended")
        self.base = base
        self.ell = ell
        width = 1 << ell
        self.alphabet = RankedAlphabet(
            (f"{name}@{b:0{ell}b}", r) for name, r in base.symbols for b in range(width))

    def __len__(self):
        return len(self.alphabet)

    def symbol(self, a: int, bits: Sequence[int]) -> int:
        v = 0
        for b in bits:
            v = 2 * v + (1 if b else 0)
        return (a << self.ell) + v

    def split(self, sym: int) -> tuple:
        a, v = divmod(sym, 1 << self.ell)
        return a, tuple((v >> (self.ell - 1 - i)) & 1 for i in range(self.ell))

    @classmethod
    def from_alphabet(cls, alphabet: RankedAlphabet, cap: int = MAX_MARKS) -> "MarkedAlphabet":
        """Recover base and ``ell`` from letter names ``a@bits``."""
        base, ell = [], None
        for name, r in alphabet.symbols:
            a, sep, bits = name.rpartition("@")
            if not sep or not bits or set(bits) - {"0", "1"}:
                raise AlphabetMismatch(f"{name!r} is not a marked letter")
            if ell is None:
                ell = len(bits)
            if (a, r) not in base:
                base.append((a, r))
        if ell is None:
            raise AlphabetMismatch("empty marked alphabet")
        m = cls(RankedAlphabet(base), ell, cap)
        if m.alphabet != alphabet:
            raise AlphabetMismatch("marked letters must list every a@bits in canonical order")
        return m


def mark(t: Tree, sets: Sequence, marked: MarkedAlphabet) -> Tree:
    """Decorate every node of ``t`` with its membership in each set."""
    if len(sets) != marked.ell:
        raise ValueError(f"expected {marked.ell} node sets, got {len(sets)}")
    sets = [frozenset(tuple(a) for a in s) for s in sets]
    valid = set(addresses(t))
    for s in sets:
        for a in s:
            if a not in valid:
                raise InvalidAddress(f"address {a} is not a node of the tree")

    def go(x, addr):
        bits = [addr in s for s in sets]
        return Tree(marked.symbol(x.label, bits),
                    tuple(go(c, addr + (i,)) for i, c in enumerate(x.children, 1)))

    return go(t, ())


def unmark(t: Tree, marked: MarkedAlphabet) -> Tree:
    return Tree(marked.split(t.label)[0], tuple(unmark(c, marked) for c in t.children))


def marking_sets(t: Tree, marked: MarkedAlphabet) -> list:
    """Inverse of :func:`mark` on the decoration."""
    out = [set() for _ in range(marked.ell)]
    for addr in addresses(t):
        _, bits = marked.split(subtree(t, addr).label)
        for i, b in enumerate(bits):
            if b:
                out[i].add(addr)
    return [frozenset(s) for s in out]


def check_unambiguous(A: WeightedTreeAutomaton) -> bool:
    """No tree has two accepting runs: no accepting state is ambiguous and
    no two distinct accepting states are reachable on a common tree."""
    acc = set(A.accepting)
    if not acc:
        return True
    if acc & ambiguous_states(A):
        return False
    if len(acc) > 1:
        for p, q in pair_accessible(A):
            if p != q and p in acc and q in acc:
                return False
    return True


def build_bf(A: WeightedTreeAutomaton, marked: MarkedAlphabet | None = None
             ) -> WeightedTreeAutomaton:
    """Run-counting automaton over the base alphabet.  State ``(q, s)``
    (index ``q * |M| + s``) guesses the marked letter ``s`` read at the
    node where the simulated run is in ``q``."""
    if marked is None:
        marked = MarkedAlphabet.from_alphabet(A.alphabet)
    if marked.alphabet != A.alphabet:
        raise AlphabetMismatch("automaton is not over the given marked alphabet")
    if not check_unambiguous(A):
        raise NotUnambiguous("the query automaton admits two accepting runs on some tree")
    M = len(marked)
    names = [f"({q},{marked.alphabet.name(s)})" for q in A.states for s in range(M)]
    trs = []
    for tr in A.transitions:
        a, _ = marked.split(tr.letter)
        for deco in cartesian(range(M), repeat=len(tr.children)):
            trs.append(Transition(tuple(q * M + s for q, s in zip(tr.children, deco)),
                                  a, tr.target * M + tr.letter, 1))
    acc = {q * M + s: 1 for q in A.accepting for s in range(M)}
    return WeightedTreeAutomaton(marked.base, names, trs, acc)


def query_growth(A: WeightedTreeAutomaton, ell: int | None = None,
                 cap: int = MAX_MARKS, witness: bool = False) -> GrowthReport:
    marked = MarkedAlphabet.from_alphabet(A.alphabet, cap)
    if ell is not None and ell != marked.ell:
        raise AlphabetMismatch(f"automaton uses {marked.ell} mark coordinates, not {ell}")
    return analyze(build_bf(A, marked), witness=witness)


def count_markings(A: WeightedTreeAutomaton, t: Tree, marked: MarkedAlphabet) -> int:
    """Number of ``ell``-tuples of node sets P with ``mark(t, P)`` accepted,
    by trying all of them."""
    from .automaton import count_accepting_runs
    addrs = list(addresses(t))
    total = 0
    for bits in cartesian((0, 1), repeat=marked.ell * len(addrs)):
        sets = [{addrs[j] for j in range(len(addrs)) if bits[i * len(addrs) + j]}
                for i in range(marked.ell)]
        total += count_accepting_runs(A, mark(t, sets, marked)) > 0
    return total


def singleton_query(base: RankedAlphabet) -> WeightedTreeAutomaton:
    """Deterministic automaton for "the marked set is a single node"
    (states ``none`` and ``one``)."""
    marked = MarkedAlphabet(base, 1)
    trs = []
    for a in range(len(base)):
        r = base.rank(a)
        for kids in cartesian((0, 1), repeat=r):
            ones = sum(kids)
            for bit in (0, 1):
                total = ones + bit
                if total <= 1:
                    trs.append(Transition(kids, marked.symbol(a, (bit,)), total))
    return WeightedTreeAutomaton(marked.alphabet, ["none", "one"], trs, {1: 1})


def all_sets_query(base: RankedAlphabet, ell: int = 1) -> WeightedTreeAutomaton:
    """Accepts every marking: one result per tuple of node sets."""
    marked = MarkedAlphabet(base, ell)
    trs = [Transition((0,) * marked.alphabet.rank(s), s, 0) for s in range(len(marked))]
    return WeightedTreeAutomaton(marked.alphabet, ["any"], trs, {0: 1})
