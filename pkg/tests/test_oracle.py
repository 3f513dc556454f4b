import pytest

from conftest import build
from wtagrowth.core import IDENTITY, RankedAlphabet, print_context, print_tree
from wtagrowth.errors import CapExceeded, NoNullarySymbol
from wtagrowth.gen import ABC
from wtagrowth.oracle import (
    brute_barbells, brute_growth, brute_heavy, context_value, count_trees, enum_contexts,
    enum_runs, enum_trees,
)

BC = RankedAlphabet.from_spec("b:1 c:0")


def test_enum_trees_small():
    only_c = RankedAlphabet.from_spec("c:0")
    assert [print_tree(t, only_c) for t in enum_trees(only_c, 3)] == ["c"]
    assert [print_tree(t, BC) for t in enum_trees(BC, 3)] == ["c", "b(c)", "b(b(c))"]


def test_enum_trees_counts_match_recurrence():
    trees = list(enum_trees(ABC, 8))
    assert len(trees) == len(set(trees))
    for s in range(1, 9):
        assert sum(1 for t in trees if _size(t) == s) == count_trees(ABC, s)
    assert [count_trees(ABC, s) for s in range(1, 9)] == [1, 1, 2, 4, 9, 21, 51, 127]


def _size(t):
    return 1 + sum(_size(c) for c in t.children)


def test_enum_contexts():
    assert [print_context(c, BC) for c in enum_contexts(BC, 2)] == ["_HOLE", "b(_HOLE)"]
    assert list(enum_contexts(ABC, 1)) == [IDENTITY]
    got = {print_context(c, ABC) for c in enum_contexts(ABC, 3)}
    # by hand: the hole alone, b(_), b(b(_)), a(_,c), a(c,_)
    assert got == {"_HOLE", "b(_HOLE)", "b(b(_HOLE))", "a(_HOLE,c)", "a(c,_HOLE)"}


def test_no_nullary_symbol():
    with pytest.raises(NoNullarySymbol):
        list(enum_trees(RankedAlphabet.from_spec("b:1"), 3))


def test_context_values(heavy_loop, tower1, C):
    assert context_value(heavy_loop, C("b(_HOLE)"), 0, 0) == 2
    assert context_value(tower1, C("b(_HOLE)"), 0, 1) == 1
    assert context_value(tower1, C("b(b(_HOLE))"), 0, 1) == 2
    for q in range(3):
        assert context_value(tower1, IDENTITY, q, q) == 1


def test_enum_runs_cap(tower1, T):
    t = T("a(b(b(b(c))),b(b(b(c))))")
    # the a-node forces q1 on both chains, each with three switch points
    assert sum(1 for _ in enum_runs(tower1, t)) == 9
    with pytest.raises(CapExceeded):
        list(enum_runs(tower1, t, limit=5))


def test_brute_examples(tower1, heavy_loop):
    assert brute_heavy(tower1, 6) is None
    assert brute_barbells(tower1, 6) == {(0, 1)}
    q, ctx = brute_heavy(heavy_loop, 4)
    assert q == 0 and print_context(ctx, ABC) == "b(_HOLE)"
    total = build(["q"], [((), "c", "q"), (("q",), "b", "q"), (("q", "q"), "a", "q")], ["q"])
    assert brute_growth(total, 8) == [1] * 8


def test_brute_growth_tower(tower1):
    # runs on a(b^i(c), b^j(c)) are i * j; the best split of n - 3 b's
    curve = brute_growth(tower1, 9)
    assert curve == [0, 0, 0, 0, 1, 2, 4, 6, 9]


def test_growth_cap(tower1):
    with pytest.raises(CapExceeded):
        brute_growth(tower1, 10, limit=100)
