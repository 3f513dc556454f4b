import random
from collections import Counter

import pytest

from conftest import build
from wtagrowth.automaton import (
    Run, Transition, WeightedTreeAutomaton, accessible_states, ambiguous_states, check_run,
    coaccessible_states, count_accepting_runs, is_trim, pair_accessible, product, scc,
    scc_arrays, shallow_digraph, trim, value,
)
from wtagrowth.core import RankedAlphabet
from wtagrowth.errors import AlphabetMismatch, InvalidRun
from wtagrowth.gen import ABC, corpus, tower_automaton
from wtagrowth.oracle import enum_runs, enum_trees, run_weight

import numpy as np

ACD = RankedAlphabet.from_spec("a:2 b:1 c:0 d:0")


def test_single_leaf_value(T):
    A = build(["q"], [((), "c", "q")], ["q"])
    v = value(A, T("c"))
    assert v.per_state == (1,) and v.accepting == 1


def test_weight_two_loop_doubles(heavy_loop, T):
    assert value(heavy_loop, T("b(b(b(b(b(c)))))")).accepting == 32
    t = T("c")
    for _ in range(70):
        t = T("b(c)")._replace(children=(t,))
    assert value(heavy_loop, t).accepting == 2 ** 70


def test_accepting_weights_scale(T):
    A = build(["q"], [((), "c", "q")], {"q": 3})
    assert value(A, T("c")).accepting == 3


def test_tower_run_counts(tower1, T):
    # frozen from brute-force run enumeration
    assert count_accepting_runs(tower1, T("a(b(c),b(c))")) == 1
    assert count_accepting_runs(tower1, T("a(b(b(c)),b(b(c)))")) == 4
    assert count_accepting_runs(tower1, T("b(c)")) == 0


def test_empty_accepting_set_counts_zero(T):
    A = build(["q"], [((), "c", "q"), (("q",), "b", "q")], [])
    assert count_accepting_runs(A, T("b(b(c))")) == 0


def test_value_matches_run_enumeration():
    rng = random.Random(11)
    trees = list(enum_trees(ABC, 6))
    for A in corpus(3, 30):
        for t in rng.sample(trees, 8):
            by_root = Counter()
            for r in enum_runs(A, t):
                by_root[r.root] += run_weight(A, t, r)
            assert value(A, t).per_state == tuple(by_root[q] for q in range(A.n))


def test_check_run(tower1, T):
    t = T("a(b(c),b(c))")
    (run,) = [r for r in enum_runs(tower1, t) if r.root == 2]
    used = check_run(tower1, t, run)
    assert [a for a, _ in used] == [(), (1,), (1, 1), (2,), (2, 1)]
    bad = Run({**run.assignment, (): 0})
    with pytest.raises(InvalidRun):
        check_run(tower1, t, bad)


def test_accessible_examples(tower1):
    assert accessible_states(build(["q"], [((), "c", "q")], [])) == {0}
    assert accessible_states(build(["q"], [(("q", "q"), "a", "q")], [])) == frozenset()
    assert accessible_states(tower1) == {0, 1, 2}


def test_accessible_matches_runs():
    trees = list(enum_trees(ABC, 7))
    for A in corpus(4, 40):
        seen = {r.root for t in trees for r in enum_runs(A, t)}
        acc = accessible_states(A)
        assert seen <= acc
        # every accessible state of an automaton this small shows up within size 7
        assert acc == seen


def test_shallow_digraph_examples(tower1):
    A = build(["q'", "q"], [((), "c", "q'"), (("q'",), "b", "q")], [])
    assert shallow_digraph(A).edges == {(0, 1)}
    B = build(["p", "q", "r"], [((), "c", "p"), (("p", "q"), "a", "r")], [])
    assert shallow_digraph(B).edges == {(1, 2)}
    assert shallow_digraph(tower1).edges == {(0, 0), (0, 1), (1, 1), (1, 2)}


def test_trim_examples(T):
    A = build(["q", "p"], [((), "c", "q"), ((), "c", "p")], ["q"])
    B = trim(A)
    assert B.states == ("q",) and len(B.transitions) == 1 and B.origin == (0,)
    assert trim(B) == B and is_trim(B)
    E = trim(build(["q"], [((), "c", "q")], []))
    assert E.n == 0


def test_trim_preserves_values():
    rng = random.Random(5)
    trees = list(enum_trees(ABC, 8))
    for A in corpus(6, 30):
        B = trim(A)
        assert is_trim(B) or B.n == 0
        for t in rng.sample(trees, 10):
            assert value(A, t).accepting == value(B, t).accepting


def test_coaccessible(tower1):
    A = build(["q", "p", "r"], [((), "c", "q"), (("q",), "b", "r"), ((), "c", "p")], ["r"])
    assert coaccessible_states(A) == {0, 2}
    assert coaccessible_states(tower1) == {0, 1, 2}


def test_product_examples():
    A = build(["q", "p"], [((), "c", "q"), ((), "c", "p")], [])
    P = product(A, A)
    assert P.n == 4 and {t.target for t in P.transitions} == {0, 1, 2, 3}
    D = build(["q"], [((), "c", "q"), (("q",), "b", "q")], ["q"])
    assert len(product(D, D).transitions) == 2
    with pytest.raises(AlphabetMismatch):
        product(A, WeightedTreeAutomaton(ACD, ["q"], [], {}))


def test_scc_examples(tower1):
    s = scc_arrays(3, np.zeros(0, np.int64), np.zeros(0, np.int64))
    assert s.ncomp == 3 and not s.cyclic.any()
    s = scc_arrays(1, np.array([0]), np.array([0]))
    assert s.ncomp == 1 and s.cyclic.all()
    s = scc(shallow_digraph(tower1))
    assert sorted(map(sorted, s.components())) == [[0], [1], [2]]
    assert [bool(s.cyclic[s.comp[q]]) for q in range(3)] == [True, True, False]


def test_scc_sinks_first():
    s = scc_arrays(3, np.array([0, 1]), np.array([1, 2]))
    assert s.comp[2] < s.comp[1] < s.comp[0]


def test_ambiguous_examples(tower1):
    D = build(["q"], [((), "c", "q"), (("q",), "b", "q")], ["q"])
    assert ambiguous_states(D) == frozenset()
    assert ambiguous_states(tower1) == {1, 2}
    A = build(["q", "p", "r"], [((), "c", "q"), ((), "c", "p"), (("q",), "b", "r"),
                                (("p",), "b", "r")], ["r"])
    assert ambiguous_states(A) == {2}


def test_ambiguous_matches_runs():
    trees = list(enum_trees(ABC, 7))
    for A in corpus(7, 40):
        seen = set()
        for t in trees:
            c = Counter(r.root for r in enum_runs(A, t))
            seen |= {q for q, k in c.items() if k >= 2}
        assert seen <= ambiguous_states(A)


def test_pair_accessible_examples():
    A = build(["q", "p"], [((), "c", "q"), ((), "c", "p")], [])
    assert pair_accessible(A) == {(0, 0), (0, 1), (1, 0), (1, 1)}
    B = WeightedTreeAutomaton.build(ACD, ["q", "p"], [((), "c", "q"), ((), "d", "p")], [])
    assert (0, 1) not in pair_accessible(B)
    for A in corpus(8, 20):
        acc = accessible_states(A)
        assert {q for q, p in pair_accessible(A) if q == p} == acc


def test_pair_accessible_matches_runs():
    trees = list(enum_trees(ABC, 7))
    for A in corpus(9, 30):
        seen = set()
        for t in trees:
            roots = {r.root for r in enum_runs(A, t)}
            seen |= {(p, q) for p in roots for q in roots}
        assert seen <= pair_accessible(A)


def test_validation():
    with pytest.raises(AlphabetMismatch):
        WeightedTreeAutomaton(ABC, ["q"], [Transition((0,), 0, 0)], {})
    with pytest.raises(ValueError):
        WeightedTreeAutomaton(ABC, ["q"], [Transition((), 2, 0, 0)], {})
    with pytest.raises(ValueError):
        WeightedTreeAutomaton(ABC, ["q"], [Transition((), 2, 0), Transition((), 2, 0, 2)], {})
    with pytest.raises(ValueError):
        WeightedTreeAutomaton(ABC, ["q", "q"], [], {})


def test_tower_sizes():
    for n in range(1, 5):
        assert tower_automaton(n).n == n + 2
