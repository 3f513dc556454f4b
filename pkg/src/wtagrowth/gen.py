"""Seeded generators: random small automata, the doubling tower family,
chain automata for scaling runs, and random small MTTs."""

from __future__ import annotations

import random

from .automaton import Transition, WeightedTreeAutomaton
from .core import RankedAlphabet

ABC = RankedAlphabet.from_spec("a:2 b:1 c:0")


def random_automaton(rng: random.Random, max_states: int = 4, weights=(1, 2),
                     alphabet: RankedAlphabet = ABC, heavy_weight: float = 0.15
                     ) -> WeightedTreeAutomaton:
    """A random automaton with 2..max_states states.

    Transition counts are drawn per rank (a couple of leaves, n..2n+1
    unary, up to n higher-rank transitions).  Half of the automata are
    layered (children never above the target), which favours barbells, so
    that the corpus mixes empty, bounded, polynomial and exponential
    behaviour.  Weights other
    than the first are used with probability ``heavy_weight``."""
    n = rng.randint(min(2, max_states), max_states)
    layered = rng.random() < 0.5
    states = [f"q{i}" for i in range(n)]
    trs = {}
    for a in range(len(alphabet)):
        r = alphabet.rank(a)
        count = {0: rng.randint(1, 2), 1: rng.randint(n, 2 * n + 1)}.get(r, rng.randint(0, n))
        for _ in range(count):
            q = rng.randrange(n)
            ch = tuple(rng.randrange(q + 1 if layered else n) for _ in range(r))
            w = weights[0]
            if len(weights) > 1 and rng.random() < heavy_weight:
                w = rng.choice(weights[1:])
            trs.setdefault((ch, a, q), w)
    acc = {q: 1 for q in range(n) if rng.random() < 0.4}
    if layered:
        acc[n - 1] = 1
    elif not acc and rng.random() < 0.85:
        acc = {rng.randrange(n): 1}
    return WeightedTreeAutomaton(alphabet, states,
                                 [Transition(ch, a, q, w) for (ch, a, q), w in trs.items()], acc)


def corpus(seed: int, count: int, **kw) -> list:
    rng = random.Random(seed)
    return [random_automaton(rng, **kw) for _ in range(count)]


def tower_automaton(levels: int) -> WeightedTreeAutomaton:
    """Ambiguity grows like n ** (2 ** levels): a b-chain switches once from
    ``q'`` to ``q<levels>``, and every level above joins two copies."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    top = f"q{levels}"
    states = ["q'"] + [f"q{i}" for i in range(levels, -1, -1)]
    trs = [((), "c", "q'"), (("q'",), "b", "q'"), (("q'",), "b", top), ((top,), "b", top)]
    for i in range(levels, 0, -1):
        trs.append(((f"q{i}", f"q{i}"), "a", f"q{i - 1}"))
    return WeightedTreeAutomaton.build(ABC, states, trs, ["q0"])


def chain_automaton(n: int, heavy: bool = False) -> WeightedTreeAutomaton:
    """States ``q0..q{n-1}`` on a b-chain with a self-loop everywhere:
    ``deg(q_i) = i``.  A few binary joins with the unambiguous ``q0`` add
    rank-2 work without changing degrees.  ``heavy`` puts weight 2 on the
    last self-loop, turning the verdict exponential."""
    trs = [Transition((), 2, 0)]
    for i in range(n):
        w = 2 if heavy and i == n - 1 else 1
        trs.append(Transition((i,), 1, i, w))
        if i + 1 < n:
            trs.append(Transition((i,), 1, i + 1))
    for i in range(0, n, max(1, n // 8)):
        trs.append(Transition((i, 0), 0, i))
    return WeightedTreeAutomaton(ABC, [f"q{i}" for i in range(n)], trs, {n - 1: 1})
