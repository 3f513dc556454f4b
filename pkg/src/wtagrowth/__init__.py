"""Growth of weighted tree automata: exponential versus polynomial, exact
degrees with pumping witnesses, set-query counting and macro tree
transducer branches."""

from .automaton import (
    Transition, ValueVector, WeightedTreeAutomaton, accessible_states, count_accepting_runs,
    shallow_digraph, trim, value,
)
from .core import (
    Context, RankedAlphabet, Tree, parse_context, parse_tree, print_context, print_tree,
)
from .errors import WtaError
from .formats import parse_automaton, print_automaton
from .growth import (
    Verdict, analyze, barbell_pairs, degrees, exp_witness, has_heavy_cycle, poly_witness,
)
from .mtt import MacroTreeTransducer, branches, hat, mtt_eval, parse_mtt, verify_height_lemma
from .query import build_bf, query_growth

__all__ = [
    "Context", "MacroTreeTransducer", "RankedAlphabet", "Transition", "Tree", "ValueVector",
    "Verdict", "WeightedTreeAutomaton", "WtaError", "accessible_states", "analyze",
    "barbell_pairs", "branches", "build_bf", "count_accepting_runs", "degrees", "exp_witness",
    "has_heavy_cycle", "hat", "mtt_eval", "parse_automaton", "parse_context", "parse_mtt",
    "parse_tree", "poly_witness", "print_automaton", "print_context", "print_tree",
    "query_growth", "shallow_digraph", "trim", "value", "verify_height_lemma",
]
