import pytest

from wtagrowth.automaton import WeightedTreeAutomaton
from wtagrowth.core import parse_context, parse_tree
from wtagrowth.gen import ABC, tower_automaton


@pytest.fixture
def tower1():
    return tower_automaton(1)


@pytest.fixture
def heavy_loop():
    return WeightedTreeAutomaton.build(ABC, ["q"], [((), "c", "q"), (("q",), "b", "q", 2)], ["q"])


@pytest.fixture
def T():
    return lambda s: parse_tree(s, ABC)


@pytest.fixture
def C():
    return lambda s: parse_context(s, ABC)


def build(states, trs, acc, alphabet=ABC):
    return WeightedTreeAutomaton.build(alphabet, states, trs, acc)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
