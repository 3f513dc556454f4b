import random
from pathlib import Path

import pytest

from wtagrowth.core import RankedAlphabet, Tree, height, parse_tree, print_tree
from wtagrowth.errors import (
    AlphabetMismatch, AnnotationExplosion, ArityMismatch, OutputSizeCap, TreeSyntaxError,
    UnknownSymbol,
)
from wtagrowth.mtt import (
    Call, Out, Param, HatTransducer, annotation_count, branch_kind,
    branches, enumerate_annotations, hat, mtt_eval, output_size, parse_mtt, print_mtt,
    print_output, print_rhs, random_mtt, rhs_branches, verify_height_lemma,
)

GOLDEN = Path(__file__).resolve().parents[1] / "docs" / "golden" / "doubling.mtt"
ABC = RankedAlphabet.from_spec("a:2 b:1 c:0")


@pytest.fixture(scope="module")
def doubling():
    return parse_mtt(GOLDEN.read_text())


def s_chain(T, n):
    return parse_tree("S(" * n + "0" + ")" * n, T.input)


def naive(T, q, t, args):
    """Direct recursive semantics, no sharing and no memo."""
    def inst(r):
        if isinstance(r, Out):
            return Tree(r.label, tuple(inst(c) for c in r.children))
        if isinstance(r, Param):
            return args[r.index - 1]
        return naive(T, r.state, t.children[r.var - 1], [inst(a) for a in r.args])
    return inst(T.rule(q, t.label))


def test_golden_output(doubling):
    out = mtt_eval(doubling, parse_tree("S(S(0))", doubling.input))
    assert print_output(out, doubling.output) == "a(a(c,b(c)),b(a(c,b(c))))"
    assert print_output(doubling(parse_tree("0", doubling.input)), doubling.output) == "b(c)"


def test_output_height_doubles(doubling):
    for n in range(1, 5):
        assert height(doubling(s_chain(doubling, n))) == 2 ** n


def test_rank_zero_transducer():
    T = parse_mtt("input { c:0 } output { d:0 } state q0:0; rule q0(c) = d;")
    assert print_output(T(parse_tree("c", T.input)), T.output) == "d"


def test_matches_naive_semantics():
    rng = random.Random(4)
    inputs = ["0", "S(0)", "S(S(0))", "g(0,0)", "g(S(0),0)", "S(g(0,S(0)))"]
    for _ in range(60):
        T = random_mtt(rng)
        for s in inputs:
            t = parse_tree(s, T.input)
            assert mtt_eval(T, t) == naive(T, 0, t, [])


def test_output_cap(doubling):
    with pytest.raises(OutputSizeCap):
        mtt_eval(doubling, s_chain(doubling, 6))
    sizes = [output_size(mtt_eval(doubling, s_chain(doubling, n))) for n in range(1, 6)]
    assert sizes == [4, 10, 46, 766, 196606]
    for n in range(1, 5):
        assert _tree_size(naive(doubling, 0, s_chain(doubling, n), [])) == sizes[n - 1]
    with pytest.raises(OutputSizeCap):
        mtt_eval(doubling, s_chain(doubling, 5), cap=10 ** 5)


def test_input_alphabet_checked(doubling):
    with pytest.raises(AlphabetMismatch):
        mtt_eval(doubling, Tree(5))


def test_branches_figure():
    t = parse_tree("a(b(b(c)),a(b(c),c))", ABC)
    H_alpha = HatTransducer(parse_mtt("input { z:0 } output { a:2 b:1 c:0 } state q0:0; "
                                      "rule q0(z) = c;")).branch_alphabet
    got = {print_tree(b, H_alpha.alphabet) for b in branches(t, ABC)}
    assert got == {"_MALTESE", "a^(_MALTESE)", "a^(b^(_MALTESE))", "a^(b^(b^(_MALTESE)))",
                   "a^(a^(b^(_MALTESE)))", "a^(a^(_MALTESE))"}
    assert max(output_size(b) for b in branches(t, ABC)) == 4 == height(t) + 1
    assert {print_tree(b, H_alpha.alphabet) for b in branches(parse_tree("c", ABC), ABC)} \
        == {"_MALTESE"}


def test_branches_height_law():
    rng = random.Random(9)
    for _ in range(40):
        T = random_mtt(rng)
        out = T(parse_tree("S(g(0,S(0)))", T.input))
        assert max(output_size(b) for b in branches(out, T.output)) == height(out) + 1


def test_rhs_branches(doubling):
    H = hat(doubling)
    names = [n for n, _ in H.states]
    al = H.branch_alphabet.alphabet

    def show(r):
        return {print_rhs(b, doubling, al, names) for b in rhs_branches(doubling, r, H)}

    assert show(Param(1)) == {"_MALTESE", "y1"}
    b, c = doubling.output.index("b"), doubling.output.index("c")
    assert show(Out(b, (Out(c),))) == {"_MALTESE", "b^(_MALTESE)"}
    assert show(Call(1, 1, (Out(c),))) == {"_MALTESE", "q1^_MALTESE[x1]",
                                           "q1^y1[x1](_MALTESE)"}
    assert branch_kind(Param(1)) == 1 and branch_kind(Call(1, 1)) == 0


def test_hat_shape(doubling):
    H = hat(doubling)
    assert len(H.states) == sum(1 + r for _, r in doubling.states) == 3
    assert H.states[H.root] == ("q0^_MALTESE", 0)
    assert [H.count(a) for a in range(len(doubling.input))] == [30, 18]
    t = s_chain(doubling, 4)
    assert annotation_count(H, t) == 30 ** 4 * 18
    assert H.project(Tree(H.label(0, 7), (Tree(H.label(1, 3)),))) == parse_tree("S(0)",
                                                                              doubling.input)


def test_hat_outputs_are_branches(doubling):
    H = hat(doubling)
    t = s_chain(doubling, 1)
    allowed = branches(doubling(t), H.branch_alphabet)
    outs = {H(u) for u in enumerate_annotations(H, t)}
    assert outs <= allowed
    letters = {x.label for o in outs for x in _nodes(o)}
    assert letters <= set(range(len(H.branch_alphabet)))


def _tree_size(t):
    return 1 + sum(_tree_size(c) for c in t.children)


def _nodes(t):
    yield t
    for c in t.children:
        yield from _nodes(c)


def test_constant_transducer():
    T = parse_mtt("input { S:1 0:0 } output { c:0 } state q0:0; rule q0(S(x1)) = c; "
                  "rule q0(0) = c;")
    H = hat(T)
    t = parse_tree("S(S(0))", T.input)
    assert {H(u) for u in enumerate_annotations(H, t)} == {Tree(H.branch_alphabet.maltese)}
    r = verify_height_lemma(T, t)
    assert r.ok and r.height + 1 == r.max_branch_size == 1


def test_height_lemma_doubling(doubling):
    for n in range(0, 5):
        r = verify_height_lemma(doubling, s_chain(doubling, n))
        assert r.ok and r.membership
        expected = 2 ** n if n else 1
        assert r.height == expected and r.max_branch_size == expected + 1


def test_height_lemma_s_s_0(doubling):
    # exhaustive over all 16200 annotations
    r = verify_height_lemma(doubling, s_chain(doubling, 2), literal=True)
    assert (r.height, r.max_branch_size, r.annotations) == (4, 5, 16200)
    assert r.membership


def test_merged_and_literal_agree():
    rng = random.Random(17)
    for _ in range(25):
        T = random_mtt(rng)
        for s in ["S(0)", "g(0,0)", "S(S(0))"]:
            t = parse_tree(s, T.input)
            a = verify_height_lemma(T, t)
            b = verify_height_lemma(T, t, literal=True)
            assert (a.max_branch_size, a.distinct_outputs, a.membership) == \
                   (b.max_branch_size, b.distinct_outputs, b.membership)
            assert a.ok


def test_annotation_cap(doubling):
    with pytest.raises(AnnotationExplosion):
        list(enumerate_annotations(hat(doubling), s_chain(doubling, 3), cap=1000))


def test_text_round_trip(doubling):
    again = parse_mtt(print_mtt(doubling))
    assert again.rules == doubling.rules and again.states == doubling.states
    rng = random.Random(2)
    for _ in range(20):
        T = random_mtt(rng)
        assert parse_mtt(print_mtt(T)).rules == T.rules


@pytest.mark.parametrize("text,err", [
    ("output { c:0 } state q0:0;", TreeSyntaxError),
    ("input { z:0 } output { c:0 } state q0:0; rule q0(z) = d;", UnknownSymbol),
    ("input { z:0 } output { c:0 } state q0:0; rule q1(z) = c;", UnknownSymbol),
    ("input { z:1 } output { c:0 } state q0:0; rule q0(z) = c;", ArityMismatch),
    ("input { z:0 } output { c:0 } state q0:0; rule q0(z) = q0[x1];", TreeSyntaxError),
    ("input { z:0 } output { c:0 } state q0:0; rule q0(z)(y1) = c;", ArityMismatch),
    ("input { z:0 } output { c:0 } state q0:0; rule q0(z) = c", TreeSyntaxError),
    ("input { z:0 } output { c:0 } state q0:0;", ValueError),
    ("input { z:0 } output { c:0 } state q0:1; rule q0(z)(y1) = y1;", ValueError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_mtt(text)
