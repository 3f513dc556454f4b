import io
import json
from pathlib import Path

import pytest

from wtagrowth import cli
from wtagrowth.automaton import value
from wtagrowth.core import parse_tree
from wtagrowth.errors import ArityMismatch, TreeSyntaxError, UnknownSymbol
from wtagrowth.formats import (
    automaton_from_dict, automaton_to_dict, parse_automaton, print_automaton,
)
from wtagrowth.gen import corpus, tower_automaton

ROOT = Path(__file__).resolve().parents[1]
EX = ROOT / "docs" / "examples"
GOLDEN = ROOT / "docs" / "golden" / "doubling.mtt"


def run(*argv):
    out = io.StringIO()
    code = cli.main([str(a) for a in argv], out)
    return code, out.getvalue()


def test_format_round_trip():
    for A in corpus(30, 20) + [tower_automaton(2)]:
        assert parse_automaton(print_automaton(A)) == A
        assert automaton_from_dict(json.loads(json.dumps(automaton_to_dict(A)))) == A


def test_format_details():
    A = parse_automaton("""
        # comment
        alphabet { a:2 b:1 c:0 }
        states { q "odd name" }
        accept { q:3 }
        trans { () -c-> q   (q) -b-> "odd name" : 5  ("odd name", q) -a-> q }
    """)
    assert A.accepting == {0: 3}
    assert [t.weight for t in A.transitions] == [1, 5, 1]
    assert '"odd name"' in print_automaton(A)
    assert value(A, parse_tree("a(b(c),c)", A.alphabet)).accepting == 15


@pytest.mark.parametrize("text,err", [
    ("alphabet { a:2 } states { q } trans { (q) -a-> q }", ArityMismatch),
    ("alphabet { c:0 } states { q } trans { () -d-> q }", UnknownSymbol),
    ("alphabet { c:0 } states { q } trans { () -c-> p }", UnknownSymbol),
    ("alphabet { c:0 } states { q } trans { () c-> q }", TreeSyntaxError),
    ("states { q }", TreeSyntaxError),
    ("alphabet { c:0 } states { q } bogus { }", TreeSyntaxError),
])
def test_format_errors(text, err):
    with pytest.raises(err):
        parse_automaton(text)


def test_analyze_exit_codes():
    code, out = run("analyze", EX / "tower2.wta")
    assert code == 0 and json.loads(out)["verdict"] == "Polynomial(4)"
    code, out = run("analyze", EX / "heavy_loop.wta", "--witness")
    d = json.loads(out)
    assert code == 2 and d["verdict"] == "Exponential" and d["witness"]["cycle"] == "b(_HOLE)"
    code, out = run("analyze", EX / "empty.wta")
    assert code == 3 and json.loads(out)["verdict"] == "Empty"


def test_analyze_several_files_in_parallel():
    files = [EX / "tower2.wta", EX / "empty.wta", EX / "heavy_loop.wta"]
    code, text = run("analyze", *files, "--jobs", "2")
    assert code == 3
    doc = json.loads(text)
    assert [r["verdict"] for r in doc["reports"]] == ["Polynomial(4)", "Empty", "Exponential"]
    assert run("analyze", *files) == (code, text)
    assert run("analyze", files[0], files[2])[0] == 2
    assert run("analyze", files[0], "--jobs", "0")[0] == 64


def test_analyze_witness_and_determinism():
    a = run("analyze", EX / "tower2.wta", "--witness")
    b = run("analyze", EX / "tower2.wta", "--witness")
    assert a == b and a[0] == 0
    assert json.loads(a[1])["witness"]["degree"] == 4
    code, out = run("analyze", EX / "tower2.wta", "--timing")
    assert "timing" in json.loads(out)


def test_value_and_runs():
    assert run("value", EX / "heavy_loop.wta", "b(b(b(b(b(c)))))") == (0, "32\n")
    code, out = run("value", EX / "heavy_loop.wta", "b(c)", "--format", "json")
    assert json.loads(out)["accepting"] == "2"
    assert run("count-runs", EX / "tower2.wta", "a(a(b(c),b(c)),a(b(c),b(c)))") == (0, "1\n")


def test_tree_from_file(tmp_path):
    p = tmp_path / "t.term"
    p.write_text("b(b(c))\n")
    assert run("value", EX / "heavy_loop.wta", f"@{p}") == (0, "4\n")


def test_trim_command(tmp_path):
    p = tmp_path / "a.wta"
    p.write_text("alphabet { c:0 } states { q p } accept { q } trans { () -c-> q () -c-> p }")
    code, out = run("trim", p)
    assert code == 0 and parse_automaton(out).states == ("q",)


def test_oracle_commands():
    code, out = run("oracle", "growth", EX / "heavy_loop.wta", "--max-size", "4")
    assert out == "n,maxValue\n1,1\n2,2\n3,4\n4,8\n"
    assert run("oracle", "heavy", EX / "heavy_loop.wta") == (0, "q b(_HOLE)\n")
    assert run("oracle", "barbells", EX / "tower2.wta", "--max-context", "4") == (0, "q' q2\n")


def test_query_commands():
    code, out = run("query", "growth", EX / "singleton.wta")
    assert code == 0 and json.loads(out)["verdict"] == "Polynomial(1)"
    code, out = run("query", "bf", EX / "singleton.wta", "--format", "text")
    assert code == 0 and parse_automaton(out).n == 8


def test_mtt_commands():
    assert run("mtt", "eval", GOLDEN, "S(S(0))") == (0, "a(a(c,b(c)),b(a(c,b(c))))\n")
    code, out = run("mtt", "branches", GOLDEN, "S(0)")
    assert out.split() == sorted(["_MALTESE", "a^(_MALTESE)", "a^(b^(_MALTESE))"])
    code, out = run("mtt", "verify-height", GOLDEN, "S(S(0))")
    assert code == 0 and "result ok" in out and "max_branch_size 5" in out
    code, out = run("mtt", "hat", GOLDEN)
    assert code == 0 and "letter S annotations 30" in out
    assert run("mtt", "eval", GOLDEN, "S(S(S(S(S(S(0))))))")[0] == cli.EXIT_DATA


def test_gen_is_deterministic(tmp_path):
    a = run("gen", "--states", 3, "--seed", 7, "--count", 5)
    b = run("gen", "--states", 3, "--seed", 7, "--count", 5)
    assert a == b and a[1].count("alphabet") == 5
    assert run("gen", "--seed", 7, "--count", 3, "--out", tmp_path)[0] == 0
    assert len(list(tmp_path.glob("*.wta"))) == 3


def test_error_codes(tmp_path):
    assert run("analyze", tmp_path / "missing.wta")[0] == cli.EXIT_USAGE
    bad = tmp_path / "bad.wta"
    bad.write_text("alphabet { a:2 } states { q } trans { (q) -a-> q }")
    assert run("analyze", bad)[0] == cli.EXIT_USAGE
    assert run("frobnicate")[0] == cli.EXIT_USAGE
    assert run("oracle", "growth", EX / "tower2.wta", "--max-size", "0")[0] == cli.EXIT_USAGE
    assert run("value", EX / "tower2.wta", "d")[0] == cli.EXIT_USAGE
    assert run("query", "bf", EX / "tower2.wta")[0] == cli.EXIT_DATA


def test_self_check_failure_exits_70(monkeypatch):
    monkeypatch.setattr(cli, "check_exp_witness", lambda *a: False)
    assert run("analyze", EX / "heavy_loop.wta", "--witness")[0] == cli.EXIT_INTERNAL
