"""Automaton text format and JSON documents.

Text grammar::

    file     := section*
    section  := 'alphabet' '{' (name ':' rank)* '}'
              | 'states'   '{' name* '}'
              | 'accept'   '{' (name [':' weight])* '}'
              | 'trans'    '{' rule* '}'
    rule     := '(' [name (',' name)*] ')' '-' letter '->' name [':' weight]
    name     := ident | '"' any chars but '"' '"'

``#`` starts a comment running to the end of the line.  Weights default to 1.
"""

from __future__ import annotations

import json
import re

from .automaton import Transition, ValueVector, WeightedTreeAutomaton
from .core import IDENT, RankedAlphabet
from .errors import ArityMismatch, TreeSyntaxError, UnknownSymbol

FORMAT = "wta-growth/1"

_TOK = re.compile(rf'({IDENT})|"([^"\n]*)"|(->)|(\S)')
_SKIP = re.compile(r"(?:\s+|#[^\n]*)*")
_PLAIN = re.compile(rf"{IDENT}\Z")


def _tokenize(text):
    out = []
    pos = _SKIP.match(text, 0).end()
    while pos < len(text):
        m = _TOK.match(text, pos)
        if m.group(1) is not None:
            out.append(("id", m.group(1), pos))
        elif m.group(2) is not None:
            out.append(("id", m.group(2), pos))
        else:
            out.append(("p", m.group(0), pos))
        pos = _SKIP.match(text, m.end()).end()
    out.append(("eof", None, len(text)))
    return out


class _Cursor:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def name(self):
        k, v, p = self.take()
        if k != "id":
            raise TreeSyntaxError(f"expected a name, got {v!r}", p)
        return v, p

    def number(self):
        v, p = self.name()
        if not v.isdigit():
            raise TreeSyntaxError(f"expected a number, got {v!r}", p)
        return int(v), p

    def punct(self, val):
        k, v, p = self.take()
        if k != "p" or v != val:
            raise TreeSyntaxError(f"expected {val!r}, got {v!r}", p)

    def accept(self, val):
        k, v, _ = self.peek()
        if k == "p" and v == val:
            self.i += 1
            return True
        return False


def parse_automaton(text: str) -> WeightedTreeAutomaton:
    c = _Cursor(text)
    alphabet = states = None
    accept_raw, trans_raw = [], []
    seen = set()
    while c.peek()[0] != "eof":
        kw, kpos = c.name()
        if kw not in ("alphabet", "states", "accept", "trans"):
            raise TreeSyntaxError(f"unknown section {kw!r}", kpos)
        if kw in seen:
            raise TreeSyntaxError(f"section {kw!r} given twice", kpos)
        seen.add(kw)
        c.punct("{")
        if kw == "alphabet":
            syms = []
            while not c.accept("}"):
                a, _ = c.name()
                c.punct(":")
                syms.append((a, c.number()[0]))
            alphabet = RankedAlphabet(syms)
        elif kw == "states":
            states = []
            while not c.accept("}"):
                states.append(c.name()[0])
        elif kw == "accept":
            while not c.accept("}"):
                q, p = c.name()
                w = c.number()[0] if c.accept(":") else 1
                accept_raw.append((q, w, p))
        else:
            while not c.accept("}"):
                _, _, p = c.peek()
                c.punct("(")
                kids = []
                if not c.accept(")"):
                    while True:
                        kids.append(c.name())
                        if c.accept(")"):
                            break
                        c.punct(",")
                c.punct("-")
                a, apos = c.name()
                c.punct("->")
                q = c.name()
                w = c.number()[0] if c.accept(":") else 1
                trans_raw.append((kids, (a, apos), q, w, p))
    if alphabet is None or states is None:
        raise TreeSyntaxError("'alphabet' and 'states' sections are required", 0)
    sidx = {s: i for i, s in enumerate(states)}
    if len(sidx) != len(states):
        raise TreeSyntaxError("duplicate state names", 0)

    def state(nm):
        name, pos = nm
        if name not in sidx:
            raise UnknownSymbol(f"unknown state {name!r}", pos)
        return sidx[name]

    trs = []
    for kids, (a, apos), q, w, p in trans_raw:
        if alphabet.get(a) is None:
            raise UnknownSymbol(f"unknown letter {a!r}", apos)
        li = alphabet.index(a)
        if alphabet.rank(li) != len(kids):
            raise ArityMismatch(f"{a} has rank {alphabet.rank(li)}, got {len(kids)} states", p)
        trs.append(Transition(tuple(state(k) for k in kids), li, state(q), w))
    acc = {}
    for q, w, p in accept_raw:
        acc[state((q, p))] = w
    return WeightedTreeAutomaton(alphabet, states, trs, acc)


def _name(s: str) -> str:
    return s if _PLAIN.match(s) and s not in ("alphabet", "states", "accept", "trans") \
        else f'"{s}"'


def print_automaton(A: WeightedTreeAutomaton) -> str:
    lines = [f"alphabet {{ {A.alphabet.spec()} }}",
             "states { " + " ".join(_name(s) for s in A.states) + " }",
             "accept { " + " ".join(f"{_name(A.states[q])}:{w}"
                                    for q, w in A.accepting.items()) + " }",
             "trans {"]
    for tr in A.transitions:
        kids = ",".join(_name(A.states[q]) for q in tr.children)
        lines.append(f"  ({kids}) -{A.alphabet.name(tr.letter)}-> "
                     f"{_name(A.states[tr.target])} : {tr.weight}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def automaton_to_dict(A: WeightedTreeAutomaton) -> dict:
    return {
        "format": FORMAT,
        "alphabet": [[n, r] for n, r in A.alphabet.symbols],
        "states": list(A.states),
        "accept": {A.states[q]: str(w) for q, w in A.accepting.items()},
        "transitions": [[[A.states[q] for q in tr.children], A.alphabet.name(tr.letter),
                         A.states[tr.target], str(tr.weight)] for tr in A.transitions],
    }


def automaton_from_dict(d: dict) -> WeightedTreeAutomaton:
    if d.get("format") != FORMAT:
        raise TreeSyntaxError(f"expected format {FORMAT!r}", 0)
    al = RankedAlphabet((n, int(r)) for n, r in d["alphabet"])
    trs = [(kids, a, q, int(w)) for kids, a, q, w in d["transitions"]]
    return WeightedTreeAutomaton.build(al, d["states"], trs,
                                       {q: int(w) for q, w in d["accept"].items()})


def value_to_dict(A: WeightedTreeAutomaton, v: ValueVector) -> dict:
    """Big integers are written as decimal strings."""
    return {"format": FORMAT,
            "per_state": {A.states[q]: str(x) for q, x in enumerate(v.per_state)},
            "accepting": str(v.accepting)}


def dumps(d: dict) -> str:
    return json.dumps(d, indent=2, sort_keys=False, ensure_ascii=False) + "\n"
