"""Macro tree transducers, output branches and the branch transducer.

A rule right-hand side is a tree of :class:`Out` (output letter),
:class:`Call` (``q<x_i>(args)``) and :class:`Param` (``y_j``) nodes.
Evaluation produces ordinary :class:`Tree` values; intermediate results for
states with parameters keep ``y_j`` as leaves labelled ``param_label(j)``.

The branch transducer (``hat``) reads input letters annotated with one
branch choice per (state, branch kind) and outputs single branches of the
original output: unary trees over ``a^`` (one per non-leaf output letter)
and the end marker ``_MALTESE``.
"""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass
from itertools import product as cartesian
from typing import Sequence

from .core import IDENT, RankedAlphabet, Tree, height
from .errors import (
    AlphabetMismatch, AnnotationExplosion, OutputSizeCap, TreeSyntaxError, UnknownSymbol,
    ArityMismatch,
)

OUTPUT_CAP = 10 ** 6
ANNOTATION_CAP = 10 ** 6
MALTESE = "_MALTESE"


def param_label(j: int) -> int:
    """Label of the leaf standing for parameter ``y_j`` (1-based)."""
    return -1 - j


@dataclass(frozen=True, slots=True)
class Out:
    label: int
    children: tuple = ()


@dataclass(frozen=True, slots=True)
class Call:
    state: int
    var: int
    args: tuple = ()


@dataclass(frozen=True, slots=True)
class Param:
    index: int


class MacroTreeTransducer:
    """Deterministic total MTT; state 0 is the root and has rank 0."""

    def __init__(self, input_alphabet: RankedAlphabet, output_alphabet: RankedAlphabet,
                 states: Sequence[tuple], rules: dict):
        self.input = input_alphabet
        self.output = output_alphabet
        self.states = tuple((str(n), int(r)) for n, r in states)
        if not self.states or self.states[0][1] != 0:
            raise ValueError("the first state is the root and must have rank 0")
        self.rules = dict(rules)
        for q in range(len(self.states)):
            for a in range(len(self.input)):
                if (q, a) not in self.rules:
                    raise ValueError(
                        f"missing rule for {self.states[q][0]} on {self.input.name(a)}")
                self._check_rhs(self.rules[(q, a)], q, a)

    def _check_rhs(self, rhs, q, a):
        stack = [rhs]
        while stack:
            r = stack.pop()
            if isinstance(r, Out):
                if self.output.rank(r.label) != len(r.children):
                    raise ArityMismatch(f"output letter {self.output.name(r.label)} arity")
                stack.extend(r.children)
            elif isinstance(r, Call):
                if not 1 <= r.var <= self.input.rank(a):
                    raise ValueError(f"x{r.var} out of range on {self.input.name(a)}")
                if self.states[r.state][1] != len(r.args):
                    raise ArityMismatch(f"state {self.states[r.state][0]} takes "
                                        f"{self.states[r.state][1]} arguments")
                stack.extend(r.args)
            elif isinstance(r, Param):
                if not 1 <= r.index <= self.states[q][1]:
                    raise ValueError(f"y{r.index} out of range for {self.states[q][0]}")
            else:
                raise TypeError(f"bad right-hand side node {r!r}")

    def state_rank(self, q: int) -> int:
        return self.states[q][1]

    def rule(self, q: int, a: int):
        return self.rules[(q, a)]

    def __call__(self, t: Tree, cap: int = OUTPUT_CAP) -> Tree:
        return mtt_eval(self, t, cap)


# -- evaluation ----------------------------------------------------------------

class _Sizer:
    """Expanded sizes and parameter occurrence of shared output trees."""

    def __init__(self):
        self.size = {}
        self.has_param = {}

    def visit(self, t: Tree):
        size, hp = self.size, self.has_param
        if id(t) in size:
            return
        stack = [(t, False)]
        while stack:
            x, ready = stack.pop()
            if id(x) in size:
                continue
            if not ready:
                stack.append((x, True))
                stack.extend((c, False) for c in x.children if id(c) not in size)
                continue
            size[id(x)] = 1 + sum(size[id(c)] for c in x.children)
            hp[id(x)] = x.label <= -2 or any(hp[id(c)] for c in x.children)


def substitute(t: Tree, args: Sequence[Tree], sizer: _Sizer | None = None) -> Tree:
    """Replace parameter leaf ``y_j`` by ``args[j - 1]``, sharing every
    parameter-free subtree."""
    if sizer is None:
        sizer = _Sizer()
    sizer.visit(t)
    hp = sizer.has_param
    if not hp[id(t)]:
        return t
    done = {}
    stack = [(t, False)]
    while stack:
        x, ready = stack.pop()
        if id(x) in done:
            continue
        if x.label <= -2:
            done[id(x)] = args[-1 - x.label - 1]
            continue
        if not hp[id(x)]:
            done[id(x)] = x
            continue
        if not ready:
            stack.append((x, True))
            stack.extend((c, False) for c in x.children if id(c) not in done)
            continue
        done[id(x)] = Tree(x.label, tuple(done[id(c)] for c in x.children))
    return done[id(t)]


def _evaluate(root: int, rule, t: Tree, cap: int) -> Tree:
    """``root<t>`` for a transducer given by ``rule(q, label) -> rhs``.

    Results are memoised per (state, input node); only the pairs reachable
    from the root are computed."""
    # top-down: which (state, node) pairs are needed
    needed = []
    seen = set()
    stack = deque([(root, t)])
    while stack:
        q, x = stack.popleft()
        key = (q, id(x))
        if key in seen:
            continue
        seen.add(key)
        needed.append((q, x))
        rs = [rule(q, x.label)]
        while rs:
            r = rs.pop()
            if isinstance(r, Out):
                rs.extend(r.children)
            elif isinstance(r, Call):
                stack.append((r.state, x.children[r.var - 1]))
                rs.extend(r.args)
    memo = {}
    sizer = _Sizer()

    def inst(r, x):
        if isinstance(r, Out):
            return Tree(r.label, tuple(inst(c, x) for c in r.children))
        if isinstance(r, Param):
            return Tree(param_label(r.index))
        sub = memo[(r.state, id(x.children[r.var - 1]))]
        if not r.args:
            return sub
        return substitute(sub, [inst(a, x) for a in r.args], sizer)

    # breadth-first discovery, so reversed order visits deeper nodes first
    for q, x in reversed(needed):
        out = inst(rule(q, x.label), x)
        sizer.visit(out)
        if sizer.size[id(out)] > cap:
            raise OutputSizeCap(
                f"intermediate output exceeds {cap} nodes; raise the output cap to continue")
        memo[(q, id(x))] = out
    return memo[(root, id(t))]


def mtt_eval(T: MacroTreeTransducer, t: Tree, cap: int = OUTPUT_CAP) -> Tree:
    stack = [t]
    while stack:
        x = stack.pop()
        if not 0 <= x.label < len(T.input) or T.input.rank(x.label) != len(x.children):
            raise AlphabetMismatch("input tree does not fit the transducer's input alphabet")
        stack.extend(x.children)
    return _evaluate(0, T.rule, t, cap)


def output_size(t: Tree) -> int:
    s = _Sizer()
    s.visit(t)
    return s.size[id(t)]


# -- branches ------------------------------------------------------------------

class BranchAlphabet:
    """``_MALTESE`` (rank 0, index 0) and ``a^`` (rank 1) for every output
    letter ``a`` of positive rank, in alphabet order."""

    def __init__(self, gamma: RankedAlphabet):
        self.gamma = gamma
        self._hat = {}
        syms = [(MALTESE, 0)]
        for a in range(len(gamma)):
            if gamma.rank(a) > 0:
                self._hat[a] = len(syms)
                syms.append((f"{gamma.name(a)}^", 1))
        self.alphabet = RankedAlphabet(syms)
        self.maltese = 0

    def hat(self, a: int) -> int:
        return self._hat[a]

    def __len__(self):
        return len(self.alphabet)


def branches(t: Tree, gamma: RankedAlphabet | BranchAlphabet) -> frozenset:
    """All branches of an output tree as unary trees over the branch
    alphabet: ``_MALTESE`` alone, plus ``a^(b)`` for every branch ``b`` of a
    child of an ``a``-node."""
    ba = gamma if isinstance(gamma, BranchAlphabet) else BranchAlphabet(gamma)
    end = Tree(ba.maltese)
    memo = {}
    stack = [(t, False)]
    while stack:
        x, ready = stack.pop()
        if id(x) in memo:
            continue
        if not x.children:
            memo[id(x)] = frozenset([end])
            continue
        if not ready:
            stack.append((x, True))
            stack.extend((c, False) for c in x.children if id(c) not in memo)
            continue
        h = ba.hat(x.label)
        out = {end}
        for c in x.children:
            out.update(Tree(h, (b,)) for b in memo[id(c)])
        memo[id(x)] = frozenset(out)
    return memo[id(t)]


class HatTransducer:
    """The branch transducer of an MTT.

    States are pairs ``(q, alpha)`` with ``alpha = 0`` for ``_MALTESE``
    (rank 0) and ``alpha = j`` for ``y_j`` (rank 1); index order is ``q``
    then ``alpha``, and ``(q0, 0)`` is the root.  Annotated input letters
    are ``a`` plus a mixed-radix index choosing one option per state; the
    letter with index ``i`` is encoded as ``i * |input| + a``.
    """

    def __init__(self, T: MacroTreeTransducer):
        self.T = T
        self.branch_alphabet = BranchAlphabet(T.output)
        self.pairs = [(q, al) for q, (_, r) in enumerate(T.states) for al in range(r + 1)]
        self.index = {p: i for i, p in enumerate(self.pairs)}
        self.states = tuple(
            (f"{T.states[q][0]}^{MALTESE if al == 0 else f'y{al}'}", 0 if al == 0 else 1)
            for q, al in self.pairs)
        self._options = {}

    @property
    def root(self) -> int:
        return self.index[(0, 0)]

    def state_rank(self, s: int) -> int:
        return self.states[s][1]

    def options(self, a: int) -> tuple:
        """Per branch-transducer state, the right-hand sides an annotation
        of letter ``a`` may pick (canonical order)."""
        opts = self._options.get(a)
        if opts is None:
            per = []
            end = Out(self.branch_alphabet.maltese)
            for q, al in self.pairs:
                bs = rhs_branches(self.T, self.T.rule(q, a), self)
                if al == 0:
                    chosen = [b for b in bs if branch_kind(b) == 0]
                else:
                    chosen = [_rename_param(b, 1) for b in bs if branch_kind(b) == al]
                    chosen.append(end)
                per.append(tuple(chosen))
            opts = tuple(per)
            self._options[a] = opts
        return opts

    def count(self, a: int) -> int:
        n = 1
        for o in self.options(a):
            n *= len(o)
        return n

    def label(self, a: int, idx: int) -> int:
        return idx * len(self.T.input) + a

    def split(self, label: int) -> tuple:
        idx, a = divmod(label, len(self.T.input))
        return a, idx

    def choice(self, label: int) -> tuple:
        a, idx = self.split(label)
        opts = self.options(a)
        out = []
        for o in reversed(opts):
            idx, k = divmod(idx, len(o))
            out.append(k)
        if idx:
            raise UnknownSymbol(f"annotation index out of range for {self.T.input.name(a)}")
        return tuple(reversed(out))

    def rule(self, s: int, label: int):
        a, _ = self.split(label)
        return self.options(a)[s][self.choice(label)[s]]

    def name(self, label: int) -> str:
        a, idx = self.split(label)
        return f"{self.T.input.name(a)}.{idx}"

    def project(self, t: Tree) -> Tree:
        return Tree(self.split(t.label)[0], tuple(self.project(c) for c in t.children))

    def __call__(self, t: Tree, cap: int = OUTPUT_CAP) -> Tree:
        return _evaluate(self.root, self.rule, t, cap)


def _rename_param(r, j):
    if isinstance(r, Param):
        return Param(j)
    if isinstance(r, Out):
        return Out(r.label, tuple(_rename_param(c, j) for c in r.children))
    return Call(r.state, r.var, tuple(_rename_param(c, j) for c in r.args))


def branch_kind(b) -> int:
    """0 for a branch ending in ``_MALTESE`` or a rank-0 call, ``j`` for one
    ending in ``y_j``."""
    while True:
        if isinstance(b, Param):
            return b.index
        kids = b.children if isinstance(b, Out) else b.args
        if not kids:
            return 0
        b = kids[0]


def rhs_branches(T: MacroTreeTransducer, rhs, H: HatTransducer | None = None) -> tuple:
    """Branches of a right-hand side, deduplicated, in canonical order.

    Output letters become ``a^`` nodes; ``y_j`` contributes itself and the
    empty branch; a call ``q<x_i>(r_1..r_m)`` contributes the rank-0 call
    ``(q, 0)<x_i>`` and, for every branch ``b`` of ``r_j``, the unary call
    ``(q, j)<x_i>(b)``."""
    if H is None:
        H = HatTransducer(T)
    ba = H.branch_alphabet
    end = Out(ba.maltese)

    def go(r):
        if isinstance(r, Param):
            return {end, r}
        if isinstance(r, Out):
            if not r.children:
                return {end}
            h = ba.hat(r.label)
            out = {end}
            for c in r.children:
                out.update(Out(h, (b,)) for b in go(c))
            return out
        out = {end, Call(H.index[(r.state, 0)], r.var, ())}
        for j, arg in enumerate(r.args, 1):
            s = H.index[(r.state, j)]
            out.update(Call(s, r.var, (b,)) for b in go(arg))
        return out

    return tuple(sorted(go(rhs), key=lambda b: _branch_key(b)))


def _branch_key(b):
    out = []
    while True:
        if isinstance(b, Param):
            out.append((2, b.index, 0))
            break
        if isinstance(b, Out):
            out.append((0, b.label, 0))
            if not b.children:
                break
            b = b.children[0]
        else:
            out.append((1, b.state, b.var))
            if not b.args:
                break
            b = b.args[0]
    return (len(out), out)


def hat(T: MacroTreeTransducer) -> HatTransducer:
    return HatTransducer(T)


# -- the height lemma ----------------------------------------------------------

@dataclass
class HeightReport:
    height: int
    max_branch_size: int
    annotations: int
    distinct_outputs: int
    membership: bool

    @property
    def ok(self) -> bool:
        return self.membership and self.max_branch_size == self.height + 1


def annotation_count(H: HatTransducer, t: Tree) -> int:
    n = 1
    stack = [t]
    while stack:
        x = stack.pop()
        n *= H.count(x.label)
        stack.extend(x.children)
    return n


def hat_outputs(H: HatTransducer, t: Tree, max_vectors: int = ANNOTATION_CAP) -> set:
    """Every output of the branch transducer over all annotations of ``t``.

    Works bottom-up on joint vectors (one result per transducer state) so
    that annotations with identical effect are merged."""
    nstates = len(H.states)
    sizer = _Sizer()

    def inst(r, vecs):
        if isinstance(r, Out):
            return Tree(r.label, tuple(inst(c, vecs) for c in r.children))
        if isinstance(r, Param):
            return Tree(param_label(r.index))
        sub = vecs[r.var - 1][r.state]
        if not r.args:
            return sub
        return substitute(sub, [inst(a, vecs) for a in r.args], sizer)

    memo = {}
    stack = [(t, False)]
    while stack:
        x, ready = stack.pop()
        if id(x) in memo:
            continue
        if not ready:
            stack.append((x, True))
            stack.extend((c, False) for c in x.children)
            continue
        opts = H.options(x.label)
        out = set()
        for vecs in cartesian(*(memo[id(c)] for c in x.children)):
            per = [list(dict.fromkeys(inst(r, vecs) for r in opts[s])) for s in range(nstates)]
            for v in cartesian(*per):
                out.add(v)
                if len(out) > max_vectors:
                    raise AnnotationExplosion(
                        f"more than {max_vectors} distinct annotation effects below one node")
        memo[id(x)] = out
    return {v[H.root] for v in memo[id(t)]}


def enumerate_annotations(H: HatTransducer, t: Tree, cap: int = ANNOTATION_CAP):
    """Every annotated tree projecting to ``t`` (literal enumeration)."""
    total = annotation_count(H, t)
    if total > cap:
        raise AnnotationExplosion(f"{total} annotations exceed the cap of {cap}")
    nodes = []
    stack = [t]
    while stack:
        x = stack.pop()
        nodes.append(x)
        stack.extend(x.children)

    def build(x, pick):
        return Tree(H.label(x.label, pick[id(x)]),
                    tuple(build(c, pick) for c in x.children))

    for combo in cartesian(*(range(H.count(x.label)) for x in nodes)):
        yield build(t, {id(x): i for x, i in zip(nodes, combo)})


def verify_height_lemma(T: MacroTreeTransducer, t: Tree, max_vectors: int = ANNOTATION_CAP,
                        literal: bool = False, cap: int = OUTPUT_CAP) -> HeightReport:
    """Check on ``t`` that every annotated run of the branch transducer
    outputs a branch of ``T(t)`` and that the longest has height + 1 nodes.
    ``literal`` enumerates annotations one by one instead of merging them."""
    H = HatTransducer(T)
    out = mtt_eval(T, t, cap)
    allowed = branches(out, H.branch_alphabet)
    if literal:
        results = {H(u, cap) for u in enumerate_annotations(H, t, max_vectors)}
    else:
        results = hat_outputs(H, t, max_vectors)
    best = max(output_size(r) for r in results)
    return HeightReport(height(out), best, annotation_count(H, t), len(results),
                        all(r in allowed for r in results))


# -- text format ---------------------------------------------------------------

_TOK = re.compile(rf"({IDENT})|(\S)")
_SKIP = re.compile(r"(?:\s+|#[^\n]*)*")


def _tokenize(text):
    out = []
    pos = _SKIP.match(text, 0).end()
    while pos < len(text):
        m = _TOK.match(text, pos)
        kind = "id" if m.group(1) is not None else "p"
        out.append((kind, m.group(0), pos))
        pos = _SKIP.match(text, m.end()).end()
    out.append(("eof", None, len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        k, v, p = self.next()
        if v != val or (k == "id") != (val.isidentifier() or val[0].isalnum()):
            raise TreeSyntaxError(f"expected {val!r}, got {v!r}", p)
        return p

    def ident(self):
        k, v, p = self.next()
        if k != "id":
            raise TreeSyntaxError(f"expected a name, got {v!r}", p)
        return v, p

    def accept(self, val):
        k, v, _ = self.peek()
        if v == val and k == "p":
            self.i += 1
            return True
        return False


def _var_index(name, prefix, pos):
    if not (name.startswith(prefix) and name[1:].isdigit() and int(name[1:]) >= 1):
        raise TreeSyntaxError(f"expected {prefix}1, {prefix}2, ...; got {name!r}", pos)
    return int(name[1:])


def parse_mtt(text: str) -> MacroTreeTransducer:
    """Parse the transducer text format (see docs/mtt-format.md)."""
    p = _Parser(text)
    alph = {}
    states = []
    sidx = {}
    raw_rules = []
    while p.peek()[0] != "eof":
        kw, kpos = p.ident()
        if kw in ("input", "output"):
            p.expect("{")
            syms = []
            while not p.accept("}"):
                name, _ = p.ident()
                p.expect(":")
                r, rpos = p.ident()
                if not r.isdigit():
                    raise TreeSyntaxError("rank must be a number", rpos)
                syms.append((name, int(r)))
            alph[kw] = RankedAlphabet(syms)
            p.accept(";")
        elif kw == "state":
            name, npos = p.ident()
            p.expect(":")
            r, rpos = p.ident()
            if not r.isdigit():
                raise TreeSyntaxError("rank must be a number", rpos)
            if name in sidx:
                raise TreeSyntaxError(f"state {name!r} declared twice", npos)
            sidx[name] = len(states)
            states.append((name, int(r)))
            p.expect(";")
        elif kw == "rule":
            raw_rules.append(p.i)
            # skip to ';' and parse once alphabets are known
            depth = 0
            while True:
                k, v, pos = p.next()
                if k == "eof":
                    raise TreeSyntaxError("unterminated rule", pos)
                if v in "([" and k == "p":
                    depth += 1
                elif v in ")]" and k == "p":
                    depth -= 1
                elif v == ";" and k == "p" and depth == 0:
                    break
        else:
            raise TreeSyntaxError(f"unknown declaration {kw!r}", kpos)
    if "input" not in alph or "output" not in alph:
        raise TreeSyntaxError("both 'input { ... }' and 'output { ... }' are required", 0)
    sin, sout = alph["input"], alph["output"]
    rules = {}
    for start in raw_rules:
        p.i = start
        qn, qpos = p.ident()
        if qn not in sidx:
            raise UnknownSymbol(f"unknown state {qn!r}", qpos)
        q = sidx[qn]
        p.expect("(")
        an, apos = p.ident()
        if an not in sin._index:
            raise UnknownSymbol(f"unknown input letter {an!r}", apos)
        a = sin.index(an)
        nvars = 0
        if p.accept("("):
            while True:
                v, vpos = p.ident()
                nvars += 1
                if _var_index(v, "x", vpos) != nvars:
                    raise TreeSyntaxError("input variables must be x1, x2, ... in order", vpos)
                if not p.accept(","):
                    break
            p.expect(")")
        if nvars != sin.rank(a):
            raise ArityMismatch(f"{an} has rank {sin.rank(a)}", apos)
        p.expect(")")
        nparams = 0
        if p.accept("("):
            while True:
                v, vpos = p.ident()
                nparams += 1
                if _var_index(v, "y", vpos) != nparams:
                    raise TreeSyntaxError("parameters must be y1, y2, ... in order", vpos)
                if not p.accept(","):
                    break
            p.expect(")")
        if nparams != states[q][1]:
            raise ArityMismatch(f"state {qn} has rank {states[q][1]}", qpos)
        p.expect("=")
        rhs = _parse_rhs(p, sidx, states, sout, nparams, sin.rank(a))
        p.expect(";")
        if (q, a) in rules:
            raise TreeSyntaxError(f"duplicate rule for {qn} on {an}", qpos)
        rules[(q, a)] = rhs
    return MacroTreeTransducer(sin, sout, states, rules)


def _parse_rhs(p, sidx, states, sout, nparams, nvars):
    name, pos = p.ident()
    if p.accept("["):
        if name not in sidx:
            raise UnknownSymbol(f"unknown state {name!r}", pos)
        v, vpos = p.ident()
        i = _var_index(v, "x", vpos)
        if i > nvars:
            raise TreeSyntaxError(f"{v} is not bound by this rule", vpos)
        p.expect("]")
        args = []
        if p.accept("("):
            while True:
                args.append(_parse_rhs(p, sidx, states, sout, nparams, nvars))
                if not p.accept(","):
                    break
            p.expect(")")
        q = sidx[name]
        if len(args) != states[q][1]:
            raise ArityMismatch(f"state {name} takes {states[q][1]} arguments", pos)
        return Call(q, i, tuple(args))
    if (name.startswith("y") and name[1:].isdigit() and name not in sout._index):
        j = int(name[1:])
        if not 1 <= j <= nparams:
            raise TreeSyntaxError(f"{name} is not a parameter of this rule", pos)
        return Param(j)
    if name not in sout._index:
        raise UnknownSymbol(f"unknown output letter {name!r}", pos)
    a = sout.index(name)
    kids = []
    if p.accept("("):
        while True:
            kids.append(_parse_rhs(p, sidx, states, sout, nparams, nvars))
            if not p.accept(","):
                break
        p.expect(")")
    if len(kids) != sout.rank(a):
        raise ArityMismatch(f"{name} expects {sout.rank(a)} children", pos)
    return Out(a, tuple(kids))


def print_rhs(r, T: MacroTreeTransducer, out_alphabet=None, state_names=None) -> str:
    al = out_alphabet or T.output
    names = state_names or [n for n, _ in T.states]
    if isinstance(r, Param):
        return f"y{r.index}"
    if isinstance(r, Out):
        if not r.children:
            return al.name(r.label)
        return f"{al.name(r.label)}({','.join(print_rhs(c, T, al, names) for c in r.children)})"
    s = f"{names[r.state]}[x{r.var}]"
    if r.args:
        s += "(" + ",".join(print_rhs(c, T, al, names) for c in r.args) + ")"
    return s


def print_mtt(T: MacroTreeTransducer) -> str:
    lines = ["input { " + T.input.spec() + " }", "output { " + T.output.spec() + " }"]
    for n, r in T.states:
        lines.append(f"state {n}:{r};")
    for q, (qn, qr) in enumerate(T.states):
        for a in range(len(T.input)):
            k = T.input.rank(a)
            lhs = T.input.name(a)
            if k:
                lhs += "(" + ",".join(f"x{i}" for i in range(1, k + 1)) + ")"
            params = "(" + ",".join(f"y{j}" for j in range(1, qr + 1)) + ")" if qr else ""
            lines.append(f"rule {qn}({lhs}){params} = {print_rhs(T.rule(q, a), T)};")
    return "\n".join(lines) + "\n"


def print_output(t: Tree, alphabet: RankedAlphabet) -> str:
    """Print an output tree; parameter leaves show as ``y_j``."""
    if t.label <= -2:
        return f"y{-1 - t.label}"
    if not t.children:
        return alphabet.name(t.label)
    return f"{alphabet.name(t.label)}({','.join(print_output(c, alphabet) for c in t.children)})"


# -- random transducers --------------------------------------------------------

SMALL_INPUT = RankedAlphabet.from_spec("g:2 S:1 0:0")
SMALL_OUTPUT = RankedAlphabet.from_spec("a:2 b:1 c:0")


def random_mtt(rng: random.Random, max_rhs: int = 5) -> MacroTreeTransducer:
    """At most two states (root of rank 0, optional second state of rank 0
    or 1) with right-hand sides of at most ``max_rhs`` nodes."""
    states = [("q0", 0)]
    if rng.random() < 0.75:
        states.append(("q1", rng.randint(0, 1)))
    sin, sout = SMALL_INPUT, SMALL_OUTPUT

    def rhs(budget, q, a):
        choices = []
        nvars, nparams = sin.rank(a), states[q][1]
        if nparams:
            choices.append("param")
        choices.append("leaf")
        if budget >= 2:
            choices += ["out1", "out2"] if budget >= 3 else ["out1"]
        if nvars:
            choices += ["call"] * 2
        kind = rng.choice(choices)
        if kind == "param":
            return Param(1), 1
        if kind == "leaf":
            return Out(sout.index("c")), 1
        if kind == "call":
            s = rng.randrange(len(states))
            i = rng.randint(1, nvars)
            if states[s][1] == 0:
                return Call(s, i), 1
            if budget < 2:
                return Call(0, i), 1
            arg, used = rhs(budget - 1, q, a)
            return Call(s, i, (arg,)), used + 1
        if kind == "out1":
            arg, used = rhs(budget - 1, q, a)
            return Out(sout.index("b"), (arg,)), used + 1
        left, u1 = rhs(budget - 2, q, a)
        right, u2 = rhs(max(1, budget - 1 - u1), q, a)
        return Out(sout.index("a"), (left, right)), u1 + u2 + 1

    rules = {}
    for q in range(len(states)):
        for a in range(len(sin)):
            rules[(q, a)] = rhs(max_rhs, q, a)[0]
    return MacroTreeTransducer(sin, sout, states, rules)
