"""Ranked alphabets, trees, one-hole contexts and the term syntax.

Trees are plain immutable ``Tree(label, children)`` tuples whose labels are
integer handles into a :class:`RankedAlphabet`; names only appear when
parsing or printing.  Node addresses are tuples of 1-based child indices.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

from .errors import ArityMismatch, InvalidAddress, TreeSyntaxError, UnknownSymbol

HOLE = -1
HOLE_NAME = "_HOLE"

IDENT = r"[A-Za-z0-9_][A-Za-z0-9_'@^.]*"
_TOKEN = re.compile(rf"({IDENT})|(\S)")
_SPACE = re.compile(r"\s*")


class Tree(NamedTuple):
    label: int
    children: tuple = ()

    def __repr__(self):
        if not self.children:
            return f"T{self.label}"
        return f"T{self.label}({', '.join(map(repr, self.children))})"


HOLE_TREE = Tree(HOLE)


class RankedAlphabet:
    """Ordered list of ``(name, rank)`` pairs."""

    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[tuple[str, int]]):
        self.symbols = tuple((str(n), int(r)) for n, r in symbols)
        self._index = {}
        for i, (name, rank) in enumerate(self.symbols):
            if rank < 0:
                raise ValueError(f"negative rank for {name!r}")
            if name in self._index:
                raise ValueError(f"duplicate symbol {name!r}")
            self._index[name] = i

    @classmethod
    def from_spec(cls, spec: str) -> "RankedAlphabet":
        """``"a:2 b:1 c:0"`` -> alphabet."""
        out = []
        for item in spec.replace(",", " ").split():
            name, _, rank = item.partition(":")
            out.append((name, int(rank)))
        return cls(out)

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(range(len(self.symbols)))

    def __eq__(self, other):
        return isinstance(other, RankedAlphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return "RankedAlphabet(" + " ".join(f"{n}:{r}" for n, r in self.symbols) + ")"

    def rank(self, i: int) -> int:
        return 0 if i == HOLE else self.symbols[i][1]

    def name(self, i: int) -> str:
        return HOLE_NAME if i == HOLE else self.symbols[i][0]

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSymbol(f"unknown symbol {name!r}") from None

    def get(self, name: str, default=None):
        return self._index.get(name, default)

    def nullary(self) -> list[int]:
        return [i for i, (_, r) in enumerate(self.symbols) if r == 0]

    def max_rank(self) -> int:
        return max((r for _, r in self.symbols), default=0)

    def spec(self) -> str:
        return " ".join(f"{n}:{r}" for n, r in self.symbols)


# -- construction helpers ------------------------------------------------------

def leaf(label: int) -> Tree:
    return Tree(label, ())


def node(label: int, *children: Tree) -> Tree:
    return Tree(label, tuple(children))


def check_tree(t: Tree, alphabet: RankedAlphabet, allow_hole=False) -> None:
    stack = [t]
    while stack:
        n = stack.pop()
        if n.label == HOLE:
            if not allow_hole or n.children:
                raise ArityMismatch("hole not allowed here")
            continue
        if not 0 <= n.label < len(alphabet):
            raise UnknownSymbol(f"label {n.label} outside alphabet")
        if alphabet.rank(n.label) != len(n.children):
            raise ArityMismatch(
                f"{alphabet.name(n.label)} has rank {alphabet.rank(n.label)}, "
                f"got {len(n.children)} children")
        stack.extend(n.children)


# -- term syntax ---------------------------------------------------------------

def _tokens(text: str):
    pos = _SPACE.match(text, 0).end()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        yield (m.group(1) is not None, m.group(0), pos)
        pos = _SPACE.match(text, m.end()).end()
    yield (False, None, len(text))


def parse_tree(text: str, alphabet: RankedAlphabet, allow_hole=False) -> Tree:
    """Parse ``ident | ident '(' tree (',' tree)* ')'`` into a checked tree."""
    toks = _tokens(text)
    stack: list[list] = []  # [label, children, name_pos]
    result = None

    def finish(label, children, npos):
        if label == HOLE:
            if children:
                raise ArityMismatch(f"{HOLE_NAME} takes no children", npos)
        elif alphabet.rank(label) != len(children):
            raise ArityMismatch(
                f"{alphabet.name(label)} expects {alphabet.rank(label)} children, "
                f"got {len(children)}", npos)
        return Tree(label, tuple(children))

    def read_label(tok):
        is_id, val, pos = tok
        if not is_id:
            raise TreeSyntaxError(
                "expected a symbol" if val is None else f"unexpected {val!r}", pos)
        if val == HOLE_NAME:
            if not allow_hole:
                raise UnknownSymbol(f"{HOLE_NAME} only allowed in contexts", pos)
            return HOLE, pos
        if val not in alphabet._index:
            raise UnknownSymbol(f"unknown symbol {val!r}", pos)
        return alphabet._index[val], pos

    tok = next(toks)
    label, npos = read_label(tok)
    while True:
        tok = next(toks)
        if tok[1] == "(" and not tok[0]:
            stack.append([label, [], npos])
            label, npos = read_label(next(toks))
            continue
        done = Tree(label, ()) if label == HOLE else finish(label, [], npos)
        # close as many frames as the punctuation dictates
        while True:
            if not stack:
                result = done
                break
            stack[-1][1].append(done)
            if tok[1] == "," and not tok[0]:
                label, npos = read_label(next(toks))
                break
            if tok[1] == ")" and not tok[0]:
                fl, fc, fp = stack.pop()
                done = finish(fl, fc, fp)
                tok = next(toks)
                continue
            raise TreeSyntaxError(
                "unexpected end of input" if tok[1] is None else f"unexpected {tok[1]!r}",
                tok[2])
        if result is not None:
            break
    if tok[1] is not None:
        raise TreeSyntaxError(f"trailing input {tok[1]!r}", tok[2])
    if allow_hole:
        holes = sum(1 for a in addresses(result) if subtree(result, a).label == HOLE)
        if holes != 1:
            raise TreeSyntaxError(f"a context needs exactly one {HOLE_NAME}, found {holes}", 0)
    return result


def print_tree(t: Tree, alphabet: RankedAlphabet) -> str:
    out: list[str] = []
    stack: list = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        out.append(alphabet.name(item.label))
        if item.children:
            stack.append(")")
            for i in range(len(item.children) - 1, -1, -1):
                stack.append(item.children[i])
                if i:
                    stack.append(",")
            stack.append("(")
    return "".join(out)


# -- measurements and addresses ------------------------------------------------

def size(t: Tree) -> int:
    n = 0
    stack = [t]
    while stack:
        x = stack.pop()
        n += 1
        stack.extend(x.children)
    return n


def height(t: Tree) -> int:
    best = 0
    stack = [(t, 0)]
    while stack:
        x, d = stack.pop()
        if d > best:
            best = d
        for c in x.children:
            stack.append((c, d + 1))
    return best


def addresses(t: Tree) -> Iterator[tuple[int, ...]]:
    """All node addresses in preorder; the root is ``()``."""
    stack = [((), t)]
    while stack:
        addr, x = stack.pop()
        yield addr
        for i in range(len(x.children), 0, -1):
            stack.append((addr + (i,), x.children[i - 1]))


def subtree(t: Tree, addr: Sequence[int]) -> Tree:
    for i in addr:
        if not 1 <= i <= len(t.children):
            raise InvalidAddress(f"address {tuple(addr)} leaves the tree")
        t = t.children[i - 1]
    return t


def replace_at(t: Tree, addr: Sequence[int], sub: Tree) -> Tree:
    spine = []
    cur = t
    for i in addr:
        if not 1 <= i <= len(cur.children):
            raise InvalidAddress(f"address {tuple(addr)} leaves the tree")
        spine.append((cur, i))
        cur = cur.children[i - 1]
    for parent, i in reversed(spine):
        kids = list(parent.children)
        kids[i - 1] = sub
        sub = Tree(parent.label, tuple(kids))
    return sub


# -- contexts ------------------------------------------------------------------

def _find_hole(t: Tree):
    found = None
    stack = [((), t)]
    while stack:
        addr, x = stack.pop()
        if x.label == HOLE:
            if x.children or found is not None:
                return None
            found = addr
        for i, c in enumerate(x.children, 1):
            stack.append((addr + (i,), c))
    return found


@dataclass(frozen=True)
class Context:
    """A tree with exactly one leaf labelled by the hole."""

    tree: Tree
    hole: tuple = field(default=None, compare=False)

    def __post_init__(self):
        addr = _find_hole(self.tree)
        if addr is None:
            raise ValueError("a context needs exactly one hole leaf")
        object.__setattr__(self, "hole", addr)

    def __call__(self, t: Tree) -> Tree:
        return apply_context(self, t)

    def __matmul__(self, other: "Context") -> "Context":
        return compose_contexts(self, other)


IDENTITY = Context(HOLE_TREE)


def apply_context(c: Context, t: Tree) -> Tree:
    return replace_at(c.tree, c.hole, t)


def compose_contexts(c: Context, c2: Context) -> Context:
    """``compose(C, C')[t] == C[C'[t]]``."""
    return Context(replace_at(c.tree, c.hole, c2.tree))


def power(c: Context, n: int) -> Context:
    if n < 0:
        raise ValueError("negative power")
    # spine-only rebuild: C^n is C's spine repeated n times
    tree = HOLE_TREE
    for _ in range(n):
        tree = replace_at(c.tree, c.hole, tree)
    return Context(tree)


def parse_context(text: str, alphabet: RankedAlphabet) -> Context:
    return Context(parse_tree(text, alphabet, allow_hole=True))


def print_context(c: Context, alphabet: RankedAlphabet) -> str:
    return print_tree(c.tree, alphabet)


def shallow_context(label: int, hole_pos: int, side: Sequence[Tree]) -> Context:
    """``label(side..., hole at hole_pos (1-based), side...)``."""
    kids = list(side[: hole_pos - 1]) + [HOLE_TREE] + list(side[hole_pos - 1:])
    return Context(Tree(label, tuple(kids)))


def relabel(t: Tree, f) -> Tree:
    """Apply ``f`` to every label (children untouched)."""
    memo = {}

    def go(x):
        key = id(x)
        r = memo.get(key)
        if r is None:
            r = Tree(f(x.label), tuple(go(c) for c in x.children))
            memo[key] = r
        return r

    return go(t)
