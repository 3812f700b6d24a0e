"""Planar operad terms: trees of operation symbols with bijectively labeled leaves."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache


@dataclass(frozen=True)
class OperationSymbol:
    name: str
    arity: int
    origin: str = field(default="user", compare=False)

    def __post_init__(self):
        if self.arity < 0:
            raise ValueError("arity must be >= 0")
        if not self.name or any(c in self.name for c in "()@,;~ \t\n"):
            raise ValueError("bad symbol name: %r" % (self.name,))

    def __repr__(self):
        return "%s/%d" % (self.name, self.arity)


class Term:
    """Base class; instances are Leaf or Node, immutable and hash-cached."""

    __slots__ = ()

    @property
    def arity(self) -> int:
        raise NotImplementedError

    @property
    def size(self) -> int:
        raise NotImplementedError


class Leaf(Term):
    __slots__ = ("index", "_hash")

    def __init__(self, index: int):
        if index < 1:
            raise ValueError("leaf indices are 1-based")
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "_hash", hash(("L", index)))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @property
    def arity(self):
        return 1

    @property
    def size(self):
        return 1

    def __eq__(self, other):
        return isinstance(other, Leaf) and other.index == self.index

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return str(self.index)


class Node(Term):
    __slots__ = ("symbol", "children", "_hash", "_arity", "_size")

    def __init__(self, symbol: OperationSymbol, children: tuple):
        children = tuple(children)
        if len(children) != symbol.arity:
            raise ValueError(
                "symbol %r applied to %d children" % (symbol, len(children)))
        object.__setattr__(self, "symbol", symbol)
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "_arity", sum(c.arity for c in children))
        object.__setattr__(self, "_size", 1 + sum(c.size for c in children))
        object.__setattr__(
            self, "_hash", hash(("N", symbol.name, symbol.arity, children)))

    def __setattr__(self, *a):
        raise AttributeError("immutable")

    @property
    def arity(self):
        return self._arity

    @property
    def size(self):
        return self._size

    def __eq__(self, other):
        return (isinstance(other, Node) and other._hash == self._hash
                and other.symbol == self.symbol and other.children == self.children)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if not self.children:
            return self.symbol.name
        return "%s(%s)" % (self.symbol.name, ",".join(map(repr, self.children)))


def render_term(t: Term) -> str:
    return repr(t)


def leaf_indices(t: Term) -> list:
    """Leaf labels in left-to-right order."""
    if isinstance(t, Leaf):
        return [t.index]
    out = []
    for c in t.children:
        out.extend(leaf_indices(c))
    return out


def is_linear(t: Term) -> bool:
    """Every index in 1..arity appears on exactly one leaf."""
    idx = leaf_indices(t)
    return sorted(idx) == list(range(1, len(idx) + 1))


def identity_labeled(t: Term) -> bool:
    idx = leaf_indices(t)
    return idx == list(range(1, len(idx) + 1))


def validate_term(t: Term):
    if not is_linear(t):
        raise ValueError("leaf labels of %r are not a bijection onto 1..n" % (t,))


# ---------------------------------------------------------------------------
# positions: tuples of 1-based child indices; () is the root

def subterm(t: Term, pos: tuple) -> Term:
    for i in pos:
        if not isinstance(t, Node) or not (1 <= i <= len(t.children)):
            raise KeyError("position %r does not exist in %r" % (pos, t))
        t = t.children[i - 1]
    return t


def replace(t: Term, pos: tuple, repl: Term) -> Term:
    if not pos:
        return repl
    i = pos[0]
    if not isinstance(t, Node) or not (1 <= i <= len(t.children)):
        raise KeyError("position %r does not exist in %r" % (pos, t))
    kids = list(t.children)
    kids[i - 1] = replace(kids[i - 1], pos[1:], repl)
    return Node(t.symbol, tuple(kids))


def positions(t: Term, prefix=()):
    """All node positions in preorder."""
    yield prefix
    if isinstance(t, Node):
        for i, c in enumerate(t.children, 1):
            yield from positions(c, prefix + (i,))


def leaf_position(t: Term, index: int, prefix=()):
    """Position of the leaf carrying `index`, or None."""
    if isinstance(t, Leaf):
        return prefix if t.index == index else None
    for i, c in enumerate(t.children, 1):
        p = leaf_position(c, index, prefix + (i,))
        if p is not None:
            return p
    return None


def render_position(pos: tuple) -> str:
    return ".".join(str(i) for i in pos) if pos else "e"


def parse_position(text: str) -> tuple:
    text = text.strip()
    if text in ("", "e"):
        return ()
    try:
        parts = tuple(int(p) for p in text.split("."))
    except ValueError:
        raise ValueError("bad position %r" % (text,))
    if any(p < 1 for p in parts):
        raise ValueError("positions use 1-based child indices: %r" % (text,))
    return parts


# ---------------------------------------------------------------------------
# canonical order: leaves sort before nodes, then by label / symbol name

def _flatten(t: Term, out: list):
    if isinstance(t, Leaf):
        out.append((0, t.index, ""))
    else:
        out.append((1, t.symbol.arity, t.symbol.name))
        for c in t.children:
            _flatten(c, out)


def canonical_key(t: Term):
    out = []
    _flatten(t, out)
    return (t.size, tuple(out))


def shift_leaves(t: Term, offset: int) -> Term:
    if offset == 0:
        return t
    if isinstance(t, Leaf):
        return Leaf(t.index + offset)
    return Node(t.symbol, tuple(shift_leaves(c, offset) for c in t.children))


def relabel(t: Term, mapping: dict) -> Term:
    if isinstance(t, Leaf):
        return Leaf(mapping[t.index])
    return Node(t.symbol, tuple(relabel(c, mapping) for c in t.children))


def substitute(outer: Term, slot: int, inner: Term) -> Term:
    """Operadic composition: graft `inner` onto the leaf labeled `slot`.

    The grafted copy occupies indices slot..slot+arity(inner)-1; later
    indices of `outer` are shifted up by arity(inner)-1.
    """
    n = outer.arity
    if not (1 <= slot <= n):
        raise ValueError("slot %d out of range 1..%d" % (slot, n))
    m = inner.arity

    def walk(t):
        if isinstance(t, Leaf):
            if t.index == slot:
                return shift_leaves(inner, slot - 1)
            if t.index > slot:
                return Leaf(t.index + m - 1)
            return t
        return Node(t.symbol, tuple(walk(c) for c in t.children))

    return walk(outer)


def identity_term() -> Term:
    return Leaf(1)


# ---------------------------------------------------------------------------
# linear pattern matching; pattern leaves are capture slots

def match(pattern: Term, subject: Term):
    """Return {leaf-label: captured subterm} or None."""
    caps = {}

    def walk(p, s):
        if isinstance(p, Leaf):
            caps[p.index] = s
            return True
        if not isinstance(s, Node) or s.symbol != p.symbol:
            return False
        return all(walk(pc, sc) for pc, sc in zip(p.children, s.children))

    return caps if walk(pattern, subject) else None


def instantiate(pattern: Term, captures: dict) -> Term:
    if isinstance(pattern, Leaf):
        return captures[pattern.index]
    return Node(pattern.symbol, tuple(instantiate(c, captures) for c in pattern.children))


@lru_cache(maxsize=None)
def pattern_leaf_paths(pattern: Term) -> dict:
    """label -> position of that leaf inside the pattern."""
    out = {}

    def walk(t, pos):
        if isinstance(t, Leaf):
            out[t.index] = pos
        else:
            for i, c in enumerate(t.children, 1):
                walk(c, pos + (i,))

    walk(pattern, ())
    return out
