"""Finite presentations of 2-theories and the plain-theory constructions on them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .terms import (
    Leaf, Node, OperationSymbol, Term, canonical_key, identity_labeled,
    instantiate, is_linear, leaf_indices, match, positions, render_term,
    replace, subterm, validate_term,
)


class PresentationError(ValueError):
    pass


@dataclass(frozen=True)
class TermEquation:
    """Oriented rewrite lhs -> rhs.  `ordered` rules fire only when the
    instance strictly decreases in canonical order (permutative rules)."""
    lhs: Term
    rhs: Term
    ordered: bool = False

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise PresentationError("equation with identical sides")
        if self.lhs.arity != self.rhs.arity:
            raise PresentationError(
                "equation between arities %d and %d" % (self.lhs.arity, self.rhs.arity))
        validate_term(self.lhs)
        validate_term(self.rhs)
        if isinstance(self.lhs, Leaf):
            raise PresentationError("equation lhs cannot be a bare leaf")

    def __repr__(self):
        tag = " [ordered]" if self.ordered else ""
        return "%s -> %s%s" % (render_term(self.lhs), render_term(self.rhs), tag)


@dataclass(frozen=True)
class TwoCellGenerator:
    name: str
    source: Term
    target: Term
    invertible: bool = True

    def __post_init__(self):
        if self.source.arity != self.target.arity:
            raise PresentationError("cell %s between different arities" % self.name)
        validate_term(self.source)
        validate_term(self.target)
        if sorted(leaf_indices(self.source)) != sorted(leaf_indices(self.target)):
            raise PresentationError("cell %s changes the leaf index set" % self.name)
        if isinstance(self.source, Leaf) and isinstance(self.target, Leaf):
            raise PresentationError("cell %s between bare leaves" % self.name)

    def __repr__(self):
        tag = " [iso]" if self.invertible else ""
        return "%s : %s => %s%s" % (
            self.name, render_term(self.source), render_term(self.target), tag)


@dataclass(frozen=True)
class TheoryPresentation:
    symbols: tuple            # OperationSymbol, sorted by name
    equations: tuple          # TermEquation, declaration order
    cells: tuple              # TwoCellGenerator, sorted by name
    relations: tuple = ()     # rewrite.Relation, declaration order
    name: str = field(default="", compare=False)
    notes: str = field(default="", compare=False)

    @property
    def all_invertible(self) -> bool:
        return all(c.invertible for c in self.cells)

    def symbol(self, name: str) -> OperationSymbol:
        for s in self.symbols:
            if s.name == name:
                return s
        raise KeyError("unknown symbol %r" % (name,))

    def cell(self, name: str) -> TwoCellGenerator:
        for c in self.cells:
            if c.name == name:
                return c
        raise KeyError("unknown 2-cell %r" % (name,))

    def __repr__(self):
        return "TheoryPresentation(%s: %d symbols, %d equations, %d cells, %d relations)" % (
            self.name or "?", len(self.symbols), len(self.equations),
            len(self.cells), len(self.relations))


def make_presentation(symbols, equations=(), cells=(), relations=(), name="", notes=""):
    """Validate and build a presentation; symbols/cells are sorted by name."""
    symbols = tuple(sorted(symbols, key=lambda s: s.name))
    names = [s.name for s in symbols]
    if len(set(names)) != len(names):
        raise PresentationError("duplicate symbol names")
    cells = tuple(sorted(cells, key=lambda c: c.name))
    cnames = [c.name for c in cells]
    if len(set(cnames)) != len(cnames):
        raise PresentationError("duplicate 2-cell names")
    if set(cnames) & set(names):
        raise PresentationError("2-cell named like a symbol")
    known = set(symbols)

    def check_term(t):
        for pos in positions(t):
            s = subterm(t, pos)
            if isinstance(s, Node) and s.symbol not in known:
                raise PresentationError("undeclared symbol %r in %r" % (s.symbol, t))

    for eq in equations:
        check_term(eq.lhs)
        check_term(eq.rhs)
    for c in cells:
        check_term(c.source)
        check_term(c.target)
    p = TheoryPresentation(symbols, tuple(equations), cells, tuple(relations),
                           name=name, notes=notes)
    # relation paths are validated by the rewrite engine once the
    # presentation exists (they replay against it)
    from .paths import validate_relations
    validate_relations(p)
    return p


# ---------------------------------------------------------------------------
# normalization

class NormalizationError(RuntimeError):
    pass


_NORM_STEP_GUARD = 2000


def _find_redex(p: TheoryPresentation, t: Term):
    """Leftmost-outermost oriented-equation redex: (eq_index, pos, result)."""
    for pos in positions(t):
        s = subterm(t, pos)
        if not isinstance(s, Node):
            continue
        for i, eq in enumerate(p.equations):
            caps = match(eq.lhs, s)
            if caps is None:
                continue
            out = instantiate(eq.rhs, caps)
            if eq.ordered and not canonical_key(out) < canonical_key(s):
                continue
            return i, pos, replace(t, pos, out)
    return None


def normalize_trace(p: TheoryPresentation, t: Term):
    """Return (normal form, [(eq_index, pos)]) applying oriented equations."""
    trace = []
    for _ in range(_NORM_STEP_GUARD):
        hit = _find_redex(p, t)
        if hit is None:
            return t, trace
        i, pos, t = hit
        trace.append((i, pos))
    raise NormalizationError(
        "rewrite did not terminate within %d steps; check equation orientations"
        % _NORM_STEP_GUARD)


def normalize_term(p: TheoryPresentation, t: Term) -> Term:
    return normalize_trace(p, t)[0]


def is_normal(p: TheoryPresentation, t: Term) -> bool:
    return _find_redex(p, t) is None


def equation_redexes(p: TheoryPresentation, t: Term):
    """All (eq_index, pos, result) single equation rewrites of t."""
    out = []
    for pos in positions(t):
        s = subterm(t, pos)
        if not isinstance(s, Node):
            continue
        for i, eq in enumerate(p.equations):
            caps = match(eq.lhs, s)
            if caps is None:
                continue
            res = instantiate(eq.rhs, caps)
            if eq.ordered and not canonical_key(res) < canonical_key(s):
                continue
            out.append((i, pos, replace(t, pos, res)))
    return out


def check_ground_confluence(p: TheoryPresentation, max_arity: int, max_size: int):
    """All one-step reducts of every enumerated term join to one normal form.

    Returns a list of offending (term, nf1, nf2) triples (empty = confluent
    at this bound).
    """
    bad = []
    for n in range(0, max_arity + 1):
        for t in enumerate_raw_terms(p, n, max_size):
            nfs = {normalize_term(p, r) for _, _, r in equation_redexes(p, t)}
            if len(nfs) > 1:
                nfs = sorted(nfs, key=canonical_key)
                bad.append((t, nfs[0], nfs[1]))
    return bad


# ---------------------------------------------------------------------------
# enumeration

_ENUM_CAP = 200000


def enumerate_raw_terms(p: TheoryPresentation, arity: int, max_size: int):
    """All identity-labeled terms of the given arity with size <= max_size."""
    syms = list(p.symbols)
    cache = {}

    def shapes(n, budget):
        key = (n, budget)
        if key in cache:
            return cache[key]
        out = []
        if budget >= 1 and n == 1:
            out.append(Leaf(1))
        if budget >= 1:
            for s in syms:
                k = s.arity
                if k == 0:
                    if n == 0:
                        out.append(Node(s, ()))
                    continue
                # a k-ary node needs k children, each of size >= 1
                if budget - 1 < k:
                    continue
                for parts in _compositions(n, k):
                    for kids in _child_tuples(parts, budget - 1, shapes):
                        out.append(Node(s, kids))
                        if len(out) > _ENUM_CAP:
                            raise PresentationError(
                                "term enumeration blew the cap")
        out = [t for t in out if t.size <= budget]
        out.sort(key=canonical_key)
        cache[key] = out
        return out

    raw = shapes(arity, max_size)
    relabeled = []
    for t in raw:
        # identity labeling: leaves get 1..n left to right
        idx = iter(range(1, arity + 1))

        def lab(u):
            if isinstance(u, Leaf):
                return Leaf(next(idx))
            return Node(u.symbol, tuple(lab(c) for c in u.children))

        relabeled.append(lab(t))
    return relabeled


def _compositions(n, k):
    """Ordered k-tuples of naturals summing to n."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _child_tuples(parts, budget, shapes):
    if not parts:
        if budget >= 0:
            yield ()
        return
    n0 = parts[0]
    remaining = len(parts) - 1
    if budget - remaining < 1:
        return
    for head in shapes(n0, budget - remaining):
        for tail in _child_tuples(parts[1:], budget - head.size, shapes):
            yield (head,) + tail


def enumerate_normal_forms(p: TheoryPresentation, arity: int, max_size: int):
    """Canonically ordered normal forms of identity-labeled terms at bound."""
    seen = {}
    for t in enumerate_raw_terms(p, arity, max_size):
        nf = normalize_term(p, t)
        if nf.size <= max_size:
            seen[nf] = True
    return sorted(seen, key=canonical_key)


# ---------------------------------------------------------------------------
# change-of-level constructions

def apply_d(p: TheoryPresentation) -> TheoryPresentation:
    """Discrete 2-theory on a plain theory: same 1-cells, no 2-cells."""
    if p.cells:
        raise PresentationError("d expects a presentation without 2-cells")
    return make_presentation(p.symbols, p.equations, (), (),
                             name=("d(%s)" % p.name) if p.name else "")


def apply_U(p: TheoryPresentation) -> TheoryPresentation:
    """Forget the 2-cells."""
    return make_presentation(p.symbols, p.equations, (), (),
                             name=("U(%s)" % p.name) if p.name else "")


def apply_c(p: TheoryPresentation, max_arity: int, max_size: int) -> TheoryPresentation:
    """Indiscrete 2-theory on a plain theory, materialized at a bound.

    Parallel nontrivial 1-cells at each arity get a chain of invertible
    cells; fundamental cycles of the resulting step graph are killed by
    relations so every hom-groupoid at the bound is indiscrete.
    """
    if p.cells:
        raise PresentationError("c expects a presentation without 2-cells")
    from .paths import relations_for_indiscrete
    cells = []
    for n in range(0, max_arity + 1):
        nfs = [t for t in _all_labelings(p, n, max_size) if not isinstance(t, Leaf)]
        for a, b in zip(nfs, nfs[1:]):
            cells.append(TwoCellGenerator(
                "iso%d_%d" % (n, len(cells)), a, b, invertible=True))
    out = make_presentation(p.symbols, p.equations, cells, (),
                            name=("c(%s)" % p.name) if p.name else "")
    rels = relations_for_indiscrete(out, max_arity, max_size)
    return make_presentation(out.symbols, out.equations, out.cells, rels,
                             name=out.name)


def _all_labelings(p: TheoryPresentation, arity: int, max_size: int):
    """Normal forms of all bijective leaf labelings at this arity."""
    from .terms import relabel
    seen = {}
    for t in enumerate_raw_terms(p, arity, max_size):
        for perm in itertools.permutations(range(1, arity + 1)):
            mapping = dict(zip(range(1, arity + 1), perm))
            nf = normalize_term(p, relabel(t, mapping))
            if nf.size <= max_size:
                seen[nf] = True
    return sorted(seen, key=canonical_key)


def apply_pi0(p: TheoryPresentation, max_arity: int = 4, max_size: int = 8
              ) -> TheoryPresentation:
    """Collapse 2-cells to equations, then complete at the bound."""
    new_eqs = list(p.equations)
    for c in p.cells:
        lhs, rhs = c.source, c.target
        if canonical_key(lhs) < canonical_key(rhs):
            lhs, rhs = rhs, lhs
        if lhs.size == rhs.size and sorted(leaf_indices(lhs)) == sorted(leaf_indices(rhs)):
            # permutative collapse: fire only when decreasing
            ordered = not identity_labeled(lhs) or not identity_labeled(rhs)
        else:
            ordered = False
        if isinstance(lhs, Leaf):
            lhs, rhs = rhs, lhs
        new_eqs.append(TermEquation(lhs, rhs, ordered=ordered))
    q = make_presentation(p.symbols, _dedup_equations(new_eqs), (), (),
                          name=("pi0(%s)" % p.name) if p.name else "")
    return _complete_at_bound(q, max_arity, max_size)


def _dedup_equations(eqs):
    out, seen = [], set()
    for e in eqs:
        key = (e.lhs, e.rhs, e.ordered)
        if key not in seen:
            seen.add(key)
            out.append(e)
    return tuple(out)


def _complete_at_bound(p: TheoryPresentation, max_arity: int, max_size: int,
                       rounds: int = 8) -> TheoryPresentation:
    """Naive ground completion: add joining rules until confluent at bound."""
    cur = p
    for _ in range(rounds):
        bad = check_ground_confluence(cur, max_arity, max_size)
        if not bad:
            return cur
        _, a, b = bad[0]
        if canonical_key(a) < canonical_key(b):
            a, b = b, a
        ordered = a.size == b.size
        eqs = _dedup_equations(list(cur.equations) + [TermEquation(a, b, ordered=ordered)])
        cur = make_presentation(cur.symbols, eqs, cur.cells, cur.relations, name=cur.name)
    raise PresentationError(
        "completion failed at bound (arity<=%d, size<=%d)" % (max_arity, max_size))


# ---------------------------------------------------------------------------
# colimits of presentations

def initial_theory() -> TheoryPresentation:
    return make_presentation((), (), (), (), name="fin")


def _rename_term(t: Term, table: dict) -> Term:
    if isinstance(t, Leaf):
        return t
    return Node(table[t.symbol], tuple(_rename_term(c, table) for c in t.children))


def rename_apart(p1: TheoryPresentation, p2: TheoryPresentation):
    """Tables making the two symbol/cell name sets disjoint ('_1'/'_2' on clash)."""
    clashes = {s.name for s in p1.symbols} & {s.name for s in p2.symbols}
    cell_clashes = {c.name for c in p1.cells} & {c.name for c in p2.cells}

    def tables(p, tag):
        st = {s: OperationSymbol(s.name + tag if s.name in clashes else s.name,
                                 s.arity, s.origin)
              for s in p.symbols}
        ct = {c.name: (c.name + tag if c.name in cell_clashes else c.name)
              for c in p.cells}
        return st, ct

    return tables(p1, "_1"), tables(p2, "_2")


def _rename_presentation(p: TheoryPresentation, st: dict, ct: dict) -> TheoryPresentation:
    from .paths import rename_relation
    eqs = tuple(TermEquation(_rename_term(e.lhs, st), _rename_term(e.rhs, st), e.ordered)
                for e in p.equations)
    cells = tuple(TwoCellGenerator(ct[c.name], _rename_term(c.source, st),
                                   _rename_term(c.target, st), c.invertible)
                  for c in p.cells)
    rels = tuple(rename_relation(r, st, ct) for r in p.relations)
    return make_presentation(st.values(), eqs, cells, rels, name=p.name)


def coproduct(p1: TheoryPresentation, p2: TheoryPresentation) -> TheoryPresentation:
    (st1, ct1), (st2, ct2) = rename_apart(p1, p2)
    q1 = _rename_presentation(p1, st1, ct1)
    q2 = _rename_presentation(p2, st2, ct2)
    return make_presentation(
        q1.symbols + q2.symbols,
        q1.equations + q2.equations,
        q1.cells + q2.cells,
        q1.relations + q2.relations,
        name="%s+%s" % (p1.name or "?", p2.name or "?"))


def presentations_isomorphic(p1: TheoryPresentation, p2: TheoryPresentation) -> bool:
    """Equality up to a symbol/cell renaming bijection (small search)."""
    if (len(p1.symbols) != len(p2.symbols) or len(p1.cells) != len(p2.cells)
            or len(p1.equations) != len(p2.equations)
            or len(p1.relations) != len(p2.relations)):
        return False
    by_arity1, by_arity2 = {}, {}
    for s in p1.symbols:
        by_arity1.setdefault(s.arity, []).append(s)
    for s in p2.symbols:
        by_arity2.setdefault(s.arity, []).append(s)
    if {k: len(v) for k, v in by_arity1.items()} != {k: len(v) for k, v in by_arity2.items()}:
        return False

    arities = sorted(by_arity1)
    groups = [(by_arity1[a], by_arity2[a]) for a in arities]

    def assignments(i, table):
        if i == len(groups):
            yield dict(table)
            return
        g1, g2 = groups[i]
        for perm in itertools.permutations(g2):
            t2 = dict(table)
            for a, b in zip(g1, perm):
                t2[a] = OperationSymbol(b.name, b.arity, b.origin)
            yield from assignments(i + 1, t2)

    from .paths import rename_relation
    for table in assignments(0, {}):
        eqs1 = {(_rename_term(e.lhs, table), _rename_term(e.rhs, table), e.ordered)
                for e in p1.equations}
        eqs2 = {(e.lhs, e.rhs, e.ordered) for e in p2.equations}
        if eqs1 != eqs2:
            continue
        cells1 = sorted((_rename_term(c.source, table), _rename_term(c.target, table),
                         c.invertible) for c in p1.cells)
        cells2 = sorted((c.source, c.target, c.invertible) for c in p2.cells)
        if cells1 != cells2:
            continue
        # map cell names along matching source/target data
        cmap = {}
        used = set()
        ok = True
        for c in p1.cells:
            key = (_rename_term(c.source, table), _rename_term(c.target, table), c.invertible)
            found = None
            for d in p2.cells:
                if d.name in used:
                    continue
                if (d.source, d.target, d.invertible) == key:
                    found = d
                    break
            if found is None:
                ok = False
                break
            used.add(found.name)
            cmap[c.name] = found.name
        if not ok:
            continue
        rels1 = sorted(repr(rename_relation(r, table, cmap)) for r in p1.relations)
        rels2 = sorted(repr(r) for r in p2.relations)
        if rels1 == rels2:
            return True
    return False
