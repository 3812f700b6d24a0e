"""The tensor of two presented theories: their coproduct with freely added
interchange cells, coherence conditions instantiated at a bound, and the
action on morphisms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .bounds import Bound
from .engine import equal_paths
from .morphism import TheoryMorphism, image_term, make_morphism, raw_image
from .paths import (
    Relation, RewriteStep, TwoCellPath, Verdict, conjoin, fails, holds,
    replay_raw, unknown,
)
from .presentations import (
    TheoryPresentation, TwoCellGenerator, coproduct, make_presentation,
    rename_apart, _rename_presentation, _rename_term,
)
from .terms import Leaf, Node, Term, relabel, render_term, substitute


class KroneckerError(ValueError):
    pass


@dataclass
class KroneckerProduct:
    presentation: TheoryPresentation
    left: TheoryPresentation
    right: TheoryPresentation
    left_symbols: dict           # original name -> renamed OperationSymbol
    right_symbols: dict
    left_cells: dict             # original cell name -> renamed name
    right_cells: dict
    delta_names: dict            # (left renamed, right renamed) -> cell name
    conditions: list             # (tag, Relation)
    skipped: list                # descriptions of out-of-bound instances


def _is_left(kp: KroneckerProduct, name: str) -> bool:
    return any(s.name == name for s in kp.left_symbols.values())


def interchange_source(f: Term, g: Term) -> Term:
    """g applied to copies of f, leaves numbered block by block."""
    out = g
    for j in range(g.arity, 0, -1):
        out = substitute(out, j, f)
    return out


def interchange_target(f: Term, g: Term) -> Term:
    """f applied to copies of g, with the transposed leaf numbering."""
    m, n = f.arity, g.arity
    out = f
    for i in range(m, 0, -1):
        out = substitute(out, i, g)
    mapping = {}
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            mapping[(i - 1) * n + j] = (j - 1) * m + i
    return relabel(out, mapping)


def kronecker(p1: TheoryPresentation, p2: TheoryPresentation,
              bound: Bound = None) -> KroneckerProduct:
    """Coproduct plus one interchange cell per generator pair, with the
    coherence conditions instantiated for data inside the bound."""
    bound = bound or Bound()
    (st1, ct1), (st2, ct2) = rename_apart(p1, p2)
    q1 = _rename_presentation(p1, st1, ct1)
    q2 = _rename_presentation(p2, st2, ct2)
    base = make_presentation(
        q1.symbols + q2.symbols, q1.equations + q2.equations,
        q1.cells + q2.cells, q1.relations + q2.relations)

    delta_cells = []
    delta_names = {}
    for sf in q1.symbols:
        if sf.arity < 1:
            continue
        for sg in q2.symbols:
            if sg.arity < 1:
                continue
            f = _plain_term(sf)
            g = _plain_term(sg)
            name = "dl_%s_%s" % (sf.name, sg.name)
            delta_cells.append(TwoCellGenerator(
                name, interchange_source(f, g), interchange_target(f, g),
                invertible=True))
            delta_names[(sf.name, sg.name)] = name

    with_delta = make_presentation(
        base.symbols, base.equations, base.cells + tuple(delta_cells),
        base.relations)

    kp = KroneckerProduct(with_delta, p1, p2,
                          {s.name: st1[s] for s in p1.symbols},
                          {s.name: st2[s] for s in p2.symbols},
                          ct1, ct2, delta_names, [], [])

    conditions, skipped = _instantiate_conditions(kp, q1, q2, bound)
    final = make_presentation(
        with_delta.symbols, with_delta.equations, with_delta.cells,
        with_delta.relations + tuple(r for _, r in conditions
                                     if r.lhs.steps != r.rhs.steps),
        name="%s (x) %s" % (p1.name or "?", p2.name or "?"),
        notes=_provenance(p1, p2, delta_names, conditions, skipped))
    kp.presentation = final
    kp.conditions = conditions
    kp.skipped = skipped
    return kp


def _plain_term(sym) -> Term:
    return Node(sym, tuple(Leaf(i) for i in range(1, sym.arity + 1)))


def _provenance(p1, p2, delta_names, conditions, skipped):
    lines = ["tensor of %s and %s" % (p1.name or "?", p2.name or "?"),
             "interchange cells:"]
    for (f, g), name in sorted(delta_names.items()):
        lines.append("  %s : %s past %s" % (name, f, g))
    lines.append("instantiated coherence conditions: %d" % len(conditions))
    for tag, r in conditions:
        lines.append("  [%s] %s" % (tag, render_term(r.lhs.source)))
    for s in skipped:
        lines.append("skipped (outside bound): %s" % s)
    return "\n".join(lines)


def derived_delta(kp: KroneckerProduct, t: Term, u: Term) -> TwoCellPath:
    """The interchange of a composite left cell past a composite right cell,
    assembled from the generating cells by the fixed recursion: the right
    tree is unfolded outside in, then the left tree inside out."""
    _check_sides(kp, t, u)
    src = interchange_source(t, u)
    steps = _dpath_steps(kp, t, u)
    return TwoCellPath(src.arity, src, tuple(steps))


def _check_sides(kp, t, u):
    for x, side, names in ((t, "left", {s.name for s in kp.left_symbols.values()}),
                           (u, "right", {s.name for s in kp.right_symbols.values()})):
        for sym in _symbols_of(x):
            if sym.arity == 0:
                raise KroneckerError("nullary symbols have no interchange "
                                     "cell at this bound")
            if sym.name not in names:
                raise KroneckerError("%s is not a %s-side symbol" % (sym.name, side))


def _symbols_of(t):
    if isinstance(t, Leaf):
        return []
    out = [t.symbol]
    for c in t.children:
        out.extend(_symbols_of(c))
    return out


def _dpath_steps(kp, t, u):
    if isinstance(t, Leaf) or isinstance(u, Leaf):
        return []
    f = t.symbol
    steps = list(_datomic_steps(kp, f, u))
    for i, kid in enumerate(t.children, 1):
        steps.extend(RewriteStep(s.generator, (i,) + s.position, s.inverse)
                     for s in _dpath_steps(kp, kid, u))
    return steps


def _datomic_steps(kp, f, u):
    if isinstance(u, Leaf):
        return []
    g = u.symbol
    steps = []
    for j, kid in enumerate(u.children, 1):
        steps.extend(RewriteStep(s.generator, (j,) + s.position, s.inverse)
                     for s in _datomic_steps(kp, f, kid))
    steps.append(RewriteStep(kp.delta_names[(f.name, g.name)], ()))
    return steps


def _instantiate_conditions(kp, q1, q2, bound: Bound):
    conditions, skipped = [], []
    size_cap = bound.max_term_size

    # condition on 2-cells of the left factor against right generators
    for c in q1.cells:
        for sg in q2.symbols:
            if sg.arity < 1 or _has_nullary(c.source) or _has_nullary(c.target):
                continue
            g = _plain_term(sg)
            src = interchange_source(c.source, g)
            if src.size > size_cap:
                skipped.append("2-cell %s past %s" % (c.name, sg.name))
                continue
            lhs = TwoCellPath(src.arity, src, tuple(
                _dpath_steps(kp, c.source, g)) + (RewriteStep(c.name, ()),))
            rhs_steps = tuple(RewriteStep(c.name, (j,))
                              for j in range(1, sg.arity + 1)) + tuple(
                _dpath_steps(kp, c.target, g))
            rhs = TwoCellPath(src.arity, src, rhs_steps)
            conditions.append(("cell-compat-left", Relation(lhs, rhs)))
    # and of the right factor against left generators
    for c in q2.cells:
        for sf in q1.symbols:
            if sf.arity < 1 or _has_nullary(c.source) or _has_nullary(c.target):
                continue
            f = _plain_term(sf)
            src = interchange_source(f, c.source)
            if src.size > size_cap:
                skipped.append("2-cell %s past %s" % (c.name, sf.name))
                continue
            lhs_steps = (RewriteStep(c.name, ()),) + tuple(
                _dpath_steps(kp, f, c.target))
            rhs_steps = tuple(_dpath_steps(kp, f, c.source)) + tuple(
                RewriteStep(c.name, (i,)) for i in range(1, sf.arity + 1))
            lhs = TwoCellPath(src.arity, src, lhs_steps)
            rhs = TwoCellPath(src.arity, src, rhs_steps)
            conditions.append(("cell-compat-right", Relation(lhs, rhs)))

    # composite-argument instances are definitional for the fixed recursion;
    # they are recorded so the coherence check replays them
    for sf in q1.symbols:
        if sf.arity < 1:
            continue
        for sf2 in q1.symbols:
            if sf2.arity < 1:
                continue
            for sg in q2.symbols:
                if sg.arity < 1:
                    continue
                comp = substitute(_plain_term(sf), 1, _plain_term(sf2))
                src = interchange_source(comp, _plain_term(sg))
                if src.size > size_cap:
                    skipped.append("composite %s.%s past %s"
                                   % (sf.name, sf2.name, sg.name))
                    continue
                d = TwoCellPath(src.arity, src,
                                tuple(_dpath_steps(kp, comp, _plain_term(sg))))
                conditions.append(("compose-left", Relation(d, d)))
    return conditions, skipped


def _has_nullary(t):
    return any(s.arity == 0 for s in _symbols_of(t))


def check_delta_coherence(kp: KroneckerProduct, bound: Bound = None) -> Verdict:
    """Replay every instantiated condition through the equality engine."""
    bound = bound or Bound()
    verdicts = []
    p = kp.presentation
    for tag, r in kp.conditions:
        if r.lhs.steps == r.rhs.steps:
            verdicts.append(holds(bound=bound))
            continue
        v = equal_paths(p, r.lhs, r.rhs, bound)
        if not v.is_holds:
            detail = "[%s] on %s: %s" % (tag, render_term(r.lhs.source), v.detail)
            verdicts.append(Verdict(v.status, detail, v.witness, bound))
        else:
            verdicts.append(v)
    return conjoin(*verdicts) if verdicts else holds(bound=bound)


# ---------------------------------------------------------------------------
# functoriality

def kronecker_morphism(F1: TheoryMorphism, F2: TheoryMorphism,
                       bound: Bound = None):
    """The induced morphism between tensors, sending each interchange cell to
    the derived interchange of the image cells."""
    bound = bound or Bound()
    src = kronecker(F1.source, F2.source, bound)
    tgt = kronecker(F1.target, F2.target, bound)
    sym_map = {}
    for orig, renamed in sorted(src.left_symbols.items()):
        table = {F1.target.symbol(nm): s2 for nm, s2 in tgt.left_symbols.items()}
        sym_map[renamed.name] = _rename_term(F1.symbols[orig], table)
    for orig, renamed in sorted(src.right_symbols.items()):
        table = {F2.target.symbol(nm): s2 for nm, s2 in tgt.right_symbols.items()}
        sym_map[renamed.name] = _rename_term(F2.symbols[orig], table)
    cell_map = {}
    for c in F1.source.cells:
        cell_map[src.left_cells[c.name]] = _relabel_path(
            F1.cells[c.name], F1, tgt.left_symbols, tgt.left_cells)
    for c in F2.source.cells:
        cell_map[src.right_cells[c.name]] = _relabel_path(
            F2.cells[c.name], F2, tgt.right_symbols, tgt.right_cells)
    H = make_morphism(src.presentation, tgt.presentation, sym_map, {},
                      name="(%s)x(%s)" % (F1.name, F2.name))
    for (fn, gn), dname in sorted(src.delta_names.items()):
        f_img = sym_map[fn]
        g_img = sym_map[gn]
        cell_map[dname] = derived_delta(tgt, f_img, g_img)
    return make_morphism(src.presentation, tgt.presentation, sym_map, cell_map,
                         name="(%s)x(%s)" % (F1.name, F2.name)), src, tgt


def _relabel_path(path: TwoCellPath, F, symbol_table, cell_table) -> TwoCellPath:
    table = {F.target.symbol(nm): s2 for nm, s2 in symbol_table.items()}
    steps = tuple(RewriteStep(cell_table.get(s.generator, s.generator),
                              s.position, s.inverse) for s in path.steps)
    return TwoCellPath(path.arity, _rename_term(path.source, table), steps)


def kronecker_swap(p1: TheoryPresentation, p2: TheoryPresentation,
                   bound: Bound = None):
    """The symmetry isomorphism between the two tensor orders, inverting the
    interchange cells."""
    bound = bound or Bound()
    kab = kronecker(p1, p2, bound)
    kba = kronecker(p2, p1, bound)
    sym_map = {}
    for orig, renamed in kab.left_symbols.items():
        sym_map[renamed.name] = _plain_term(kba.right_symbols[orig])
    for orig, renamed in kab.right_symbols.items():
        sym_map[renamed.name] = _plain_term(kba.left_symbols[orig])
    cell_map = {}
    for c in p1.cells:
        tgt_name = kba.right_cells[c.name]
        src_cell = kab.presentation.cell(kab.left_cells[c.name])
        cell_map[kab.left_cells[c.name]] = TwoCellPath(
            src_cell.source.arity,
            _swap_term(kab, kba, src_cell.source),
            (RewriteStep(tgt_name, ()),))
    for c in p2.cells:
        tgt_name = kba.left_cells[c.name]
        src_cell = kab.presentation.cell(kab.right_cells[c.name])
        cell_map[kab.right_cells[c.name]] = TwoCellPath(
            src_cell.source.arity,
            _swap_term(kab, kba, src_cell.source),
            (RewriteStep(tgt_name, ()),))
    for (fn, gn), dname in kab.delta_names.items():
        orig_f = next(o for o, r in kab.left_symbols.items() if r.name == fn)
        orig_g = next(o for o, r in kab.right_symbols.items() if r.name == gn)
        other = kba.delta_names[(kba.left_symbols[orig_g].name,
                                 kba.right_symbols[orig_f].name)]
        cell = kab.presentation.cell(dname)
        cell_map[dname] = TwoCellPath(cell.source.arity,
                                      _swap_term(kab, kba, cell.source),
                                      (RewriteStep(other, (), inverse=True),))
    return make_morphism(kab.presentation, kba.presentation, sym_map, cell_map,
                         name="swap(%s,%s)" % (p1.name, p2.name)), kab, kba


def _swap_term(kab: KroneckerProduct, kba: KroneckerProduct, t: Term) -> Term:
    table = {}
    for orig, renamed in kab.left_symbols.items():
        table[renamed] = kba.right_symbols[orig]
    for orig, renamed in kab.right_symbols.items():
        table[renamed] = kba.left_symbols[orig]
    return _rename_term(t, table)
