"""Theory-morphisms, the model-structure classifier, and the lifting
constructions.

Classification happens per arity on the induced functors between truncated
hom-categories: a morphism is a cofibration when those functors are injective
on objects, a fibration when every iso class lifts, and a weak equivalence
when each induced functor is an equivalence of the finite categories.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bounds import Bound
from .engine import EngineCapacity, compile_side, component_of, equal_paths
from .homcat import FiniteCategory, HomFunctor, MorphismClass, hom_category
from .paths import (
    PathError, RewriteStep, TwoCellPath, Verdict, conjoin, fails, holds,
    identity_path, raw_step_result, replay_path, unknown,
)
from .presentations import (
    TheoryPresentation, coproduct, normalize_term, normalize_trace,
    rename_apart, _rename_presentation, _rename_term, make_presentation,
    TermEquation,
)
from .terms import (
    Leaf, Node, Term, canonical_key, instantiate, match, pattern_leaf_paths,
    render_term, replace, subterm,
)


class MorphismError(ValueError):
    pass


@dataclass(frozen=True)
class TheoryMorphism:
    source: TheoryPresentation
    target: TheoryPresentation
    symbol_map: tuple      # ((name, Term), ...) sorted
    cell_map: tuple        # ((name, TwoCellPath), ...) sorted
    name: str = ""

    @property
    def symbols(self):
        return dict(self.symbol_map)

    @property
    def cells(self):
        return dict(self.cell_map)

    def __repr__(self):
        return "TheoryMorphism(%s: %s -> %s)" % (
            self.name or "?", self.source.name or "?", self.target.name or "?")


def make_morphism(source, target, symbol_map, cell_map=None, name=""):
    sm = tuple(sorted(symbol_map.items()))
    cm = tuple(sorted((cell_map or {}).items()))
    return TheoryMorphism(source, target, sm, cm, name)


def identity_morphism(p: TheoryPresentation) -> TheoryMorphism:
    sym = {s.name: _symbol_term(s) for s in p.symbols}
    cells = {c.name: TwoCellPath(c.source.arity, c.source,
                                 (RewriteStep(c.name, ()),))
             for c in p.cells}
    return make_morphism(p, p, sym, cells, name="id_%s" % (p.name or "?"))


def _symbol_term(s) -> Term:
    return Node(s, tuple(Leaf(i) for i in range(1, s.arity + 1)))


# ---------------------------------------------------------------------------
# images of terms, positions and paths

def raw_image(F: TheoryMorphism, t: Term) -> Term:
    if isinstance(t, Leaf):
        return t
    pat = F.symbols[t.symbol.name]
    caps = {i + 1: raw_image(F, c) for i, c in enumerate(t.children)}
    return instantiate(pat, caps)


def image_term(F: TheoryMorphism, t: Term) -> Term:
    return normalize_term(F.target, raw_image(F, t))


def image_position(F: TheoryMorphism, t: Term, pos: tuple) -> tuple:
    if not pos:
        return ()
    pat = F.symbols[t.symbol.name]
    i = pos[0]
    return pattern_leaf_paths(pat)[i] + image_position(F, t.children[i - 1], pos[1:])


from functools import lru_cache


@lru_cache(maxsize=4096)
def _signed_instance_moves(F: TheoryMorphism, gen_name: str, inverse: bool):
    """Pattern-level signed raw moves realizing one mapped generator step:
    the raw image of the cell's source is routed through its normal form to
    the mapped path, and back out to the raw image of the target."""
    q = F.target
    gen = F.source.cell(gen_name)
    s_raw = raw_image(F, gen.source)
    t_raw = raw_image(F, gen.target)
    cpath = F.cells[gen_name]
    n1, tr_sraw = normalize_trace(q, s_raw)
    n2, tr_csrc = normalize_trace(q, cpath.source)
    end = replay_path(q, cpath)[-1]
    n3, tr_end = normalize_trace(q, end)
    n4, tr_traw = normalize_trace(q, t_raw)
    if n1 != n2 or n3 != n4:
        raise PathError("cell image of %s has drifting endpoints" % gen_name)
    mid = compile_side(q, cpath)
    moves = ([("eq", i, pos, +1) for i, pos in tr_sraw]
             + [("eq", i, pos, -1) for i, pos in reversed(tr_csrc)]
             + mid
             + [("eq", i, pos, +1) for i, pos in tr_end]
             + [("eq", i, pos, -1) for i, pos in reversed(tr_traw)])
    if inverse:
        moves = [(k, l, p, -s) for k, l, p, s in reversed(moves)]
    return moves, s_raw, t_raw


def _traverse_signed(comp, start: Term, prefix: tuple, moves):
    """Walk signed raw moves through a component; returns (end, edgepath)."""
    p = comp.presentation
    cur = start
    out = []
    for kind, label, q, sign in moves:
        pos = prefix + q
        if sign > 0:
            vi = comp.vindex.get(cur)
            if vi is None:
                return None
            eidx = comp.elookup.get((vi, kind, label, pos))
            if eidx is None:
                return None
            out.append((eidx, +1))
            cur = comp.vertices[comp.edges[eidx].dst]
        else:
            # predecessor along a positive move of this kind
            try:
                s = subterm(cur, pos)
            except KeyError:
                return None
            if kind == "eq":
                eq = p.equations[label]
                caps = match(eq.rhs, s)
                if caps is None:
                    return None
                u = replace(cur, pos, instantiate(eq.lhs, caps))
            else:
                cell = p.cell(label)
                caps = match(cell.target, s)
                if caps is None:
                    return None
                u = replace(cur, pos, instantiate(cell.source, caps))
            ui = comp.vindex.get(u)
            if ui is None:
                return None
            eidx = comp.elookup.get((ui, kind, label, pos))
            if eidx is None or comp.vertices[comp.edges[eidx].dst] != cur:
                return None
            out.append((eidx, -1))
            cur = u
    return cur, out


def image_edgepath(F: TheoryMorphism, path: TwoCellPath, comp):
    """The image of a source path as a signed edgepath in a target component.

    The source path replays modulo the source equations; hops between
    equation-equivalent source representatives become equation bridges in
    the target complex.
    """
    from .paths import equation_class
    src_p = F.source
    cur = path.source
    prev_img = raw_image(F, cur)
    if prev_img not in comp.vindex:
        return None
    edgepath = []
    for st in path.steps:
        raw = raw_step_result(src_p, cur, st)
        member = cur
        if raw is None and src_p.equations:
            for cand in equation_class(src_p, cur):
                raw = raw_step_result(src_p, cand, st)
                if raw is not None:
                    member = cand
                    break
        if raw is None:
            return None
        if member != cur:
            mem_img = raw_image(F, member)
            if mem_img not in comp.vindex:
                return None
            bridge = comp.eps_bridge(prev_img, mem_img)
            if bridge is None:
                return None
            edgepath.extend(bridge)
            prev_img = mem_img
        phat = image_position(F, member, st.position)
        moves, _, _ = _signed_instance_moves(F, st.generator, st.inverse)
        inst = _traverse_signed(comp, prev_img, phat, moves)
        if inst is None:
            return None
        end, ep2 = inst
        edgepath.extend(ep2)
        cur = raw
        prev_img = raw_image(F, cur)
        if end != prev_img:
            return None
    return edgepath


# ---------------------------------------------------------------------------
# induced functors between hom-categories

def hom_functor(F: TheoryMorphism, arity: int, bound: Bound,
                source_cat=None, target_cat=None) -> HomFunctor:
    C = source_cat or hom_category(F.source, arity, bound)
    D = target_cat or hom_category(F.target, arity, bound)
    obj_map = []
    for t in C.objects:
        img = image_term(F, t)
        obj_map.append(D.obj_index.get(img))
    if C.contaminated or D.contaminated:
        # class images are never consulted on approximate categories
        return HomFunctor(C, D, obj_map, {}, note="approximate")
    if C.class_count() > 2500 or D.class_count() > 2500:
        return HomFunctor(C, D, obj_map, {}, note="oversize")
    label_map = {}
    comp_cache = {}
    for (i, j), classes in sorted(C.homs.items()):
        ti, tj = obj_map[i], obj_map[j]
        for c in classes:
            key = (i, j, c.label)
            if ti is None or tj is None:
                label_map[key] = None
                continue
            src_img = D.objects[ti]
            if src_img not in comp_cache:
                try:
                    comp_cache[src_img] = component_of(F.target, src_img, bound)
                except EngineCapacity:
                    comp_cache[src_img] = None
            comp = comp_cache[src_img]
            if comp is None:
                label_map[key] = None
                continue
            ep = image_edgepath(F, c.rep, comp)
            if ep is None:
                label_map[key] = None
                continue
            label_map[key] = comp.label(comp.word_of(ep))
    return HomFunctor(C, D, obj_map, label_map)


# ---------------------------------------------------------------------------
# validation

def check_morphism(F: TheoryMorphism, bound: Bound = None) -> Verdict:
    bound = bound or Bound()
    src, tgt = F.source, F.target
    for s in src.symbols:
        t = F.symbols.get(s.name)
        if t is None:
            return fails("symbol %s has no image" % s.name, bound=bound)
        if t.arity != s.arity:
            return fails("symbol %s image has arity %d, expected %d"
                         % (s.name, t.arity, s.arity), bound=bound)
        try:
            normalize_term(tgt, t)
        except Exception as e:
            return fails("symbol %s image invalid: %s" % (s.name, e), bound=bound)
    for eq in src.equations:
        if image_term(F, eq.lhs) != image_term(F, eq.rhs):
            return fails("equation %r not respected" % (eq,), bound=bound)
    for c in src.cells:
        cp = F.cells.get(c.name)
        if cp is None:
            return fails("2-cell %s has no image" % c.name, bound=bound)
        try:
            vis = replay_path(tgt, cp)
        except PathError as e:
            return fails("2-cell %s image does not replay: %s" % (c.name, e),
                         bound=bound)
        if normalize_term(tgt, vis[0]) != image_term(F, c.source) or \
                normalize_term(tgt, vis[-1]) != image_term(F, c.target):
            return fails("2-cell %s image has mismatched endpoints" % c.name,
                         bound=bound)
        if c.invertible:
            for st in cp.steps:
                if not tgt.cell(st.generator).invertible:
                    return fails("invertible 2-cell %s maps through the "
                                 "non-invertible %s" % (c.name, st.generator),
                                 bound=bound)
    pending_unknown = None
    for r in src.relations:
        v = _relation_image_verdict(F, r, bound)
        if v.is_fails:
            return fails("relation %r not respected: %s" % (r, v.detail),
                         witness=v.witness, bound=bound)
        if v.is_unknown:
            pending_unknown = v
    if pending_unknown is not None:
        return unknown("a relation image check exhausted the budget", bound=bound)
    return holds(bound=bound)


def _relation_image_verdict(F, rel, bound):
    tgt = F.target
    src_img = image_term(F, rel.lhs.source)
    try:
        comp = component_of(tgt, src_img, bound)
    except EngineCapacity:
        return unknown("capacity", bound=bound)
    ea = image_edgepath(F, rel.lhs, comp)
    eb = image_edgepath(F, rel.rhs, comp)
    if ea is None or eb is None:
        return unknown("image leaves the truncated complex", bound=bound)
    la = comp.label(comp.word_of(ea))
    lb = comp.label(comp.word_of(eb))
    if la == lb and comp.mode in ("trivial", "tc"):
        return holds(bound=bound)
    if la == lb:
        return unknown("homology labels agree only", bound=bound)
    if comp.mode in ("trivial", "tc"):
        return fails("images in distinct classes", bound=bound)
    from .engine import separating_functional
    cert = separating_functional(comp, comp.word_of(ea), comp.word_of(eb))
    if cert is not None:
        return fails("images separated by homology", witness=cert, bound=bound)
    return unknown("budget exhausted", bound=bound)


# ---------------------------------------------------------------------------
# classification

@dataclass
class ClassificationReport:
    weak_equivalence: Verdict
    fibration: Verdict
    cofibration: Verdict
    trivial_fibration: Verdict
    trivial_cofibration: Verdict
    per_arity: dict
    bound: Bound

    def as_dict(self):
        d = {
            "weak_equivalence": self.weak_equivalence.status,
            "fibration": self.fibration.status,
            "cofibration": self.cofibration.status,
            "trivial_fibration": self.trivial_fibration.status,
            "trivial_cofibration": self.trivial_cofibration.status,
            "bound": self.bound.as_dict(),
            "per_arity": {str(n): {k: v.status for k, v in d2.items()}
                          for n, d2 in sorted(self.per_arity.items())},
        }
        details = {}
        for name, v in (("weak_equivalence", self.weak_equivalence),
                        ("fibration", self.fibration),
                        ("cofibration", self.cofibration)):
            if v.detail:
                details[name] = v.detail
        if details:
            d["details"] = details
        return d


def classify_family(family: dict, bound: Bound) -> ClassificationReport:
    """Classify a per-arity family of hom functors."""
    per_arity = {}
    cof, fib, weq = [], [], []
    for n in sorted(family):
        hf = family[n]
        vc = _cofibration_at(hf, n)
        vf = _fibration_at(hf, n, bound)
        vw = _weq_at(hf, n, bound)
        per_arity[n] = {"cofibration": vc, "fibration": vf, "weak_equivalence": vw}
        cof.append(vc)
        fib.append(vf)
        weq.append(vw)
    report = ClassificationReport(
        weak_equivalence=conjoin(*weq) if weq else holds(),
        fibration=conjoin(*fib) if fib else holds(),
        cofibration=conjoin(*cof) if cof else holds(),
        trivial_fibration=holds(), trivial_cofibration=holds(),
        per_arity=per_arity, bound=bound)
    report.trivial_fibration = conjoin(report.fibration, report.weak_equivalence)
    report.trivial_cofibration = conjoin(report.cofibration, report.weak_equivalence)
    return report


def classify(F: TheoryMorphism, bound: Bound = None) -> ClassificationReport:
    bound = bound or Bound()
    chk = check_morphism(F, bound)
    if chk.is_fails:
        raise MorphismError("classify requires a valid morphism: %s" % chk.detail)
    family = {n: hom_functor(F, n, bound) for n in range(bound.max_arity + 1)}
    return classify_family(family, bound)


def _cofibration_at(hf: HomFunctor, n) -> Verdict:
    if any(i is None for i in hf.obj_map):
        return unknown("arity %d: an object image leaves the bound" % n)
    seen = {}
    for i, j in enumerate(hf.obj_map):
        if j in seen:
            return fails("arity %d: objects %s and %s collapse" %
                         (n, hf.source.object_names[seen[j]],
                          hf.source.object_names[i]))
        seen[j] = i
    return holds()


def _fibration_at(hf: HomFunctor, n, bound) -> Verdict:
    C, D = hf.source, hf.target
    if C.contaminated or D.contaminated or hf.note:
        return unknown("arity %d: hom-categories carry unresolved classes "
                       "or exceed the budget" % n)
    exhausted = False
    if not hf.total:
        exhausted = True
    for a in range(len(C.objects)):
        fa = hf.obj_map[a]
        if fa is None:
            exhausted = True
            continue
        for (i, j), classes in sorted(D.homs.items()):
            if i != fa:
                continue
            for beta in classes:
                if not D.is_iso(beta):
                    continue
                if _find_lift(hf, a, beta) is None:
                    if C.contaminated or D.contaminated:
                        return unknown("arity %d: no lift found for %s under "
                                       "approximate classes" % (n, beta.rep_text))
                    return fails("arity %d: iso %s from %s has no lift at %s" %
                                 (n, beta.rep_text, D.object_names[i],
                                  C.object_names[a]))
    if exhausted:
        return unknown("arity %d: images leave the bound" % n)
    return holds()


def _find_lift(hf: HomFunctor, a: int, beta: MorphismClass):
    C = hf.source
    candidates = []
    for (i, j), classes in sorted(C.homs.items()):
        if i != a:
            continue
        for alpha in classes:
            if not C.is_iso(alpha):
                continue
            lab = hf.label_map.get((alpha.src, alpha.dst, alpha.label))
            if lab is None:
                continue
            if hf.obj_map[alpha.dst] == beta.dst and lab == beta.label:
                candidates.append(alpha)
    if not candidates:
        return None
    # shortest representative first, then canonical order
    return min(candidates,
               key=lambda c: (len(c.rep.steps) if not isinstance(c.rep, str)
                              else len(c.rep), c.dst, str(c.label)))


def _weq_at(hf: HomFunctor, n, bound) -> Verdict:
    from .equivalence import build_certified_witness
    res = build_certified_witness(hf)
    if isinstance(res, Verdict):
        v = res
        return Verdict(v.status, "arity %d: %s" % (n, v.detail), v.witness, bound)
    return holds()


# ---------------------------------------------------------------------------
# pushout of presentations along morphisms

def pushout(F: TheoryMorphism, G: TheoryMorphism, max_arity=4, max_size=8):
    """Pushout of P1 <-F- P0 -G-> P2, with the two injections."""
    if F.source != G.source:
        raise MorphismError("pushout legs must share their source")
    p0, p1, p2 = F.source, F.target, G.target
    (st1, ct1), (st2, ct2) = rename_apart(p1, p2)
    q = coproduct(p1, p2)
    eqs = list(q.equations)
    for s in p0.symbols:
        a = _rename_term(raw_image(F, _symbol_term(s)), st1)
        b = _rename_term(raw_image(G, _symbol_term(s)), st2)
        if a == b:
            continue
        if canonical_key(a) < canonical_key(b):
            a, b = b, a
        eqs.append(TermEquation(a, b, ordered=(a.size == b.size
                                               and sorted(canonical_key(a)[1])
                                               == sorted(canonical_key(b)[1]))))
    from .presentations import _complete_at_bound
    merged = make_presentation(q.symbols, eqs, q.cells, (), name=q.name)
    merged = _complete_at_bound(merged, max_arity, max_size)
    rels = list(q.relations)
    from .paths import Relation
    for c in p0.cells:
        pa = _inject_path(F.cells[c.name], st1, ct1)
        pb = _inject_path(G.cells[c.name], st2, ct2)
        rels.append(Relation(pa, pb))
    out = make_presentation(merged.symbols, merged.equations, merged.cells,
                            tuple(rels), name="po(%s,%s)" % (F.name, G.name))
    inj1 = make_morphism(p1, out,
                         {s.name: _symbol_term(st1[s]) for s in p1.symbols},
                         {c.name: TwoCellPath(c.source.arity,
                                              _rename_term(c.source, st1),
                                              (RewriteStep(ct1[c.name], ()),))
                          for c in p1.cells},
                         name="po_inj1")
    inj2 = make_morphism(p2, out,
                         {s.name: _symbol_term(st2[s]) for s in p2.symbols},
                         {c.name: TwoCellPath(c.source.arity,
                                              _rename_term(c.source, st2),
                                              (RewriteStep(ct2[c.name], ()),))
                          for c in p2.cells},
                         name="po_inj2")
    return out, inj1, inj2


def _inject_path(path: TwoCellPath, st, ct) -> TwoCellPath:
    steps = tuple(RewriteStep(ct.get(s.generator, s.generator), s.position, s.inverse)
                  for s in path.steps)
    return TwoCellPath(path.arity, _rename_term(path.source, st), steps)


# ---------------------------------------------------------------------------
# composition of morphisms

def compose_morphisms(F: TheoryMorphism, G: TheoryMorphism,
                      bound: Bound = None) -> TheoryMorphism:
    """G after F."""
    if F.target != G.source:
        raise MorphismError("morphisms do not compose")
    bound = bound or Bound()
    sym = {s.name: image_term(G, F.symbols[s.name]) for s in F.source.symbols}
    cells = {}
    for c in F.source.cells:
        cells[c.name] = map_user_path(G, F.cells[c.name], bound)
    return make_morphism(F.source, G.target, sym, cells,
                         name="%s;%s" % (F.name, G.name))


def map_user_path(F: TheoryMorphism, path: TwoCellPath, bound: Bound
                  ) -> TwoCellPath:
    """The image of a path, re-expressed as target generator steps.

    Prefers the literal whiskered instance; when normalization displaces it,
    falls back to any representative of the image class found by search.
    """
    tgt = F.target
    src_img = image_term(F, path.source)
    # literal route: concatenate the instantiated cell moves
    steps = []
    cur_src = normalize_term(F.source, path.source)
    ok = True
    for st in path.steps:
        phat = image_position(F, cur_src, st.position)
        moves, _, _ = _signed_instance_moves(F, st.generator, st.inverse)
        for kind, label, q, sign in moves:
            if kind != "cell":
                continue
            steps.append(RewriteStep(label, phat + q, sign < 0))
        raw_next = raw_step_result(F.source, cur_src, st)
        cur_src = normalize_term(F.source, raw_next)
    cand = TwoCellPath(src_img.arity, src_img, tuple(steps))
    vis = replay_path(tgt, cand, strict=False)
    want_tgt = image_term(F, replay_path(F.source, path)[-1])
    if vis is not None and vis[-1] == want_tgt:
        return cand
    # class route: search a representative of the image class
    try:
        comp = component_of(tgt, src_img, bound)
    except EngineCapacity:
        raise MorphismError("image path leaves the truncated complex")
    ep = image_edgepath(F, path, comp)
    if ep is None:
        raise MorphismError("image path leaves the truncated complex")
    lab = comp.label(comp.word_of(ep))
    found = _search_path_with_label(tgt, comp, src_img, want_tgt, lab, bound)
    if found is None:
        raise MorphismError("no representative of the image class at this bound")
    return found


def _search_path_with_label(p, comp, src, dst, label, bound):
    from .paths import user_steps
    start = TwoCellPath(src.arity, src, ())
    frontier = [(src, ())]
    seen = {(src, comp.label(()))}
    if src == dst and comp.label(()) == label:
        return start
    for _ in range(bound.max_path_len):
        nxt = []
        for t, steps in frontier:
            for st, raw in user_steps(p, t):
                cand = steps + (st,)
                path1 = TwoCellPath(src.arity, src, cand)
                ep = comp.edgepath_of_user_path(path1)
                if ep is None:
                    continue
                lab = comp.label(comp.word_of(ep))
                t2 = normalize_term(p, raw)
                key = (t2, lab)
                if key in seen:
                    continue
                seen.add(key)
                if t2 == dst and lab == label:
                    return path1
                nxt.append((t2, cand))
        frontier = nxt
    return None


# ---------------------------------------------------------------------------
# lifting constructions

def lift_iso(F: TheoryMorphism, f: Term, beta: TwoCellPath,
             bound: Bound = None) -> TwoCellPath:
    """First lift of an iso class along a fibration, in canonical order."""
    bound = bound or Bound()
    n = f.arity
    C = hom_category(F.source, n, bound)
    D = hom_category(F.target, n, bound)
    hf = hom_functor(F, n, bound, C, D)
    fn = normalize_term(F.source, f)
    a = C.obj_index.get(fn)
    if a is None:
        raise MorphismError("object %s is outside the bound" % render_term(fn))
    comp = component_of(F.target, image_term(F, fn), bound)
    ep = comp.edgepath_of_user_path(beta)
    if ep is None:
        raise MorphismError("the iso to lift leaves the truncated complex")
    blabel = comp.label(comp.word_of(ep))
    btgt = replay_path(F.target, beta)[-1]
    j = D.obj_index.get(btgt)
    target = D._by_label.get((hf.obj_map[a], j, blabel))
    if target is None or not D.is_iso(target):
        raise MorphismError("lift_iso expects an iso class within the bound")
    alpha = _find_lift(hf, a, target)
    if alpha is None:
        raise MorphismError("no lift found at this bound "
                            "(inconsistent with a fibration verdict)")
    return alpha.rep


def lift_square_first(F: TheoryMorphism, G: TheoryMorphism,
                      U: TheoryMorphism, V: TheoryMorphism,
                      bound: Bound = None) -> TheoryMorphism:
    """Filler for a square with a trivial cofibration on the left and a
    fibration on the right, built from a retraction of F and fibration lifts."""
    bound = bound or Bound()
    _require_square(F, U, G, V, bound)
    retr = _retraction(F, bound)
    t2, t3 = F.target, G.source
    sym_h, cell_h = {}, {}
    delta = {}
    for s in t2.symbols:
        f = _symbol_term(s)
        fp = image_term(retr, f)
        uf = image_term(U, fp)
        iota = retr.witness_iso[s.name]          # F(F'(f)) ~ f in T2
        gamma = map_user_path(V, iota, bound)     # G(U F'(f)) ~ V(f) in T4
        dlt = lift_iso(G, uf, gamma, bound)
        delta[s.name] = dlt
        sym_h[s.name] = replay_path(t3, dlt)[-1]
    for c in t2.cells:
        cp = TwoCellPath(c.source.arity, c.source, (RewriteStep(c.name, ()),))
        fpc = map_user_path(retr, cp, bound)
        ufc = map_user_path(U, fpc, bound)
        d_src = extend_by_substitution(t3, delta, c.source)
        d_tgt = extend_by_substitution(t3, delta, c.target)
        from .paths import compose_paths, invert_path
        h = compose_paths(t3, compose_paths(t3, invert_path(t3, d_src), ufc), d_tgt)
        cell_h[c.name] = h
    H = make_morphism(t2, t3, sym_h, cell_h, name="lift1(%s)" % (F.name or "?"))
    _verify_triangles(F, U, G, V, H, bound)
    return H


def extend_by_substitution(p, per_symbol: dict, term: Term) -> TwoCellPath:
    """Extend a per-symbol family of parallel paths to a composite 1-cell.

    per_symbol[name] is a path A_name -> B_name at the symbol's arity; the
    result runs from the A-substitution image of `term` to its B-image, by
    rewriting the root first and then each argument in place.
    """
    a_pat = {n: replay_path(p, pi)[0] for n, pi in per_symbol.items()}
    b_pat = {n: replay_path(p, pi)[-1] for n, pi in per_symbol.items()}

    def a_of(t):
        if isinstance(t, Leaf):
            return t
        caps = {i + 1: a_of(c) for i, c in enumerate(t.children)}
        return instantiate(a_pat[t.symbol.name], caps)

    def build(t):
        if isinstance(t, Leaf):
            return ()
        steps = list(per_symbol[t.symbol.name].steps)
        leafpaths = pattern_leaf_paths(b_pat[t.symbol.name])
        for i, kid in enumerate(t.children, 1):
            prefix = leafpaths[i]
            steps.extend(RewriteStep(s.generator, prefix + s.position, s.inverse)
                         for s in build(kid))
        return tuple(steps)

    src = a_of(term)
    out = TwoCellPath(src.arity, src, build(term))
    if replay_path(p, out, strict=False) is None:
        raise MorphismError("substitution extension does not replay at this "
                            "bound (equations displace the instance)")
    return out


def _retraction(F: TheoryMorphism, bound: Bound):
    """A retraction F' with F' o F = id, found by essential-image search."""
    t1, t2 = F.source, F.target
    sym, cells, witness = {}, {}, {}
    for s in t2.symbols:
        f = _symbol_term(s)
        n = s.arity
        C1 = hom_category(t1, n, bound)
        C2 = hom_category(t2, n, bound)
        hf = hom_functor(F, n, bound, C1, C2)
        fi = C2.obj_index.get(normalize_term(t2, f))
        best = None
        for a, t in enumerate(C1.objects):
            ia = hf.obj_map[a]
            if ia is None:
                continue
            if ia == fi:
                best = (a, identity_path(C2.objects[fi]))
                break
            for cls in C2.hom(ia, fi):
                if C2.is_iso(cls):
                    best = (a, cls.rep)
                    break
            if best:
                break
        if best is None:
            raise MorphismError("no retraction witness for %s at this bound"
                                % s.name)
        a, iota = best
        sym[s.name] = C1.objects[a]
        witness[s.name] = iota
    for c in t2.cells:
        n = c.source.arity
        C1 = hom_category(t1, n, bound)
        C2 = hom_category(t2, n, bound)
        hf = hom_functor(F, n, bound, C1, C2)
        src1 = normalize_term(t1, _subst_image(sym, c.source))
        tgt1 = normalize_term(t1, _subst_image(sym, c.target))
        a, b = C1.obj_index.get(src1), C1.obj_index.get(tgt1)
        if a is None or b is None:
            raise MorphismError("retraction image outside the bound")
        cp = TwoCellPath(n, c.source, (RewriteStep(c.name, ()),))
        comp = component_of(t2, image_term(F, src1), bound)
        # conjugate the cell by the chosen witnesses and pull back
        from .paths import compose_paths, invert_path
        w_src = extend_by_substitution(t2, witness, c.source)
        w_tgt = extend_by_substitution(t2, witness, c.target)
        conj = compose_paths(t2, compose_paths(t2, w_src, cp),
                             invert_path(t2, w_tgt))
        ep = comp.edgepath_of_user_path(conj)
        if ep is None:
            raise MorphismError("retraction cell image leaves the complex")
        lab = comp.label(comp.word_of(ep))
        found = None
        for cls in C1.hom(a, b):
            l2 = hf.label_map.get((cls.src, cls.dst, cls.label))
            if l2 == lab:
                found = cls.rep
                break
        if found is None:
            raise MorphismError("no retraction image for cell %s" % c.name)
        cells[c.name] = found
    Fp = make_morphism(t2, t1, sym, cells, name="retr(%s)" % (F.name or "?"))
    v = check_morphism(Fp, bound)
    if v.is_fails:
        raise MorphismError("retraction is not a morphism: %s" % v.detail)
    Fp = _with_witness(Fp, witness)
    return Fp


def _with_witness(Fp, witness):
    object.__setattr__(Fp, "witness_iso", witness)
    return Fp


def _subst_image(sym, term):
    if isinstance(term, Leaf):
        return term
    caps = {i + 1: _subst_image(sym, c) for i, c in enumerate(term.children)}
    return instantiate(sym[term.symbol.name], caps)


def lift_square_second(F: TheoryMorphism, G: TheoryMorphism,
                       U: TheoryMorphism, V: TheoryMorphism,
                       bound: Bound = None, reverse: bool = False
                       ) -> TheoryMorphism:
    """Filler for a square with a cofibration on the left and a trivial
    fibration on the right; 1-cells by surjectivity search, 2-cells through
    the hom-level bijection."""
    bound = bound or Bound()
    _require_square(F, U, G, V, bound)
    t1, t2, t3 = F.source, F.target, G.source
    forced = {}
    for s in t1.symbols:
        img = image_term(F, _symbol_term(s))
        if isinstance(img, Node) and all(isinstance(c, Leaf) for c in img.children) \
                and [c.index for c in img.children] == list(range(1, s.arity + 1)):
            forced[img.symbol.name] = image_term(U, _symbol_term(s))
    sym_h = {}
    for s in t2.symbols:
        if s.name in forced:
            sym_h[s.name] = forced[s.name]
            continue
        n = s.arity
        want = image_term(V, _symbol_term(s))
        C3 = hom_category(t3, n, bound)
        candidates = []
        for t in C3.objects:
            if image_term(G, t) == want:
                candidates.append(t)
        if not candidates:
            raise MorphismError("no 1-cell preimage for %s at this bound" % s.name)
        sym_h[s.name] = candidates[-1] if reverse else candidates[0]
    Hpartial = make_morphism(t2, t3, sym_h, {}, name="")
    cell_h = {}
    for c in t2.cells:
        n = c.source.arity
        src3 = normalize_term(t3, _subst_image(sym_h, c.source))
        tgt3 = normalize_term(t3, _subst_image(sym_h, c.target))
        vc = map_user_path(V, TwoCellPath(n, c.source, (RewriteStep(c.name, ()),)),
                           bound)
        C3 = hom_category(t3, n, bound)
        hfG = hom_functor(G, n, bound, C3, hom_category(G.target, n, bound))
        comp4 = component_of(G.target, image_term(G, src3), bound)
        ep = comp4.edgepath_of_user_path(vc)
        if ep is None:
            raise MorphismError("V-image of %s leaves the complex" % c.name)
        lab4 = comp4.label(comp4.word_of(ep))
        a, b = C3.obj_index.get(src3), C3.obj_index.get(tgt3)
        if a is None or b is None:
            raise MorphismError("H-image object of %s outside bound" % c.name)
        found = None
        for cls in C3.hom(a, b):
            l2 = hfG.label_map.get((cls.src, cls.dst, cls.label))
            if l2 == lab4:
                found = cls.rep
                break
        if found is None:
            raise MorphismError("no 2-cell preimage for %s at this bound" % c.name)
        cell_h[c.name] = found
    H = make_morphism(t2, t3, sym_h, cell_h,
                      name="lift2(%s)%s" % (F.name or "?", "-rev" if reverse else ""))
    _verify_triangles(F, U, G, V, H, bound)
    return H


def _require_square(F, U, G, V, bound):
    if F.source != U.source or F.target != V.source \
            or U.target != G.source or V.target != G.target:
        raise MorphismError("square legs do not line up")
    for s in F.source.symbols:
        a = image_term(V, image_term(F, _symbol_term(s)))
        b = image_term(G, image_term(U, _symbol_term(s)))
        if a != b:
            raise MorphismError("square does not commute at symbol %s" % s.name)
    for c in F.source.cells:
        pa = TwoCellPath(c.source.arity, c.source, (RewriteStep(c.name, ()),))
        left = map_user_path(V, map_user_path(F, pa, bound), bound)
        right = map_user_path(G, map_user_path(U, pa, bound), bound)
        if not _same_class(V.target, left, right, bound):
            raise MorphismError("square does not commute at 2-cell %s" % c.name)


def _verify_triangles(F, U, G, V, H, bound):
    for s in F.source.symbols:
        t = _symbol_term(s)
        if image_term(H, image_term(F, t)) != image_term(U, t):
            raise MorphismError("upper triangle fails at %s" % s.name)
    for s in H.source.symbols:
        t = _symbol_term(s)
        if image_term(G, image_term(H, t)) != image_term(V, t):
            raise MorphismError("lower triangle fails at %s" % s.name)
    bnd = bound
    for c in F.source.cells:
        n = c.source.arity
        pa = TwoCellPath(n, c.source, (RewriteStep(c.name, ()),))
        left = map_user_path(H, map_user_path(F, pa, bnd), bnd)
        right = map_user_path(U, pa, bnd)
        if not _same_class(H.target, left, right, bnd):
            raise MorphismError("upper triangle fails at 2-cell %s" % c.name)
    for c in H.source.cells:
        n = c.source.arity
        pa = TwoCellPath(n, c.source, (RewriteStep(c.name, ()),))
        left = map_user_path(G, map_user_path(H, pa, bnd), bnd)
        right = map_user_path(V, pa, bnd)
        if not _same_class(G.target, left, right, bnd):
            raise MorphismError("lower triangle fails at 2-cell %s" % c.name)


def _same_class(p, a, b, bound):
    va = replay_path(p, a)
    vb = replay_path(p, b)
    if va[0] != vb[0] or va[-1] != vb[-1]:
        return False
    v = equal_paths(p, a, b, bound)
    return v.is_holds


def retract_lift(H: TheoryMorphism, J: TheoryMorphism,
                 Hp: TheoryMorphism, Jp: TheoryMorphism,
                 F: TheoryMorphism, G: TheoryMorphism,
                 f: Term, beta: TwoCellPath, bound: Bound = None) -> TwoCellPath:
    """Lift along a retract of a fibration: J(L_G(H(f), H'(beta)))."""
    bound = bound or Bound()
    for s in F.source.symbols:
        t = _symbol_term(s)
        if image_term(J, image_term(H, t)) != normalize_term(F.source, t):
            raise MorphismError("retract row J o H is not the identity")
        if image_term(G, image_term(H, t)) != image_term(Hp, image_term(F, t)):
            raise MorphismError("retract left square does not commute")
    for s in Hp.source.symbols:
        t = _symbol_term(s)
        if image_term(Jp, image_term(Hp, t)) != normalize_term(Hp.source, t):
            raise MorphismError("retract row J' o H' is not the identity")
    for s in J.source.symbols:
        t = _symbol_term(s)
        if image_term(F, image_term(J, t)) != image_term(Jp, image_term(G, t)):
            raise MorphismError("retract right square does not commute")
    hf = image_term(H, f)
    hbeta = map_user_path(Hp, beta, bound)
    inner = lift_iso(G, hf, hbeta, bound)
    out = map_user_path(J, inner, bound)
    img = map_user_path(F, out, bound)
    if not _same_class(F.target, img, beta, bound):
        raise MorphismError("retract lift does not project to the given iso")
    return out
