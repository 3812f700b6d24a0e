"""The two factorizations of a theory-morphism, materialized cell-wise at a
truncation: the path-space middle of triples and the mapping-cylinder middle
with disjoint-union objects, plus the comparison between factorizations."""

from __future__ import annotations

from dataclasses import dataclass

from .bounds import Bound
from .engine import EngineCapacity, component_of
from .homcat import (
    FiniteCategory, HomFunctor, MorphismClass, hom_category, product_category,
)
from .morphism import (
    ClassificationReport, TheoryMorphism, classify, classify_family,
    check_morphism, hom_functor, image_term,
)
from .paths import RewriteStep, TwoCellPath, Verdict, fails, holds, replay_path, unknown
from .terms import Term, leaf_position, render_term, substitute


class FactorError(RuntimeError):
    pass


@dataclass
class TruncatedTheory:
    """A 2-theory given cell-wise: one finite category per arity, with
    operadic substitution defined where both factors stay within bounds."""
    label: str
    per_arity: dict
    bound: Bound
    subst_fn: object = None

    def category(self, n) -> FiniteCategory:
        return self.per_arity[n]

    def hom_mn(self, m, n) -> FiniteCategory:
        """T(m, n) as the m-fold product of T(1, n), never a disjoint union."""
        if m == 1:
            return self.per_arity[n]
        return product_category([self.per_arity[n]] * m)

    def substitute_objects(self, n1, i1, slot, n2, i2):
        """Operadic substitution on objects; None outside the bound."""
        if self.subst_fn is None:
            return None
        return self.subst_fn(n1, i1, slot, n2, i2)


@dataclass
class FactorizationResult:
    kind: str                    # "path" | "cylinder"
    morphism: TheoryMorphism
    middle: TruncatedTheory
    into_middle: dict            # arity -> HomFunctor (source hom-cat -> middle)
    out_of_middle: dict          # arity -> HomFunctor (middle -> target hom-cat)
    into_report: ClassificationReport
    out_report: ClassificationReport


def _require_clean(cat: FiniteCategory, what):
    if cat.contaminated:
        raise FactorError("%s carries unresolved path classes; factorization "
                          "needs certified hom-categories" % what)


def graft_paths(outer: TwoCellPath, slot: int, inner: TwoCellPath) -> TwoCellPath:
    """Horizontal substitution of paths: run the outer rewrites, then the
    inner ones inside the grafted block."""
    src = substitute(outer.source, slot, inner.source)
    steps = [RewriteStep(s.generator, s.position, s.inverse) for s in outer.steps]
    # the grafted block sits where the slot leaf lives in the outer target;
    # outer rewrite steps never enter it, so their positions carry over
    outer_target = outer.source
    from .terms import instantiate, match, subterm, replace
    # replay outer syntactically to locate the slot leaf afterwards
    return TwoCellPath(src.arity, src, tuple(steps)), outer_target


def _glue_paths(p, outer: TwoCellPath, outer_target: Term, slot: int,
                inner: TwoCellPath) -> TwoCellPath:
    src = substitute(outer.source, slot, inner.source)
    prefix = leaf_position(outer_target, slot)
    if prefix is None:
        return None
    steps = [RewriteStep(s.generator, s.position, s.inverse)
             for s in outer.steps]
    steps += [RewriteStep(s.generator, prefix + s.position, s.inverse)
              for s in inner.steps]
    out = TwoCellPath(src.arity, src, tuple(steps))
    if replay_path(p, out, strict=False) is None:
        return None
    return out


# ---------------------------------------------------------------------------
# path-space factorization: objects are triples (f, alpha, g)

def path_object(F: TheoryMorphism, bound: Bound = None) -> FactorizationResult:
    bound = bound or Bound()
    chk = check_morphism(F, bound)
    if not chk.is_holds:
        raise FactorError("path_object needs a valid morphism: %s" % chk.detail)
    per_arity = {}
    into, outof = {}, {}
    src_cats, tgt_cats, functors = {}, {}, {}
    for n in range(bound.max_arity + 1):
        C1 = hom_category(F.source, n, bound)
        C2 = hom_category(F.target, n, bound)
        _require_clean(C1, "source hom-category at arity %d" % n)
        _require_clean(C2, "target hom-category at arity %d" % n)
        hf = hom_functor(F, n, bound, C1, C2)
        if not hf.total:
            raise FactorError("morphism images leave the bound at arity %d" % n)
        src_cats[n], tgt_cats[n], functors[n] = C1, C2, hf
        objects = []
        for i in range(len(C1.objects)):
            fi = hf.obj_map[i]
            for j in range(len(C2.objects)):
                for beta in C2.hom(fi, j):
                    if not C2.is_iso(beta):
                        continue
                    objects.append((i, beta.label, j))
        names = ["(%s, %s, %s)"
                 % (C1.object_names[i],
                    C2._by_label[(hf.obj_map[i], j, bl)].rep_text,
                    C2.object_names[j])
                 for (i, bl, j) in objects]
        mid = FiniteCategory(n, bound, objects, names,
                             sorted(set(C1.warnings) | set(C2.warnings)))
        for a, (i, bl, j) in enumerate(objects):
            for b, (i2, bl2, j2) in enumerate(objects):
                for c in C1.hom(i, i2):
                    mid.add_class(MorphismClass(a, b, c.label, c.word,
                                                c.rep_text, c.unknown))
            mid._id_label[a] = C1._id_label[i]

        def compose(c1, c2, C1=C1, objects=objects):
            x = C1._by_label[(objects[c1.src][0], objects[c1.dst][0], c1.label)]
            y = C1._by_label[(objects[c2.src][0], objects[c2.dst][0], c2.label)]
            return C1.compose(x, y).label

        mid._compose = compose
        per_arity[n] = mid
        oidx = {o: k for k, o in enumerate(objects)}

        k_obj, k_lab = [], {}
        for i in range(len(C1.objects)):
            fi = hf.obj_map[i]
            k_obj.append(oidx[(i, C2._id_label[fi], fi)])
        for (i, i2), cs in C1.homs.items():
            for c in cs:
                k_lab[(i, i2, c.label)] = c.label
        into[n] = HomFunctor(C1, mid, k_obj, k_lab)

        g_obj, g_lab = [], {}
        for (i, bl, j) in objects:
            g_obj.append(j)
        for a, (i, bl, j) in enumerate(objects):
            beta = C2._by_label[(hf.obj_map[i], j, bl)]
            for b, (i2, bl2, j2) in enumerate(objects):
                beta2 = C2._by_label[(hf.obj_map[i2], j2, bl2)]
                for c in C1.hom(i, i2):
                    img = hf.image_class(c)
                    out = C2.compose(C2.compose(C2.inverse(beta), img), beta2)
                    g_lab[(a, b, c.label)] = out.label
        outof[n] = HomFunctor(mid, C2, g_obj, g_lab)

    into_rep = classify_family(into, bound)
    out_rep = classify_family(outof, bound)
    if not (into_rep.trivial_cofibration.is_holds and out_rep.fibration.is_holds):
        raise FactorError(
            "internal inconsistency: path-space legs classify as %s / %s"
            % (into_rep.trivial_cofibration, out_rep.fibration))
    middle = TruncatedTheory(
        "P(%s)" % (F.name or "?"), per_arity, bound,
        _path_subst(F, per_arity, src_cats, tgt_cats, functors, bound))
    return FactorizationResult("path", F, middle, into, outof, into_rep, out_rep)


def _path_subst(F, per_arity, src_cats, tgt_cats, functors, bound):
    def subst(n1, a, slot, n2, b):
        n = n1 + n2 - 1
        if n not in per_arity:
            return None
        (i1, bl1, j1) = per_arity[n1].objects[a]
        (i2, bl2, j2) = per_arity[n2].objects[b]
        f = substitute(src_cats[n1].objects[i1], slot, src_cats[n2].objects[i2])
        g = substitute(tgt_cats[n1].objects[j1], slot, tgt_cats[n2].objects[j2])
        Cn, Dn = src_cats[n], tgt_cats[n]
        if f not in Cn.obj_index or g not in Dn.obj_index:
            return None
        beta1 = tgt_cats[n1]._by_label[(functors[n1].obj_map[i1], j1, bl1)]
        beta2 = tgt_cats[n2]._by_label[(functors[n2].obj_map[i2], j2, bl2)]
        if isinstance(beta1.rep, str) or isinstance(beta2.rep, str):
            return None
        outer_target = replay_path(F.target, beta1.rep)[-1]
        glued = _glue_paths(F.target, beta1.rep, outer_target, slot, beta2.rep)
        if glued is None:
            return None
        try:
            comp = component_of(F.target, glued.source, bound)
        except EngineCapacity:
            return None
        ep = comp.edgepath_of_user_path(glued)
        if ep is None:
            return None
        lab = comp.label(comp.word_of(ep))
        oidx = {o: k for k, o in enumerate(per_arity[n].objects)}
        return oidx.get((Cn.obj_index[f], lab, Dn.obj_index[g]))

    return subst


# ---------------------------------------------------------------------------
# mapping-cylinder factorization: objects from both sides, homs downstairs

def mapping_cylinder(F: TheoryMorphism, bound: Bound = None
                     ) -> FactorizationResult:
    bound = bound or Bound()
    chk = check_morphism(F, bound)
    if not chk.is_holds:
        raise FactorError("mapping_cylinder needs a valid morphism: %s"
                          % chk.detail)
    per_arity = {}
    into, outof = {}, {}
    src_cats, tgt_cats, functors = {}, {}, {}
    for n in range(bound.max_arity + 1):
        C1 = hom_category(F.source, n, bound)
        C2 = hom_category(F.target, n, bound)
        _require_clean(C1, "source hom-category at arity %d" % n)
        _require_clean(C2, "target hom-category at arity %d" % n)
        hf = hom_functor(F, n, bound, C1, C2)
        if not hf.total:
            raise FactorError("morphism images leave the bound at arity %d" % n)
        src_cats[n], tgt_cats[n], functors[n] = C1, C2, hf
        # the two sides share their base, so the bare identity 1-cell is not
        # doubled; everything else is a genuine disjoint union
        from .terms import Leaf
        side1 = [j for j in range(len(C2.objects))
                 if not isinstance(C2.objects[j], Leaf)
                 or not any(isinstance(t, Leaf) for t in C1.objects)]
        objects = [(0, i) for i in range(len(C1.objects))] + \
                  [(1, j) for j in side1]
        names = [C1.object_names[i] + "^" for i in range(len(C1.objects))] + \
                [C2.object_names[j] + "*" for j in side1]

        def pi(o, hf=hf):
            side, k = o
            return hf.obj_map[k] if side == 0 else k

        mid = FiniteCategory(n, bound, objects, names,
                             sorted(set(C1.warnings) | set(C2.warnings)))
        for a, x in enumerate(objects):
            for b, y in enumerate(objects):
                for c in C2.hom(pi(x), pi(y)):
                    mid.add_class(MorphismClass(a, b, c.label, c.word,
                                                c.rep_text, c.unknown))
            mid._id_label[a] = C2._id_label[pi(x)]

        def compose(c1, c2, C2=C2, objects=objects, pi=pi):
            x = C2._by_label[(pi(objects[c1.src]), pi(objects[c1.dst]), c1.label)]
            y = C2._by_label[(pi(objects[c2.src]), pi(objects[c2.dst]), c2.label)]
            return C2.compose(x, y).label

        mid._compose = compose
        per_arity[n] = mid

        k_obj = list(range(len(C1.objects)))
        k_lab = {}
        for (i, i2), cs in C1.homs.items():
            for c in cs:
                img = hf.image_class(c)
                k_lab[(i, i2, c.label)] = img.label
        into[n] = HomFunctor(C1, mid, k_obj, k_lab)

        g_obj = [pi(o) for o in objects]
        g_lab = {}
        for a, x in enumerate(objects):
            for b, y in enumerate(objects):
                for c in C2.hom(pi(x), pi(y)):
                    g_lab[(a, b, c.label)] = c.label
        outof[n] = HomFunctor(mid, C2, g_obj, g_lab)

    into_rep = classify_family(into, bound)
    out_rep = classify_family(outof, bound)
    if not (into_rep.cofibration.is_holds and out_rep.trivial_fibration.is_holds):
        raise FactorError(
            "internal inconsistency: cylinder legs classify as %s / %s"
            % (into_rep.cofibration, out_rep.trivial_fibration))
    middle = TruncatedTheory(
        "Cyl(%s)" % (F.name or "?"), per_arity, bound,
        _cylinder_subst(F, per_arity, src_cats, tgt_cats, functors))
    return FactorizationResult("cylinder", F, middle, into, outof,
                               into_rep, out_rep)


def _cylinder_subst(F, per_arity, src_cats, tgt_cats, functors):
    from .presentations import normalize_term

    def subst(n1, a, slot, n2, b):
        n = n1 + n2 - 1
        if n not in per_arity:
            return None
        x = per_arity[n1].objects[a]
        y = per_arity[n2].objects[b]
        oidx = {o: k for k, o in enumerate(per_arity[n].objects)}
        if x[0] == 0 and y[0] == 0:
            f = substitute(src_cats[n1].objects[x[1]], slot,
                           src_cats[n2].objects[y[1]])
            f = normalize_term(F.source, f)
            i = src_cats[n].obj_index.get(f)
            return oidx.get((0, i)) if i is not None else None
        t1 = (tgt_cats[n1].objects[x[1]] if x[0] == 1
              else tgt_cats[n1].objects[functors[n1].obj_map[x[1]]])
        t2 = (tgt_cats[n2].objects[y[1]] if y[0] == 1
              else tgt_cats[n2].objects[functors[n2].obj_map[y[1]]])
        g = normalize_term(F.target, substitute(t1, slot, t2))
        j = tgt_cats[n].obj_index.get(g)
        if j is None:
            return None
        if (1, j) in oidx:
            return oidx[(1, j)]
        # the shared base identity lives on the source side
        i = src_cats[n].obj_index.get(g)
        return oidx.get((0, i)) if i is not None else None

    return subst


# ---------------------------------------------------------------------------
# comparison of a cylinder against another (cofibration, trivial fibration)
# factorization of the same morphism

@dataclass
class FactorizationComparison:
    h_objects: dict              # arity -> list: middle object -> target-cat object
    h_labels: dict               # arity -> {(a, b, label) -> label}
    hp_objects: dict             # the second lift
    alphas: dict                 # arity -> list of connecting classes
    uniqueness: Verdict
    loose_ends: dict             # arity -> {middle obj index: candidate count}


def compare_factorizations(cyl: FactorizationResult, other, bound: Bound = None,
                           seed: int = 0) -> FactorizationComparison:
    K2, G2 = other
    bound = bound or Bound()
    if K2.target != G2.source or K2.source != cyl.morphism.source \
            or G2.target != cyl.morphism.target:
        raise FactorError("comparison legs do not form a factorization of "
                          "the same morphism")
    if not check_morphism(K2, bound).is_holds:
        raise FactorError("the comparison cofibration is not a valid morphism")
    if not check_morphism(G2, bound).is_holds:
        raise FactorError("the comparison fibration is not a valid morphism")
    repK = classify(K2, bound)
    repG = classify(G2, bound)
    if not repK.cofibration.is_holds:
        raise FactorError("comparison first leg is not a cofibration: %s"
                          % repK.cofibration)
    if not repG.trivial_fibration.is_holds:
        raise FactorError("comparison second leg is not a trivial fibration: %s"
                          % repG.trivial_fibration)
    F = cyl.morphism
    for s in F.source.symbols:
        from .morphism import _symbol_term
        t = _symbol_term(s)
        if image_term(G2, image_term(K2, t)) != image_term(F, t):
            raise FactorError("comparison legs do not factor the morphism "
                              "at %s" % s.name)

    h_objects, hp_objects, h_labels, alphas, loose = {}, {}, {}, {}, {}
    unique = holds(bound=bound)
    for n, mid in sorted(cyl.middle.per_arity.items()):
        C5 = hom_category(K2.target, n, bound)
        _require_clean(C5, "comparison middle hom-category at arity %d" % n)
        hfG = hom_functor(G2, n, bound, C5, cyl.out_of_middle[n].target)
        hfK = hom_functor(K2, n, bound, cyl.into_middle[n].source, C5)
        hobj, hpobj = [], []
        loose[n] = {}
        for a, x in enumerate(mid.objects):
            if x[0] == 0:
                hobj.append(hfK.obj_map[x[1]])
                hpobj.append(hfK.obj_map[x[1]])
                continue
            want = cyl.out_of_middle[n].target.objects[x[1]]
            cands = [o for o in range(len(C5.objects))
                     if hfG.obj_map[o] == cyl.out_of_middle[n].target.obj_index[want]]
            if not cands:
                raise FactorError("no comparison image for %s at arity %d"
                                  % (mid.object_names[a], n))
            hobj.append(cands[seed % len(cands)])
            hpobj.append(cands[(seed + 1) % len(cands)]
                         if len(cands) > 1 else cands[seed % len(cands)])
            loose[n][a] = len(cands)
        labels = {}
        for (a, b), cs in sorted(mid.homs.items()):
            ha, hb = hobj[a], hobj[b]
            for c in cs:
                pick = None
                for d in C5.hom(ha, hb):
                    if hfG.label_map.get((d.src, d.dst, d.label)) == c.label:
                        pick = d.label
                        break
                if pick is None:
                    raise FactorError("no 2-cell comparison image at arity %d"
                                      % n)
                labels[(a, b, c.label)] = pick
        h_objects[n], hp_objects[n], h_labels[n] = hobj, hpobj, labels

        # connecting isos between the two lifts
        conn = []
        for a, x in enumerate(mid.objects):
            homset = [d for d in C5.hom(hobj[a], hpobj[a]) if C5.is_iso(d)]
            if not homset:
                raise FactorError("the two lifts are not connected at %s"
                                  % mid.object_names[a])
            if len(C5.hom(hobj[a], hpobj[a])) != 1:
                unique = unknown("connecting hom-set at %s has %d classes"
                                 % (mid.object_names[a],
                                    len(C5.hom(hobj[a], hpobj[a]))), bound=bound)
            alpha = homset[0]
            # the connecting iso restricts to the identity over the source
            # side and projects to an identity downstairs
            if x[0] == 0 and not C5.is_identity(alpha):
                unique = fails("connecting iso at a source-side object is "
                               "not the identity", bound=bound)
            img = hfG.label_map.get((alpha.src, alpha.dst, alpha.label))
            tgt_cat = cyl.out_of_middle[n].target
            pix = tgt_cat._id_label[hfG.obj_map[alpha.src]]
            if img != pix:
                unique = fails("connecting iso does not project to an "
                               "identity", bound=bound)
            conn.append(alpha)
        alphas[n] = conn

    # verify the triangles for both lifts, exactly on generators
    for n, mid in sorted(cyl.middle.per_arity.items()):
        K1 = cyl.into_middle[n]
        hfK = hom_functor(K2, n, bound, K1.source, hom_category(K2.target, n, bound))
        for i in range(len(K1.source.objects)):
            if h_objects[n][K1.obj_map[i]] != hfK.obj_map[i]:
                raise FactorError("comparison upper triangle fails at arity %d"
                                  % n)
    return FactorizationComparison(h_objects, h_labels, hp_objects, alphas,
                                   unique, loose)
