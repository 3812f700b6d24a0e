"""Truncated hom-categories materialized as finite categories, plus exports."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bounds import Bound
from .engine import Component, EngineCapacity, component_of
from .paths import RewriteStep, TwoCellPath, identity_path, replay_path, user_steps
from .presentations import TheoryPresentation, enumerate_normal_forms, normalize_term
from .terms import Term, canonical_key, render_term

_CLASS_CAP_PER_HOM = 256
_CLASS_CAP_TOTAL = 20000


@dataclass
class MorphismClass:
    src: int
    dst: int
    label: object
    word: tuple
    rep: object                  # TwoCellPath | str (product categories)
    unknown: bool = False

    @property
    def rep_text(self):
        return self.rep if isinstance(self.rep, str) else repr(self.rep)


@dataclass
class HomFunctor:
    """A functor between two materialized hom-categories, given by its object
    map and per-class image labels (None marks an image outside the bound)."""
    source: "FiniteCategory"
    target: "FiniteCategory"
    obj_map: list
    label_map: dict
    note: str = ""

    def image_class(self, c: MorphismClass):
        lab = self.label_map.get((c.src, c.dst, c.label))
        if lab is None:
            return None
        i, j = self.obj_map[c.src], self.obj_map[c.dst]
        return self.target._by_label.get((i, j, lab))

    @property
    def total(self):
        return (all(i is not None for i in self.obj_map)
                and all(v is not None for v in self.label_map.values()))


class FiniteCategory:
    """Objects, morphism classes, and an exact composition table."""

    def __init__(self, arity, bound, objects, object_names, warnings=()):
        self.arity = arity
        self.bound = bound
        self.objects = list(objects)
        self.object_names = list(object_names)
        self.obj_index = {o: i for i, o in enumerate(self.objects)}
        self.homs = {}                # (i, j) -> [MorphismClass]
        self._by_label = {}           # (i, j, label) -> MorphismClass
        self.warnings = list(warnings)
        self._compose = None
        self._id_label = {}           # object index -> identity label

    @property
    def contaminated(self):
        return any(w.startswith("unknown") or w.startswith("budget")
                   for w in self.warnings)

    def add_class(self, c: MorphismClass):
        self.homs.setdefault((c.src, c.dst), []).append(c)
        self._by_label[(c.src, c.dst, c.label)] = c

    def hom(self, i, j):
        return self.homs.get((i, j), [])

    def identity(self, i):
        c = self._by_label.get((i, i, self._id_label[i]))
        if c is None:
            raise KeyError("no identity at object %d" % i)
        return c

    def compose(self, c1: MorphismClass, c2: MorphismClass):
        """The class of c1 followed by c2."""
        if c1.dst != c2.src:
            raise ValueError("classes do not compose")
        if self._compose is None:
            raise RuntimeError("composition table missing")
        label = self._compose(c1, c2)
        out = self._by_label.get((c1.src, c2.dst, label))
        if out is None:
            raise KeyError("composite class left the truncated table")
        return out

    def class_count(self):
        return sum(len(v) for v in self.homs.values())

    def is_identity(self, c: MorphismClass):
        return c.src == c.dst and c.label == self._id_label[c.src]

    def inverse(self, c: MorphismClass):
        for d in self.hom(c.dst, c.src):
            try:
                if self.compose(c, d).label == self.identity(c.src).label and \
                   self.compose(d, c).label == self.identity(c.dst).label:
                    return d
            except KeyError:
                continue
        return None

    def is_iso(self, c: MorphismClass):
        return self.inverse(c) is not None

    def check_laws(self):
        """Exact unit and associativity on the tables."""
        for (i, j), cs in self.homs.items():
            for c in cs:
                if self.compose(self.identity(i), c).label != c.label:
                    return False
                if self.compose(c, self.identity(j)).label != c.label:
                    return False
        for (i, j), cs in self.homs.items():
            for (j2, k), ds in self.homs.items():
                if j2 != j:
                    continue
                for (k2, l), es in self.homs.items():
                    if k2 != k:
                        continue
                    for a in cs:
                        for b in ds:
                            for c in es:
                                if self.compose(self.compose(a, b), c).label != \
                                   self.compose(a, self.compose(b, c)).label:
                                    return False
        return True


# ---------------------------------------------------------------------------
# construction from a presentation

def hom_category(p: TheoryPresentation, arity: int, bound: Bound = None,
                 ) -> FiniteCategory:
    """The truncated category of arity-n operations and 2-cell classes."""
    bound = bound or Bound()
    if arity > bound.max_arity:
        raise ValueError("arity %d exceeds the bound %r" % (arity, bound))
    if not p.all_invertible:
        return _hom_category_fallback(p, arity, bound)

    seeds = enumerate_normal_forms(p, arity, bound.max_term_size)
    warnings = []
    comps = []
    seen = set()
    for s in seeds:
        if s in seen:
            continue
        try:
            comp = component_of(p, s, bound)
        except EngineCapacity:
            warnings.append("budget: component of %s exceeded capacity" % render_term(s))
            continue
        comps.append(comp)
        seen.update(t for t in comp.vertices)

    objects = []
    for comp in comps:
        from .presentations import is_normal
        objects.extend(t for t in comp.vertices if is_normal(p, t))
    objects = sorted(set(objects), key=canonical_key)
    names = [render_term(t) for t in objects]

    cat = FiniteCategory(arity, bound, objects, names, warnings)

    for comp in comps:
        if comp.contaminated or comp.mode == "h1":
            cat.warnings.append("unknown: path classes in one component are "
                                "homology approximations")
        _populate_classes(cat, p, comp, bound)

    def compose(c1, c2):
        comp = cat._comp_of_obj[c1.src]
        word = tuple(c1.word) + tuple(c2.word)
        return comp.label(word)

    cat._compose = compose
    return cat


def _populate_classes(cat: FiniteCategory, p, comp: Component, bound: Bound):
    from .presentations import is_normal
    objs = [t for t in comp.vertices if is_normal(p, t) and t in cat.obj_index]
    if not hasattr(cat, "_comp_of_obj"):
        cat._comp_of_obj = {}
    for t in objs:
        cat._comp_of_obj[cat.obj_index[t]] = comp
        cat._id_label[cat.obj_index[t]] = comp.identity_label()

    # classes realizable within the step bound, searched with the same
    # modulo-equation stepping discipline that path replay uses, so every
    # recorded representative replays to its endpoints; with approximate
    # labels the search is truncated hard, since the category is flagged
    # unknown either way
    from .paths import equation_class
    approx = comp.mode == "h1"
    depth_cap = min(bound.max_path_len, 6) if approx else bound.max_path_len
    state_cap = 2000 if approx else bound.budget
    found = {}    # (src obj, dst obj, label) -> (word, steps)

    def successors(cur):
        """Step outcomes under replay semantics: the first equation-class
        member where each step fires wins, bridged through normal forms."""
        out = {}
        members = equation_class(p, cur) if p.equations else [cur]
        for member in members:
            if member not in comp.vindex:
                continue
            for st, raw in user_steps(p, member):
                key = (st.generator, st.position, st.inverse)
                if key in out:
                    continue
                bridge = comp.eps_bridge(cur, member)
                if bridge is None:
                    continue
                if st.inverse:
                    if raw not in comp.vindex:
                        continue
                    eidx = comp.elookup.get(
                        (comp.vindex[raw], "cell", st.generator, st.position))
                    sign = -1
                else:
                    eidx = comp.elookup.get(
                        (comp.vindex[member], "cell", st.generator, st.position))
                    sign = +1
                if eidx is None:
                    continue
                out[key] = (st, raw, bridge + [(eidx, sign)])
        return [out[k] for k in sorted(out, key=str)]

    for u in objs:
        states = {(u, comp.label(()))}
        found.setdefault((u, u, comp.label(())), ((), ()))
        frontier = [(u, comp.label(()), (), ())]
        for _depth in range(depth_cap):
            nxt = []
            for (cur, lab, word, steps) in frontier:
                for st, raw, edgepath in successors(cur):
                    word2 = word
                    for eidx, sign in edgepath:
                        word2 = _extend_word(comp, word2, eidx, sign)
                    lab2 = comp.label(word2)
                    key2 = (raw, lab2)
                    if key2 in states:
                        continue
                    states.add(key2)
                    steps2 = steps + (st,)
                    nf = normalize_term(p, raw)
                    if nf in cat.obj_index:
                        k = (u, nf, lab2)
                        if k not in found:
                            found[k] = (word2, steps2)
                    nxt.append((raw, lab2, word2, steps2))
            frontier = nxt
            if len(states) > state_cap:
                cat.warnings.append("budget: path search capped")
                break

    # close under composition so the tables are exact; with approximate
    # (homology-labeled) classes the closure need not terminate, so it is
    # skipped there and the category is already flagged unknown
    changed = comp.mode in ("trivial", "tc")
    while changed:
        changed = False
        items = sorted(found.items(), key=lambda kv: (canonical_key(kv[0][0]),
                                                      canonical_key(kv[0][1]),
                                                      str(kv[0][2])))
        capped = False
        for (u, v, l1), (w1, s1) in items:
            for (v2, w_, l2), (w2, s2) in items:
                if v2 != v:
                    continue
                lab = comp.label(tuple(w1) + tuple(w2))
                key = (u, w_, lab)
                if key not in found:
                    found[key] = (tuple(w1) + tuple(w2), s1 + s2)
                    changed = True
                if len(found) > _CLASS_CAP_TOTAL:
                    capped = True
                    break
            if capped:
                break
        if capped:
            cat.warnings.append("budget: class closure capped")
            break

    per_hom = {}
    for (u, v, lab), (word, steps) in found.items():
        per_hom.setdefault((u, v), []).append((lab, word, steps))
    for (u, v), entries in sorted(per_hom.items(),
                                  key=lambda kv: (canonical_key(kv[0][0]),
                                                  canonical_key(kv[0][1]))):
        if len(entries) > _CLASS_CAP_PER_HOM:
            cat.warnings.append("budget: hom(%s,%s) capped" %
                                (render_term(u), render_term(v)))
            entries = entries[:_CLASS_CAP_PER_HOM]
        entries.sort(key=lambda e: (len(e[2]), str(e[2]), str(e[0])))
        for lab, word, steps in entries:
            c = MorphismClass(cat.obj_index[u], cat.obj_index[v], lab,
                              tuple(word), TwoCellPath(cat.arity, u, steps),
                              unknown=(comp.mode == "h1"))
            if (c.src, c.dst, c.label) not in cat._by_label:
                cat.add_class(c)


def _extend_word(comp, word, eidx, sign):
    g = comp.gen_of_edge.get(eidx)
    if g is None:
        return word
    w = list(word)
    if w and w[-1] == -sign * g:
        w.pop()
    else:
        w.append(sign * g)
    return tuple(w)


def _eps_closure(comp, frontier, known, cap=1 << 30):
    """Close a set of (vertex, label) states under equation edges."""
    out = dict(frontier)
    queue = sorted(out, key=str)
    while queue and len(out) + len(known) <= cap:
        key0 = queue.pop(0)
        v, _lab = key0
        word, steps = out[key0]
        for eidx, sign in sorted(comp.adj.get(v, ())):
            e = comp.edges[eidx]
            if e.kind != "eq":
                continue
            w = e.dst if sign > 0 else e.src
            word2 = _extend_word(comp, word, eidx, sign)
            key = (w, comp.label(word2))
            if key in out or key in known:
                continue
            out[key] = (word2, steps)
            queue.append(key)
    return out


def _target_of(p, t, st):
    from .paths import raw_step_result
    raw = raw_step_result(p, t, st)
    return normalize_term(p, raw)


def _hom_category_fallback(p, arity, bound):
    """Non-invertible generators: classes are canonical step sequences only;
    parallel classes are kept distinct and flagged unknown."""
    seeds = enumerate_normal_forms(p, arity, bound.max_term_size)
    objects = sorted(set(seeds), key=canonical_key)
    cat = FiniteCategory(arity, bound, objects, [render_term(t) for t in objects],
                         ["unknown: non-invertible generators, equality undecided"])
    for i in range(len(objects)):
        cat._id_label[i] = ()
    found = {}
    for u in objects:
        frontier = [(u, ())]
        seen = {(u, ())}
        found[(u, u, ())] = ()
        depth = 0
        while frontier and depth < bound.max_path_len:
            depth += 1
            nxt = []
            for (t, steps) in frontier:
                for st, raw in user_steps(p, t):
                    tgt = normalize_term(p, raw)
                    if tgt.size > bound.max_term_size:
                        continue
                    s2 = steps + (st,)
                    key = (tgt, s2)
                    if key in seen or len(found) > _CLASS_CAP_TOTAL:
                        continue
                    seen.add(key)
                    if tgt in cat.obj_index:
                        found[(u, tgt, s2)] = s2
                    nxt.append((tgt, s2))
            frontier = nxt
    for (u, v, steps) in sorted(found, key=lambda k: (canonical_key(k[0]),
                                                      canonical_key(k[1]), str(k[2]))):
        c = MorphismClass(cat.obj_index[u], cat.obj_index[v], steps, steps,
                          TwoCellPath(arity, u, steps), unknown=bool(steps))
        cat.add_class(c)

    def compose(c1, c2):
        return tuple(c1.label) + tuple(c2.label)

    cat._compose = compose
    return cat


# ---------------------------------------------------------------------------
# finite products: T(m, n) = T(1, n)^m

def hom_mn(p: TheoryPresentation, m: int, n: int, bound: Bound = None
           ) -> FiniteCategory:
    """The m-fold product of hom_category(p, n); built per query."""
    if m < 1:
        raise ValueError("m must be >= 1")
    base = hom_category(p, n, bound)
    if m == 1:
        return base
    return product_category([base] * m)


def product_category(factors):
    import itertools
    arity = factors[0].arity
    bound = factors[0].bound
    objects = list(itertools.product(*[range(len(f.objects)) for f in factors]))
    names = ["(" + "|".join(f.object_names[i] for f, i in zip(factors, o)) + ")"
             for o in objects]
    warnings = sorted({w for f in factors for w in f.warnings})
    cat = FiniteCategory(arity, bound, objects, names, warnings)
    idx = {o: i for i, o in enumerate(objects)}
    for src in objects:
        for dst in objects:
            choices = [factors[k].hom(src[k], dst[k]) for k in range(len(factors))]
            if any(not c for c in choices):
                continue
            for combo in itertools.product(*choices):
                c = MorphismClass(
                    idx[src], idx[dst],
                    tuple(x.label for x in combo),
                    tuple(x.word for x in combo),
                    "(" + "|".join(x.rep_text for x in combo) + ")",
                    unknown=any(x.unknown for x in combo))
                cat.add_class(c)

    def compose(c1, c2):
        src = cat.objects[c1.src]
        mid = cat.objects[c1.dst]
        dst = cat.objects[c2.dst]
        labels = []
        for k, f in enumerate(factors):
            a = f._by_label[(src[k], mid[k], c1.label[k])]
            b = f._by_label[(mid[k], dst[k], c2.label[k])]
            labels.append(f.compose(a, b).label)
        return tuple(labels)

    cat._compose = compose
    for i, o in enumerate(objects):
        cat._id_label[i] = tuple(f._id_label[o[k]] for k, f in enumerate(factors))
    return cat


# ---------------------------------------------------------------------------
# exports

def export(cat: FiniteCategory, fmt: str, tool_meta=None) -> str:
    if fmt == "json":
        return export_json(cat, tool_meta)
    if fmt == "dot":
        return export_dot(cat)
    raise ValueError("unknown export format %r" % (fmt,))


def export_json(cat: FiniteCategory, tool_meta=None) -> str:
    homs = []
    for (i, j) in sorted(cat.homs):
        homs.append({
            "src": i,
            "dst": j,
            "classes": [c.rep_text for c in cat.homs[(i, j)]],
        })
    doc = {
        "arity": cat.arity,
        "objects": list(cat.object_names),
        "homs": homs,
        "truncation": cat.bound.as_dict(),
        "warnings": sorted(cat.warnings),
    }
    if tool_meta:
        doc["tool"] = tool_meta
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def export_dot(cat: FiniteCategory) -> str:
    lines = ["digraph homcat {"]
    for i, name in enumerate(cat.object_names):
        lines.append('  o%d [label="%s"];' % (i, name))
    for (i, j) in sorted(cat.homs):
        for c in cat.homs[(i, j)]:
            if i == j and cat.is_identity(c):
                continue
            style = ' style=dashed' if c.unknown else ''
            lines.append('  o%d -> o%d [label="%s"%s];' % (i, j, c.rep_text, style))
    lines.append("}")
    return "\n".join(lines) + "\n"
