"""Bounded equality of 2-cell paths.

The free hom-groupoid of a presentation, truncated to terms within a size
bound, is presented by a finite complex: raw terms are vertices, single
rewrites (2-cell generator steps and oriented-equation steps) are edges, and
the boundaries of interchange squares, declared-relation instances and
equation loops are relators.  Path classes are then elements of the presented
fundamental group, computed exactly by coset enumeration when it closes, and
separated by mod-p homology functionals when it does not.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field

from .bounds import Bound
from .paths import (
    FAILS, HOLDS, UNKNOWN, PathError, Relation, RewriteStep, TwoCellPath,
    Verdict, fails, holds, raw_step_result, replay_path, unknown, user_steps,
)
from .presentations import (
    NormalizationError, TheoryPresentation, equation_redexes, normalize_term,
    normalize_trace,
)
from .terms import (
    Leaf, Node, Term, canonical_key, instantiate, match, pattern_leaf_paths,
    render_term, replace, subterm,
)

_PRIME = 1000003
_VERTEX_CAP = 60000


class EngineCapacity(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# single-step enumeration (user facing)

def enumerate_rewrites(p: TheoryPresentation, t: Term):
    """All single steps applicable to a normal form, canonically ordered."""
    from .presentations import is_normal
    if not is_normal(p, t):
        raise PathError("enumerate_rewrites expects a normal form")
    return tuple(st for st, _ in user_steps(p, t))


# ---------------------------------------------------------------------------
# the truncated rewrite complex

@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    kind: str          # "cell" | "eq"
    label: object      # generator name | equation index
    position: tuple


class Component:
    """One connected slice of the rewrite complex, with its group data."""

    def __init__(self, p, arity, bound):
        self.presentation = p
        self.arity = arity
        self.bound = bound
        self.vertices = []          # raw Terms
        self.vindex = {}
        self.edges = []             # Edge list, canonical order
        self.elookup = {}           # (src, kind, label, pos) -> edge index
        self.adj = {}               # vertex -> [(edge index, sign)]
        self.tree_parent = {}       # vertex -> (edge index, sign) | None
        self.gen_of_edge = {}       # non-tree edge index -> generator number
        self.relators = []          # tuples of signed generator numbers
        self.mode = "trivial"      # "trivial" | "tc" | "h1"
        self.table = None           # coset table in tc mode
        self.pivots = None          # reduced relator rows in h1 mode
        self.contaminated = False

    # -- building ----------------------------------------------------------

    def _add_vertex(self, t):
        if t in self.vindex:
            return self.vindex[t]
        if len(self.vertices) >= _VERTEX_CAP:
            raise EngineCapacity("vertex cap exceeded")
        self.vindex[t] = len(self.vertices)
        self.vertices.append(t)
        return self.vindex[t]

    def _add_edge(self, src, dst, kind, label, pos):
        key = (src, kind, label, pos)
        if key in self.elookup:
            return self.elookup[key]
        idx = len(self.edges)
        self.edges.append(Edge(src, dst, kind, label, pos))
        self.elookup[key] = idx
        self.adj.setdefault(src, []).append((idx, +1))
        self.adj.setdefault(dst, []).append((idx, -1))
        return idx

    def _forward_moves(self, t):
        """Deterministic positive rewrites out of a raw term."""
        p = self.presentation
        out = []
        for eqi, pos, res in equation_redexes(p, t):
            out.append(("eq", eqi, pos, res))
        for st, raw in user_steps(p, t):
            if st.inverse:
                continue
            out.append(("cell", st.generator, st.position, raw))
        out.sort(key=lambda m: (m[2], m[0], str(m[1])))
        return out

    def _backward_moves(self, t):
        """Raw terms u with a positive rewrite u -> t, by matching outputs;
        leaf positions matter for unit-style rules whose output is a leaf."""
        from .terms import positions
        p = self.presentation
        out = []
        for pos in sorted(positions(t)):
            s = subterm(t, pos)
            for eqi, eq in enumerate(p.equations):
                caps = match(eq.rhs, s)
                if caps is None:
                    continue
                u = replace(t, pos, instantiate(eq.lhs, caps))
                if u.size > self.bound.max_term_size:
                    continue
                redo = raw_eq_result(p, u, eqi, pos)
                if redo == t:
                    out.append((u, "eq", eqi, pos))
            for cell in p.cells:
                caps = match(cell.target, s)
                if caps is None:
                    continue
                u = replace(t, pos, instantiate(cell.source, caps))
                if u.size > self.bound.max_term_size:
                    continue
                out.append((u, "cell", cell.name, pos))
        return out

    def build(self, seed: Term):
        self._add_vertex(seed)
        i = 0
        while i < len(self.vertices):
            t = self.vertices[i]
            for kind, label, pos, res in self._forward_moves(t):
                if res.size > self.bound.max_term_size:
                    continue
                j = self._add_vertex(res)
                self._add_edge(i, j, kind, label, pos)
            for u, kind, label, pos in self._backward_moves(t):
                j = self._add_vertex(u)
                self._add_edge(j, i, kind, label, pos)
            i += 1
        self._spanning_tree()
        self._relators()
        self._group()
        return self

    def _spanning_tree(self):
        # BFS preferring equation edges, so normal forms sit close to the root
        self.tree_parent[0] = None
        frontier = [0]
        seen = {0}
        in_tree = set()
        while frontier:
            nxt = []
            for v in frontier:
                moves = sorted(self.adj.get(v, ()),
                               key=lambda es: (self.edges[es[0]].kind != "eq", es[0]))
                for eidx, sign in moves:
                    e = self.edges[eidx]
                    w = e.dst if sign > 0 else e.src
                    if w in seen:
                        continue
                    seen.add(w)
                    self.tree_parent[w] = (eidx, sign)
                    in_tree.add(eidx)
                    nxt.append(w)
            frontier = sorted(nxt)
        for eidx in range(len(self.edges)):
            if eidx not in in_tree:
                self.gen_of_edge[eidx] = len(self.gen_of_edge) + 1

    def word_of(self, edgepath):
        """Signed-generator word of a list of (edge index, sign)."""
        out = []
        for eidx, sign in edgepath:
            g = self.gen_of_edge.get(eidx)
            if g is None:
                continue
            if out and out[-1] == -sign * g:
                out.pop()
            else:
                out.append(sign * g)
        return tuple(out)

    def _relators(self):
        rel = []
        # equation edges become identities in the quotient
        for eidx, e in enumerate(self.edges):
            if e.kind == "eq" and eidx in self.gen_of_edge:
                rel.append((self.gen_of_edge[eidx],))
        # interchange squares
        for v in range(len(self.vertices)):
            outs = [(eidx, self.edges[eidx])
                    for eidx, sign in self.adj.get(v, ()) if sign > 0
                    if self.edges[eidx].src == v]
            outs.sort()
            for (ia, ea), (ib, eb) in itertools.combinations(outs, 2):
                sq = self._square(v, ia, ea, ib, eb)
                if sq is not None:
                    rel.append(sq)
        # declared relation instances (relation sides chain on raw terms; the
        # sides may start and end at different representatives linked by
        # equation edges, whose generators are killed above, so the word
        # difference is a relator)
        p = self.presentation
        for r in p.relations:
            moves_l = [("cell", s.generator, s.position, -1 if s.inverse else +1)
                       for s in r.lhs.steps]
            moves_r = [("cell", s.generator, s.position, -1 if s.inverse else +1)
                       for s in r.rhs.steps]
            src_l, src_r = r.lhs.source, r.rhs.source
            for v, t in enumerate(self.vertices):
                for pos in sorted(_node_positions(t)):
                    caps = match(src_l, subterm(t, pos))
                    if caps is None:
                        continue
                    if src_r == src_l:
                        v2 = v
                    else:
                        t2 = replace(t, pos, instantiate(src_r, caps))
                        v2 = self.vindex.get(t2)
                        if v2 is None:
                            self.contaminated = True
                            continue
                    wl = self._instance_word(v, pos, moves_l)
                    wr = self._instance_word(v2, pos, moves_r)
                    if wl is None or wr is None:
                        self.contaminated = True
                        continue
                    (_, wordl), (_, wordr) = wl, wr
                    rel.append(_reduce_word(wordl + tuple(-g for g in reversed(wordr))))
        seen = set()
        for w in rel:
            w = _reduce_word(w)
            if w and w not in seen:
                seen.add(w)
                self.relators.append(w)

    def _square(self, v, ia, ea, ib, eb):
        dep = _dependence(self.presentation, ea, eb)
        if dep is None:
            return None
        pa2, pb2 = dep
        a2 = self.elookup.get((eb.dst, ea.kind, ea.label, pa2))
        b2 = self.elookup.get((ea.dst, eb.kind, eb.label, pb2))
        if a2 is None or b2 is None:
            self.contaminated = True
            return None
        if self.edges[a2].dst != self.edges[b2].dst:
            raise RuntimeError("interchange transport does not converge")
        word = self.word_of([(ia, 1), (b2, 1), (a2, -1), (ib, -1)])
        return word

    def _instance_word(self, v, prefix, moves):
        p = self.presentation
        cur = v
        edgepath = []
        for kind, label, q, sign in moves:
            pos = prefix + q
            if sign > 0:
                eidx = self.elookup.get((cur, kind, label, pos))
                if eidx is None:
                    return None
                edgepath.append((eidx, 1))
                cur = self.edges[eidx].dst
            else:
                t = self.vertices[cur]
                try:
                    s = subterm(t, pos)
                except KeyError:
                    return None
                cell = p.cell(label)
                caps = match(cell.target, s)
                if caps is None:
                    return None
                u = replace(t, pos, instantiate(cell.source, caps))
                ui = self.vindex.get(u)
                if ui is None:
                    return None
                eidx = self.elookup.get((ui, kind, label, pos))
                if eidx is None or self.edges[eidx].dst != cur:
                    return None
                edgepath.append((eidx, -1))
                cur = ui
        return cur, self.word_of(edgepath)

    # -- group quotient ------------------------------------------------------

    def _group(self):
        n = len(self.gen_of_edge)
        if n == 0:
            self.mode = "trivial"
            return
        cap = max(2000, self.bound.budget // 20)
        table = todd_coxeter(n, self.relators, cap)
        if table is not None:
            self.mode = "tc"
            self.table = table
        else:
            self.mode = "h1"
            self.pivots = _row_reduce(
                [_abelianize(w, n) for w in self.relators], n)
            self.contaminated = True

    def label(self, word):
        if self.mode == "trivial":
            return 0
        if self.mode == "tc":
            c = 0
            for g in word:
                c = self.table[c][g]
            return c
        vec = _abelianize(word, len(self.gen_of_edge))
        return _reduce_vec(vec, self.pivots)

    def identity_label(self):
        return self.label(())

    # -- paths ---------------------------------------------------------------

    def eps_bridge(self, a: Term, b: Term):
        """Signed equation edges linking two equation-equivalent raw terms,
        routed through their common normal form; None outside the complex."""
        p = self.presentation
        if a == b:
            return []
        na, ta = normalize_trace(p, a)
        nb, tb = normalize_trace(p, b)
        if na != nb:
            return None
        down = self._trace_edges(a, ta)
        up = self._trace_edges(b, tb)
        if down is None or up is None:
            return None
        return down + [(e, -s) for e, s in reversed(up)]

    def _trace_edges(self, start: Term, trace):
        out = []
        walk = start
        for eqi, pos in trace:
            vi = self.vindex.get(walk)
            if vi is None:
                return None
            eidx = self.elookup.get((vi, "eq", eqi, pos))
            if eidx is None:
                return None
            out.append((eidx, 1))
            walk = self.vertices[self.edges[eidx].dst]
        return out

    def edgepath_of_user_path(self, path: TwoCellPath):
        """Embed a path (modulo-equation replay) as signed edges, or None.
        Mirrors replay_path exactly."""
        from .paths import step_member
        p = self.presentation
        cur = path.source
        if cur not in self.vindex:
            cur = normalize_term(p, cur)
            if cur not in self.vindex:
                return None
        out = []
        for st in path.steps:
            hit = step_member(p, cur, st)
            if hit is None:
                return None
            member, raw = hit
            if member != cur:
                bridge = self.eps_bridge(cur, member)
                if bridge is None:
                    return None
                out.extend(bridge)
            if st.inverse:
                if raw not in self.vindex:
                    return None
                key = (self.vindex[raw], "cell", st.generator, st.position)
                sign = -1
            else:
                if member not in self.vindex:
                    return None
                key = (self.vindex[member], "cell", st.generator, st.position)
                sign = 1
            eidx = self.elookup.get(key)
            if eidx is None:
                return None
            out.append((eidx, sign))
            cur = raw
        return out

    def class_of_path(self, path: TwoCellPath):
        ep = self.edgepath_of_user_path(path)
        if ep is None:
            return None
        return self.label(self.word_of(ep))


def raw_eq_result(p, t, eqi, pos):
    for i, q, res in equation_redexes(p, t):
        if i == eqi and q == pos:
            return res
    return None


def _node_positions(t):
    from .terms import positions
    return [q for q in positions(t) if isinstance(subterm(t, q), Node)]


def _dependence(p, ea: Edge, eb: Edge):
    """Transported positions when two positive rewrites are independent."""
    pa, pb = ea.position, eb.position
    la = _lhs_of(p, ea)
    lb = _lhs_of(p, eb)
    ra = _rhs_of(p, ea)
    rb = _rhs_of(p, eb)
    rel = _transport(pa, la, ra, pb)
    if rel is None:
        return None
    pb2 = rel
    rel = _transport(pb, lb, rb, pa)
    if rel is None:
        return None
    pa2 = rel
    return pa2, pb2


def _lhs_of(p, e: Edge):
    if e.kind == "eq":
        return p.equations[e.label].lhs
    return p.cell(e.label).source


def _rhs_of(p, e: Edge):
    if e.kind == "eq":
        return p.equations[e.label].rhs
    return p.cell(e.label).target


def _transport(pa, pat_in, pat_out, q):
    """Position q transported past a rewrite at pa, or None if they overlap.

    A rewrite strictly below q leaves q in place; whether their patterns
    overlap is the symmetric transport's concern.
    """
    if q == pa:
        return None
    if q[: len(pa)] != pa:
        return q                 # disjoint or the rewrite sits below q
    rest = q[len(pa):]
    cur = pat_in
    depth = 0
    while depth < len(rest) and isinstance(cur, Node):
        cur = cur.children[rest[depth] - 1]
        depth += 1
    if not isinstance(cur, Leaf):
        return None              # lands inside the pattern structure
    leaf = cur.index
    new_prefix = pattern_leaf_paths(pat_out)[leaf]
    old_prefix = pattern_leaf_paths(pat_in)[leaf]
    return pa + new_prefix + rest[len(old_prefix):]


def compile_side(p, path: TwoCellPath):
    """A path as signed atomic raw moves in pattern coordinates, with
    modulo-equation hops made explicit as equation moves."""
    from .paths import step_member
    cur = path.source
    moves = []
    for st in path.steps:
        hit = step_member(p, cur, st)
        if hit is None:
            raise PathError("step %r fails at pattern level" % (st,))
        member, raw = hit
        if member != cur:
            n1, tr1 = normalize_trace(p, cur)
            n2, tr2 = normalize_trace(p, member)
            if n1 != n2:
                raise PathError("equation hop lost the 1-cell")
            moves.extend(("eq", i, pos, +1) for i, pos in tr1)
            moves.extend(("eq", i, pos, -1) for i, pos in reversed(tr2))
        moves.append(("cell", st.generator, st.position,
                      -1 if st.inverse else +1))
        cur = raw
    return moves


def _reduce_word(word):
    out = []
    for g in word:
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(g)
    return tuple(out)


# ---------------------------------------------------------------------------
# Todd-Coxeter coset enumeration (trivial subgroup)

def todd_coxeter(ngens, relators, cap):
    """Complete coset table for <g1..gn | relators>, or None at the cap.

    Rows map signed generators to cosets; row 0 is the identity.  When the
    table closes the group is finite and rows enumerate its elements.
    """
    tab = [dict()]
    rep = [0]

    def find(c):
        while rep[c] != c:
            rep[c] = rep[rep[c]]
            c = rep[c]
        return c

    pending = []

    def merge(a, b):
        a, b = find(a), find(b)
        if a != b:
            if a > b:
                a, b = b, a
            rep[b] = a
            pending.append(b)

    def set_entry(c, g, d):
        c, d = find(c), find(d)
        old = tab[c].get(g)
        if old is not None:
            merge(find(old), d)
        else:
            tab[c][g] = d
        old = tab[d].get(-g)
        if old is not None:
            merge(find(old), c)
        else:
            tab[d][-g] = c

    def process():
        while pending:
            b = pending.pop()
            a = find(b)
            entries = list(tab[b].items())
            tab[b].clear()
            for g, d in entries:
                set_entry(a, g, find(d))

    def scan(c, word):
        # forward as far as possible
        f, i = find(c), 0
        while i < len(word):
            nxt = tab[f].get(word[i])
            if nxt is None:
                break
            f, i = find(nxt), i + 1
        if i == len(word):
            merge(f, c)
            return
        # backward
        b, j = find(c), len(word)
        while j > i:
            nxt = tab[b].get(-word[j - 1])
            if nxt is None:
                break
            b, j = find(nxt), j - 1
        if j == i + 1:
            set_entry(f, word[i], b)
        elif j == i:
            merge(f, b)
        # else leave the gap; the fill loop will define cosets

    live = lambda: [c for c in range(len(tab)) if find(c) == c]
    idx = 0
    while True:
        process()
        cur = live()
        if len(cur) > cap:
            return None
        if idx >= len(cur):
            break
        c = cur[idx]
        for w in relators:
            scan(c, w)
            process()
            if len(live()) > cap:
                return None
        if find(c) != c:
            # merged away; restart position scan
            idx = 0
            continue
        for g in range(1, ngens + 1):
            for sg in (g, -g):
                if find(c) != c:
                    break
                if tab[find(c)].get(sg) is None:
                    if len(tab) > cap:
                        return None
                    tab.append({})
                    rep.append(len(tab) - 1)
                    set_entry(find(c), sg, len(tab) - 1)
                    process()
        idx += 1
    process()
    # verify closure under all relators and compress
    cur = live()
    remap = {c: i for i, c in enumerate(cur)}
    out = []
    for c in cur:
        row = {}
        for g in range(1, ngens + 1):
            for sg in (g, -g):
                d = tab[c].get(sg)
                if d is None:
                    return None
                row[sg] = remap[find(d)]
        out.append(row)
    for c in range(len(out)):
        for w in relators:
            f = c
            for g in w:
                f = out[f][g]
            if f != c:
                return None
    return out


# ---------------------------------------------------------------------------
# mod-p linear algebra on generator vectors

def _abelianize(word, n):
    vec = {}
    for g in word:
        k = abs(g)
        vec[k] = (vec.get(k, 0) + (1 if g > 0 else -1)) % _PRIME
    return {k: v for k, v in vec.items() if v}


def _row_reduce(rows, n):
    """Sparse row echelon over F_p; returns list of (pivot, row-dict)."""
    pivots = []
    for row in rows:
        row = dict(row)
        for piv, prow in pivots:
            c = row.get(piv)
            if c:
                _axpy(row, prow, (-c) % _PRIME)
        if not row:
            continue
        piv = min(row)
        inv = pow(row[piv], _PRIME - 2, _PRIME)
        row = {k: (v * inv) % _PRIME for k, v in row.items()}
        pivots.append((piv, row))
    pivots.sort()
    return pivots


def _axpy(target, row, c):
    for k, v in row.items():
        nv = (target.get(k, 0) + c * v) % _PRIME
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


def _reduce_vec(vec, pivots):
    vec = dict(vec)
    for piv, prow in pivots:
        c = vec.get(piv)
        if c:
            _axpy(vec, prow, (-c) % _PRIME)
    return tuple(sorted(vec.items()))


def separating_functional(comp: Component, word_a, word_b):
    """A mod-p edge functional vanishing on all relators and telling the two
    words apart, or None.  This is the machine-checkable inequality witness."""
    n = len(comp.gen_of_edge)
    va = _abelianize(word_a, n)
    vb = _abelianize(word_b, n)
    diff = dict(va)
    _axpy(diff, vb, _PRIME - 1)
    pivots = comp.pivots
    if pivots is None:
        pivots = _row_reduce([_abelianize(w, n) for w in comp.relators], n)
    red = dict(diff)
    for piv, prow in pivots:
        c = red.get(piv)
        if c:
            _axpy(red, prow, (-c) % _PRIME)
    if not red:
        return None
    jstar = min(red)
    w = {}
    for g in range(1, n + 1):
        e = {g: 1}
        for piv, prow in pivots:
            c = e.get(piv)
            if c:
                _axpy(e, prow, (-c) % _PRIME)
        val = e.get(jstar, 0)
        if val:
            w[g] = val
    cert = {
        "prime": _PRIME,
        "functional": w,
        "word_a": list(word_a),
        "word_b": list(word_b),
        "relators": [list(r) for r in comp.relators],
    }
    assert verify_separation(cert)
    return cert


def verify_separation(cert):
    """Replay a separation certificate: functional kills every relator but
    distinguishes the two path words."""
    p = cert["prime"]
    w = {int(k): v for k, v in cert["functional"].items()}

    def ev(word):
        s = 0
        for g in word:
            s = (s + (w.get(abs(g), 0) * (1 if g > 0 else -1))) % p
        return s

    if any(ev(r) % p for r in cert["relators"]):
        return False
    return (ev(cert["word_a"]) - ev(cert["word_b"])) % p != 0


# ---------------------------------------------------------------------------
# component cache

_component_cache = {}


def component_of(p: TheoryPresentation, term: Term, bound: Bound) -> Component:
    nf = normalize_term(p, term)
    key = (p, nf.arity, bound)
    comps = _component_cache.setdefault(key, {})
    if nf in comps:
        return comps[nf]
    comp = Component(p, nf.arity, bound).build(nf)
    for t in comp.vertices:
        comps[t] = comp
    return comp


# ---------------------------------------------------------------------------
# path-homotopy move search (emits an explicit move sequence)

def _swap_neighbors(p, path_steps, source, visited):
    """Neighbor paths via one elementary move, as (move description, steps)."""
    out = []
    steps = path_steps
    # cancellations
    for i in range(len(steps) - 1):
        a, b = steps[i], steps[i + 1]
        if a.generator == b.generator and a.position == b.position \
                and a.inverse != b.inverse:
            out.append((("cancel", i), steps[:i] + steps[i + 2:]))
    # interchange swaps
    for i in range(len(steps) - 1):
        a, b = steps[i], steps[i + 1]
        sw = _swap_pair(p, a, b)
        if sw is not None:
            out.append((("swap", i), steps[:i] + sw + steps[i + 2:]))
    # relation rewrites and insertions are generated against visited terms
    return out


def _swap_pair(p, a: RewriteStep, b: RewriteStep):
    ga, gb = p.cell(a.generator), p.cell(b.generator)
    la = ga.target if a.inverse else ga.source
    ra = ga.source if a.inverse else ga.target
    lb = gb.target if b.inverse else gb.source
    rb = gb.source if b.inverse else gb.target
    nb = _transport(a.position, la, ra, b.position)
    if nb is None:
        return None
    # b first, then a transported back across b
    na = _transport(nb, lb, rb, a.position)
    if na is None:
        return None
    return (RewriteStep(b.generator, nb, b.inverse),
            RewriteStep(a.generator, na, a.inverse))


def _relation_neighbors(p, steps, terms):
    out = []
    for ri, r in enumerate(p.relations):
        for1 = (r.lhs.steps, r.rhs.steps)
        for side in (0, 1):
            pat_src = normalize_term(p, (r.lhs if side == 0 else r.rhs).source)
            seg = for1[side]
            repl = for1[1 - side]
            k = len(seg)
            for i in range(len(steps) - k + 1):
                t = terms[i]
                for pos in sorted(_node_positions(t)):
                    if match(pat_src, subterm(t, pos)) is None:
                        continue
                    inst = tuple(RewriteStep(s.generator, pos + s.position, s.inverse)
                                 for s in seg)
                    if steps[i:i + k] != inst:
                        continue
                    inst2 = tuple(RewriteStep(s.generator, pos + s.position, s.inverse)
                                  for s in repl)
                    out.append((("relation", ri, side, i),
                                steps[:i] + inst2 + steps[i + k:]))
    return out


def _insertion_neighbors(p, steps, terms, max_len):
    out = []
    if len(steps) + 2 > max_len:
        return out
    for i, t in enumerate(terms):
        for st, _raw in user_steps(p, t):
            if not p.cell(st.generator).invertible:
                continue
            pair = (st, RewriteStep(st.generator, st.position, not st.inverse))
            out.append((("insert", i, repr(st)), steps[:i] + pair + steps[i:]))
    return out


def _replay_or_none(p, source, steps):
    try:
        return replay_path(p, TwoCellPath(source.arity, source, steps), strict=False)
    except (PathError, NormalizationError):
        return None


def move_search(p, a: TwoCellPath, b: TwoCellPath, budget, max_len):
    """BFS over elementary homotopy moves from a to b; returns move list."""
    source = normalize_term(p, a.source)
    target_steps = tuple(b.steps)
    start = tuple(a.steps)
    if start == target_steps:
        return []
    seen = {start}
    queue = [(len(start), repr(start), start, [])]
    heapq.heapify(queue)
    expanded = 0
    while queue and expanded < budget:
        _, _, steps, moves = heapq.heappop(queue)
        expanded += 1
        terms = _replay_or_none(p, source, steps)
        if terms is None:
            continue
        cand = []
        cand.extend(_swap_neighbors(p, steps, source, terms))
        cand.extend(_relation_neighbors(p, steps, terms))
        cand.extend(_insertion_neighbors(p, steps, terms, max_len))
        for desc, nsteps in cand:
            if nsteps in seen:
                continue
            if _replay_or_none(p, source, nsteps) is None:
                continue
            seen.add(nsteps)
            nmoves = moves + [desc]
            if nsteps == target_steps:
                return nmoves
            heapq.heappush(queue, (len(nsteps), repr(nsteps), nsteps, nmoves))
    return None


def replay_moves(p, a: TwoCellPath, moves):
    """Re-run an emitted move list; returns the final step tuple."""
    source = normalize_term(p, a.source)
    steps = tuple(a.steps)
    for desc in moves:
        terms = _replay_or_none(p, source, steps)
        if terms is None:
            raise PathError("move replay lost a valid path")
        options = (_swap_neighbors(p, steps, source, terms)
                   + _relation_neighbors(p, steps, terms)
                   + _insertion_neighbors(p, steps, terms, 10 ** 9))
        nxt = [s for d, s in options if d == tuple(desc) or d == desc]
        if not nxt:
            raise PathError("move %r does not replay" % (desc,))
        steps = nxt[0]
    return steps


# ---------------------------------------------------------------------------
# the decision procedure

def equal_paths(p: TheoryPresentation, a: TwoCellPath, b: TwoCellPath,
                bound: Bound = None) -> Verdict:
    """Three-valued bounded equality of parallel paths.

    Holds comes with a replayable witness (a move sequence, or a coset-table
    transcript when the witness search was exhausted first); Fails carries a
    separating mod-p functional on the truncated complex.
    """
    bound = bound or Bound()
    va = replay_path(p, a)
    vb = replay_path(p, b)
    if normalize_term(p, va[0]) != normalize_term(p, vb[0]) or \
            normalize_term(p, va[-1]) != normalize_term(p, vb[-1]):
        raise PathError("equal_paths expects parallel paths")
    if tuple(a.steps) == tuple(b.steps):
        return holds("syntactic", witness={"moves": []}, bound=bound)
    moves = move_search(p, a, b, min(bound.budget, 4000),
                        max(len(a), len(b)) + 6)
    if moves is not None:
        return holds("homotopy", witness={"moves": moves}, bound=bound)
    if not p.all_invertible:
        return unknown("non-invertible cells: move search exhausted", bound=bound)
    try:
        comp = component_of(p, va[0], bound)
    except EngineCapacity:
        return unknown("complex exceeds capacity", bound=bound)
    ea = comp.edgepath_of_user_path(a)
    eb = comp.edgepath_of_user_path(b)
    if ea is None or eb is None:
        return unknown("path leaves the truncated complex", bound=bound)
    wa, wb = comp.word_of(ea), comp.word_of(eb)
    la, lb = comp.label(wa), comp.label(wb)
    if comp.mode in ("trivial", "tc"):
        if la == lb:
            wit = {"coset_table_size": 1 if comp.mode == "trivial" else len(comp.table),
                   "word_a": list(wa), "word_b": list(wb)}
            return holds("fundamental-group", witness=wit, bound=bound)
        cert = separating_functional(comp, wa, wb)
        if cert is None:
            cert = {"coset_a": la, "coset_b": lb,
                    "word_a": list(wa), "word_b": list(wb),
                    "relators": [list(r) for r in comp.relators],
                    "table": comp.table}
        return fails("distinct classes at bound", witness=cert, bound=bound)
    if la != lb:
        cert = separating_functional(comp, wa, wb)
        if cert is not None:
            return fails("homology separation at bound", witness=cert, bound=bound)
    return unknown("budget exhausted", bound=bound)
