"""2-cells as rewrite paths: steps, paths, relations, three-valued verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import (
    Leaf, Term, canonical_key, instantiate, match, parse_position,
    render_position, render_term, replace, subterm,
)


class PathError(ValueError):
    pass


@dataclass(frozen=True)
class RewriteStep:
    generator: str
    position: tuple = ()
    inverse: bool = False

    def __repr__(self):
        inv = "~" if self.inverse else ""
        if not self.position:
            return "%s%s" % (self.generator, inv)
        return "%s%s@%s" % (self.generator, inv, render_position(self.position))


@dataclass(frozen=True)
class TwoCellPath:
    arity: int
    source: Term
    steps: tuple = ()

    def __repr__(self):
        if not self.steps:
            return "id"
        return " ; ".join(repr(s) for s in self.steps)

    def __len__(self):
        return len(self.steps)


def identity_path(t: Term) -> TwoCellPath:
    return TwoCellPath(t.arity, t, ())


@dataclass(frozen=True)
class Relation:
    lhs: TwoCellPath
    rhs: TwoCellPath

    def __repr__(self):
        return "%s : %s = %s" % (render_term(self.lhs.source), self.lhs, self.rhs)


# ---------------------------------------------------------------------------
# verdicts

HOLDS, FAILS, UNKNOWN = "Holds", "Fails", "Unknown"


@dataclass(frozen=True)
class Verdict:
    status: str
    detail: str = ""
    witness: object = field(default=None, compare=False)
    bound: object = field(default=None, compare=False)

    @property
    def is_holds(self):
        return self.status == HOLDS

    @property
    def is_fails(self):
        return self.status == FAILS

    @property
    def is_unknown(self):
        return self.status == UNKNOWN

    def __repr__(self):
        return self.status if not self.detail else "%s(%s)" % (self.status, self.detail)


def holds(detail="", witness=None, bound=None):
    return Verdict(HOLDS, detail, witness, bound)


def fails(detail="", witness=None, bound=None):
    return Verdict(FAILS, detail, witness, bound)


def unknown(detail="", bound=None):
    return Verdict(UNKNOWN, detail, None, bound)


def conjoin(*verdicts):
    """Holds iff all hold; Fails if any fails; else Unknown."""
    for v in verdicts:
        if v.is_fails:
            return v
    for v in verdicts:
        if v.is_unknown:
            return v
    return holds()


# ---------------------------------------------------------------------------
# step application (raw), and user path semantics (normalize after each step)

def raw_step_result(p, t: Term, step: RewriteStep):
    """Apply one step to a raw term, or None if it does not match."""
    gen = p.cell(step.generator)
    if step.inverse and not gen.invertible:
        raise PathError("step %r inverts a non-invertible 2-cell" % (step,))
    pat = gen.target if step.inverse else gen.source
    out = gen.source if step.inverse else gen.target
    try:
        s = subterm(t, step.position)
    except KeyError:
        return None
    caps = match(pat, s)
    if caps is None:
        return None
    return replace(t, step.position, instantiate(out, caps))


def equation_class(p, t: Term, size_cap=None, member_cap=4000):
    """Terms equation-equivalent to t within the size cap, in discovery order
    (breadth-first, canonical at each ring)."""
    from .presentations import equation_redexes, normalize_term
    from .terms import canonical_key, instantiate, match, positions
    if size_cap is None:
        size_cap = t.size + 8
    seen = {t}
    ring = [t]
    order = [t]
    while ring and len(seen) < member_cap:
        nxt = set()
        for u in ring:
            for _, _, res in equation_redexes(p, u):
                if res.size <= size_cap and res not in seen:
                    nxt.add(res)
            # backward equation applications
            for pos in positions(u):
                s = subterm(u, pos)
                for eqi, eq in enumerate(p.equations):
                    caps = match(eq.rhs, s)
                    if caps is None:
                        continue
                    back = replace(u, pos, instantiate(eq.lhs, caps))
                    if back.size > size_cap or back in seen:
                        continue
                    if any(i == eqi and q == pos for i, q, _ in
                           equation_redexes(p, back)):
                        nxt.add(back)
        ring = sorted(nxt, key=canonical_key)
        seen.update(ring)
        order.extend(ring)
    return order


def step_member(p, cur: Term, st: RewriteStep):
    """Where a step fires modulo the equations: the first member of the
    equation class, enumerated from the normal form, whose redex matches.
    Returns (member, raw result) or None.  The enumeration starts from the
    normal form so the choice depends only on the 1-cell, not on which
    representative the replay happens to sit at."""
    raw = raw_step_result(p, cur, st)
    if raw is not None and not p.equations:
        return cur, raw
    if not p.equations:
        return None
    from .presentations import normalize_term
    for member in equation_class(p, normalize_term(p, cur)):
        raw = raw_step_result(p, member, st)
        if raw is not None:
            return member, raw
    return None


def replay_path(p, path: TwoCellPath, strict=True):
    """Terms visited by the path, stepping modulo the equations.

    Presentations without equations recover plain step chaining.
    """
    cur = path.source
    if cur.arity != path.arity:
        raise PathError("path arity %d does not match its source" % path.arity)
    visited = [cur]
    for st in path.steps:
        hit = step_member(p, cur, st)
        if hit is None:
            if strict:
                raise PathError("step %r does not apply to %s or its "
                                "equation class" % (st, render_term(cur)))
            return None
        _, cur = hit
        visited.append(cur)
    return visited


def replay_raw(p, path: TwoCellPath, strict=True):
    """Raw terms visited with literal step chaining and no normalization.

    Relation sides use this semantics, so they can name rewrites whose
    redexes exist only on non-normal representatives.
    """
    cur = path.source
    visited = [cur]
    for st in path.steps:
        nxt = raw_step_result(p, cur, st)
        if nxt is None:
            if strict:
                raise PathError("raw step %r does not apply to %s"
                                % (st, render_term(cur)))
            return None
        cur = nxt
        visited.append(cur)
    return visited


def path_target(p, path: TwoCellPath) -> Term:
    from .presentations import normalize_term
    return normalize_term(p, replay_path(p, path)[-1])


def compose_paths(p, a: TwoCellPath, b: TwoCellPath) -> TwoCellPath:
    from .presentations import normalize_term
    ta = path_target(p, a)
    if ta != normalize_term(p, b.source):
        raise PathError("paths do not compose: %s ends at %s, next starts at %s"
                        % (a, render_term(ta), render_term(b.source)))
    return TwoCellPath(a.arity, a.source, a.steps + b.steps)


def invert_path(p, path: TwoCellPath) -> TwoCellPath:
    """Reverse a path of invertible steps; replay-checked."""
    from .presentations import normalize_term
    visited = replay_path(p, path)
    for st in path.steps:
        if not p.cell(st.generator).invertible:
            raise PathError("cannot invert path: %r is not invertible" % (st,))
    steps = tuple(RewriteStep(s.generator, s.position, not s.inverse)
                  for s in reversed(path.steps))
    out = TwoCellPath(path.arity, visited[-1], steps)
    back = replay_path(p, out, strict=False)
    if back is None or normalize_term(p, back[-1]) != normalize_term(p, visited[0]):
        raise PathError("inverse path does not replay at this bound")
    return out


# ---------------------------------------------------------------------------
# path / relation text syntax

def render_path(path: TwoCellPath) -> str:
    return repr(path)


def parse_steps(text: str):
    text = text.strip()
    if text == "id":
        return ()
    steps = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            raise PathError("empty step in path %r" % (text,))
        if "@" in chunk:
            name, _, postxt = chunk.partition("@")
            pos = parse_position(postxt)
        else:
            name, pos = chunk, ()
        name = name.strip()
        inverse = name.endswith("~")
        if inverse:
            name = name[:-1].strip()
        if not name:
            raise PathError("missing generator name in %r" % (chunk,))
        steps.append(RewriteStep(name, pos, inverse))
    return tuple(steps)


def parse_path(p, source: Term, text: str) -> TwoCellPath:
    path = TwoCellPath(source.arity, source, parse_steps(text))
    replay_path(p, path)
    return path


def validate_relations(p):
    from .presentations import normalize_term
    for r in p.relations:
        if normalize_term(p, r.lhs.source) != normalize_term(p, r.rhs.source):
            raise PathError("relation sides start at different 1-cells: %r" % (r,))
        left = replay_raw(p, r.lhs)
        right = replay_raw(p, r.rhs)
        if normalize_term(p, left[-1]) != normalize_term(p, right[-1]):
            raise PathError("relation sides are not parallel: %r" % (r,))


def rename_relation(r: Relation, symbol_table: dict, cell_table: dict) -> Relation:
    from .presentations import _rename_term

    def ren(path):
        steps = tuple(RewriteStep(cell_table.get(s.generator, s.generator),
                                  s.position, s.inverse) for s in path.steps)
        return TwoCellPath(path.arity, _rename_term(path.source, symbol_table), steps)

    return Relation(ren(r.lhs), ren(r.rhs))


# ---------------------------------------------------------------------------
# single-step enumeration (user semantics)

def user_steps(p, t: Term):
    """All (step, raw result) applicable to a term, canonically ordered."""
    from .terms import positions
    out = []
    for pos in sorted(positions(t)):
        for cell in p.cells:
            for inverse in (False, True):
                if inverse and not cell.invertible:
                    continue
                st = RewriteStep(cell.name, pos, inverse)
                raw = raw_step_result(p, t, st)
                if raw is not None:
                    out.append((st, raw))
    return out


def relations_for_indiscrete(p, max_arity: int, max_size: int):
    """Relations equating every non-tree step with the tree path between its
    endpoints, making each bounded hom-groupoid indiscrete."""
    from .presentations import enumerate_raw_terms, normalize_term, _all_labelings
    rels = []
    for n in range(0, max_arity + 1):
        objs = _all_labelings(p, n, max_size)
        index = {t: i for i, t in enumerate(objs)}
        parent = {}   # term -> (term, step) back to tree root
        seen = set()
        for root in objs:
            if root in seen:
                continue
            seen.add(root)
            frontier = [root]
            tree_edges = set()
            while frontier:
                cur = frontier.pop(0)
                for st, raw in user_steps(p, cur):
                    nxt = normalize_term(p, raw)
                    if nxt.size > max_size or nxt == cur:
                        continue
                    if nxt not in seen:
                        seen.add(nxt)
                        parent[nxt] = (cur, st)
                        tree_edges.add((cur, st))
                        frontier.append(nxt)
                    elif (cur, st) not in tree_edges and not st.inverse:
                        lhs = TwoCellPath(n, cur, (st,))
                        rhs = _tree_path(p, parent, root, cur, nxt, n)
                        if rhs is not None and repr(lhs) != repr(rhs):
                            rels.append(Relation(lhs, rhs))
    return tuple(rels)


def _tree_path(p, parent, root, src, dst, arity):
    def to_root(t):
        steps = []
        while t != root:
            prev, st = parent[t]
            steps.append((prev, st))
            t = prev
        return steps

    up = to_root(src)      # src -> root (inverted steps)
    down = to_root(dst)    # root -> dst (forward)
    steps = []
    for _, st in up:
        if not p.cell(st.generator).invertible:
            return None
        steps.append(RewriteStep(st.generator, st.position, not st.inverse))
    for _, st in reversed(down):
        steps.append(st)
    path = TwoCellPath(arity, src, tuple(steps))
    got = replay_path(p, path, strict=False)
    if got is None or got[-1] != dst:
        return None
    return path
