"""Text formats: ".2th" presentation files and ".2map" morphism files.

The grammar is deliberately rigid; anything ambiguous is rejected rather
than guessed.  See docs/formats.md for the full grammar.
"""

from __future__ import annotations

import re

from .paths import Relation, TwoCellPath, parse_steps, replay_raw
from .presentations import (
    PresentationError, TermEquation, TheoryPresentation, TwoCellGenerator,
    make_presentation,
)
from .terms import Leaf, Node, OperationSymbol, Term, render_term


class ParserError(ValueError):
    def __init__(self, msg, line=None, col=None):
        self.line, self.col = line, col
        where = ""
        if line is not None:
            where = " at line %d" % line
            if col is not None:
                where += ", column %d" % col
        super().__init__(msg + where)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")


def parse_term(text: str, symbols: dict, line=None) -> Term:
    pos = 0
    n = len(text)

    def skip_ws():
        nonlocal pos
        while pos < n and text[pos] in " \t":
            pos += 1

    def parse():
        nonlocal pos
        skip_ws()
        if pos >= n:
            raise ParserError("unexpected end of term", line, pos + 1)
        m = _INT.match(text, pos)
        if m:
            pos = m.end()
            return Leaf(int(m.group()))
        m = _NAME.match(text, pos)
        if not m:
            raise ParserError("expected a symbol or leaf index", line, pos + 1)
        name = m.group()
        pos = m.end()
        if name not in symbols:
            raise ParserError("undeclared symbol %r" % name, line, m.start() + 1)
        sym = symbols[name]
        skip_ws()
        kids = []
        if pos < n and text[pos] == "(":
            pos += 1
            while True:
                kids.append(parse())
                skip_ws()
                if pos < n and text[pos] == ",":
                    pos += 1
                    continue
                if pos < n and text[pos] == ")":
                    pos += 1
                    break
                raise ParserError("expected ',' or ')'", line, pos + 1)
        if len(kids) != sym.arity:
            raise ParserError("arity mismatch: %s/%d applied to %d arguments"
                              % (name, sym.arity, len(kids)), line)
        return Node(sym, tuple(kids))

    out = parse()
    skip_ws()
    if pos != n:
        raise ParserError("trailing input after term", line, pos + 1)
    return out


def parse_presentation(text: str, name="") -> TheoryPresentation:
    sections = {"symbols": [], "equations": [], "cells": [], "relations": []}
    current = None
    notes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if raw.lstrip().startswith("#"):
            notes.append(raw.lstrip()[1:].strip())
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.endswith(":") and stripped[:-1] in sections:
            current = stripped[:-1]
            if sections[current]:
                raise ParserError("duplicate section %r" % current, lineno)
            sections[current].append(None)  # mark seen
            continue
        if current is None:
            raise ParserError("content before any section header", lineno)
        sections[current].append((lineno, stripped))

    def entries(key):
        return [x for x in sections[key] if x is not None]

    symbols = {}
    for lineno, line in entries("symbols"):
        m = re.fullmatch(r"(%s)\s*/\s*(\d+)" % _NAME.pattern, line)
        if not m:
            raise ParserError("expected 'name/arity'", lineno)
        nm, ar = m.group(1), int(m.group(2))
        if nm in symbols:
            raise ParserError("duplicate symbol %r" % nm, lineno)
        symbols[nm] = OperationSymbol(nm, ar)

    equations = []
    for lineno, line in entries("equations"):
        ordered = False
        if line.endswith("[ordered]"):
            ordered = True
            line = line[: -len("[ordered]")].rstrip()
        if "->" not in line:
            raise ParserError("expected 'term -> term'", lineno)
        lhs_txt, rhs_txt = line.split("->", 1)
        try:
            lhs = parse_term(lhs_txt.strip(), symbols, lineno)
            rhs = parse_term(rhs_txt.strip(), symbols, lineno)
            equations.append(TermEquation(lhs, rhs, ordered=ordered))
        except PresentationError as e:
            raise ParserError(str(e), lineno)

    cells = []
    for lineno, line in entries("cells"):
        invertible = False
        if line.endswith("[iso]"):
            invertible = True
            line = line[: -len("[iso]")].rstrip()
        m = re.match(r"(%s)\s*:\s*(.*)$" % _NAME.pattern, line)
        if not m or "=>" not in m.group(2):
            raise ParserError("expected 'name : term => term [iso]'", lineno)
        nm = m.group(1)
        src_txt, tgt_txt = m.group(2).split("=>", 1)
        try:
            cells.append(TwoCellGenerator(
                nm, parse_term(src_txt.strip(), symbols, lineno),
                parse_term(tgt_txt.strip(), symbols, lineno), invertible))
        except PresentationError as e:
            raise ParserError(str(e), lineno)

    base = make_presentation(symbols.values(), equations, cells, (), name=name)

    relations = []
    for lineno, line in entries("relations"):
        if ":" not in line:
            raise ParserError("expected 'term : path = path'", lineno)
        src_txt, rest = line.split(":", 1)
        if "=" not in rest:
            raise ParserError("expected 'term : path = path'", lineno)
        lhs_txt, rhs_txt = rest.split("=", 1)
        src = parse_term(src_txt.strip(), symbols, lineno)
        try:
            lhs = TwoCellPath(src.arity, src, parse_steps(lhs_txt.strip()))
            rhs = TwoCellPath(src.arity, src, parse_steps(rhs_txt.strip()))
            replay_raw(base, lhs)
            replay_raw(base, rhs)
        except Exception as e:
            raise ParserError("bad relation: %s" % e, lineno)
        relations.append(Relation(lhs, rhs))

    try:
        return make_presentation(symbols.values(), equations, cells, relations,
                                 name=name,
                                 notes="\n".join(n for n in notes if n))
    except Exception as e:
        raise ParserError(str(e))


def render_presentation(p: TheoryPresentation) -> str:
    out = []
    for line in (p.notes or "").splitlines():
        out.append("# " + line)
    out.append("symbols:")
    for s in p.symbols:
        out.append("  %s/%d" % (s.name, s.arity))
    if p.equations:
        out.append("equations:")
        for e in p.equations:
            tag = " [ordered]" if e.ordered else ""
            out.append("  %s -> %s%s" % (render_term(e.lhs), render_term(e.rhs), tag))
    if p.cells:
        out.append("cells:")
        for c in p.cells:
            tag = " [iso]" if c.invertible else ""
            out.append("  %s : %s => %s%s" % (c.name, render_term(c.source),
                                              render_term(c.target), tag))
    if p.relations:
        out.append("relations:")
        for r in p.relations:
            out.append("  %s : %s = %s" % (render_term(r.lhs.source), r.lhs, r.rhs))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# morphism files

def parse_morphism(text: str, resolve, name="") :
    """Parse a '.2map'; `resolve` maps a reference to a TheoryPresentation."""
    from .morphism import make_morphism
    from .morphism import image_term, raw_image
    src = tgt = None
    maps = {}
    cells = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("source:"):
            src = resolve(line[len("source:"):].strip())
            continue
        if line.startswith("target:"):
            tgt = resolve(line[len("target:"):].strip())
            continue
        if line == "maps:":
            current = "maps"
            continue
        if line == "cells:":
            current = "cells"
            continue
        if current is None:
            raise ParserError("content before maps:/cells:", lineno)
        if "->" not in line:
            raise ParserError("expected 'name -> value'", lineno)
        nm, val = [x.strip() for x in line.split("->", 1)]
        if current == "maps":
            maps[nm] = val
        else:
            cells[nm] = val
    if src is None or tgt is None:
        raise ParserError("missing source:/target: headers")
    tgt_syms = {s.name: s for s in tgt.symbols}
    symbol_map = {}
    for s in src.symbols:
        if s.name not in maps:
            raise ParserError("symbol %s has no map" % s.name)
        symbol_map[s.name] = parse_term(maps[s.name], tgt_syms)
    F0 = make_morphism(src, tgt, symbol_map, {}, name=name)
    cell_map = {}
    for c in src.cells:
        if c.name not in cells:
            raise ParserError("2-cell %s has no map" % c.name)
        source_img = image_term(F0, c.source)
        cell_map[c.name] = TwoCellPath(c.source.arity, source_img,
                                       parse_steps(cells[c.name]))
    return make_morphism(src, tgt, symbol_map, cell_map, name=name)


def render_morphism(F, source_ref: str, target_ref: str) -> str:
    out = ["source: %s" % source_ref, "target: %s" % target_ref, "maps:"]
    for nm, t in sorted(F.symbols.items()):
        out.append("  %s -> %s" % (nm, render_term(t)))
    if F.cells:
        out.append("cells:")
        for nm, path in sorted(F.cells.items()):
            out.append("  %s -> %s" % (nm, path))
    return "\n".join(out) + "\n"


def resolve_reference(ref: str):
    """Resolve 'stdlib:key' or a file path to a presentation."""
    ref = ref.strip()
    if ref.startswith("stdlib:"):
        from .stdlib import theory
        return theory(ref[len("stdlib:"):])
    with open(ref, "r", encoding="utf-8") as fh:
        return parse_presentation(fh.read(), name=ref)
