"""Command-line front end.

Exit codes: 0 the query holds (or plain success), 1 it fails, 2 the budget
was exhausted (unknown), 3 usage or input errors.  Every JSON document
embeds the tool version and the bound in force; outputs are byte-stable
across runs and --jobs settings.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .bounds import Bound, default_bound
from .engine import equal_paths, enumerate_rewrites
from .homcat import export, hom_category, hom_mn
from .parser import (
    ParserError, parse_morphism, parse_presentation, parse_term, parse_steps,
    render_morphism, render_presentation, resolve_reference,
)
from .paths import PathError, TwoCellPath, Verdict
from .presentations import PresentationError

EXIT = {"Holds": 0, "Fails": 1, "Unknown": 2}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(3)


def _tool_meta(bound):
    return {"name": "coherence-forge", "version": __version__,
            "bound": bound.as_dict()}


def _bound_from(args):
    base = default_bound()
    return Bound(
        args.max_arity if args.max_arity is not None else base.max_arity,
        args.max_term_size if args.max_term_size is not None else base.max_term_size,
        args.max_path_len if args.max_path_len is not None else base.max_path_len,
        args.budget if args.budget is not None else base.budget)


def _add_bound_flags(sp):
    sp.add_argument("--max-arity", type=int, default=None)
    sp.add_argument("--max-term-size", type=int, default=None)
    sp.add_argument("--max-path-len", type=int, default=None)
    sp.add_argument("--budget", type=int, default=None)
    sp.add_argument("--jobs", type=int, default=1,
                    help="parallel per-arity workers (results are identical)")


def _resolve_map(spec, frm, to, name=""):
    from .morphism import make_morphism
    if spec.startswith("stdlib:"):
        from .stdlib import morphism
        F = morphism(spec[len("stdlib:"):])
    else:
        with open(spec, "r", encoding="utf-8") as fh:
            F = parse_morphism(fh.read(), resolve_reference, name=spec)
    if frm or to:
        src = resolve_reference(frm) if frm else F.source
        tgt = resolve_reference(to) if to else F.target
        F = make_morphism(src, tgt, dict(F.symbol_map), dict(F.cell_map),
                          name=F.name)
    return F


def _prewarm(p, bound, jobs):
    if jobs <= 1:
        return
    import concurrent.futures as cf
    with cf.ThreadPoolExecutor(max_workers=jobs) as ex:
        list(ex.map(lambda n: hom_category(p, n, bound),
                    range(bound.max_arity + 1)))


def _emit(doc, fmt):
    if fmt == "json":
        sys.stdout.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    else:
        _emit_text(doc)


def _emit_text(doc, indent=0):
    pad = "  " * indent
    if isinstance(doc, dict):
        for k in sorted(doc):
            v = doc[k]
            if isinstance(v, (dict, list)):
                sys.stdout.write("%s%s:\n" % (pad, k))
                _emit_text(v, indent + 1)
            else:
                sys.stdout.write("%s%s: %s\n" % (pad, k, v))
    elif isinstance(doc, list):
        for v in doc:
            _emit_text(v, indent)
    else:
        sys.stdout.write("%s%s\n" % (pad, doc))


def main(argv=None):
    ap = _Parser(prog="coherence-forge",
                 description="truncated hom-category explorer and "
                             "model-structure classifier for presented "
                             "2-theories")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("show", help="print a presentation")
    sp.add_argument("theory")

    sp = sub.add_parser("enumerate", help="materialize a hom-category")
    sp.add_argument("theory")
    sp.add_argument("--arity", type=int, required=True)
    sp.add_argument("--objects", type=int, default=1,
                    help="first hom argument m for T(m,n)")
    sp.add_argument("--format", choices=["json", "dot", "text"], default="json")
    sp.add_argument("--render", metavar="FILE", default=None)
    _add_bound_flags(sp)

    sp = sub.add_parser("classify", help="weak equivalence / fibration / "
                                         "cofibration verdicts")
    sp.add_argument("--map", required=True)
    sp.add_argument("--from", dest="frm", default=None)
    sp.add_argument("--to", default=None)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    _add_bound_flags(sp)

    sp = sub.add_parser("certify", help="per-arity equivalence witnesses")
    sp.add_argument("--map", required=True)
    sp.add_argument("--from", dest="frm", default=None)
    sp.add_argument("--to", default=None)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    _add_bound_flags(sp)

    sp = sub.add_parser("factor", help="path-space or cylinder factorization")
    sp.add_argument("kind", choices=["path", "cylinder"])
    sp.add_argument("--map", required=True)
    sp.add_argument("--from", dest="frm", default=None)
    sp.add_argument("--to", default=None)
    sp.add_argument("--arity", type=int, default=None,
                    help="emit the middle category at this arity")
    sp.add_argument("--emit-dot", action="store_true")
    sp.add_argument("--render", metavar="FILE", default=None)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    _add_bound_flags(sp)

    sp = sub.add_parser("lift", help="lift an iso class along a fibration")
    sp.add_argument("--map", required=True)
    sp.add_argument("--from", dest="frm", default=None)
    sp.add_argument("--to", default=None)
    sp.add_argument("--object", required=True, help="1-cell in the source")
    sp.add_argument("--path", required=True,
                    help="iso path in the target from the object's image")
    _add_bound_flags(sp)

    sp = sub.add_parser("kronecker", help="tensor of two theories")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("-o", "--output", default=None)
    sp.add_argument("--check", action="store_true",
                    help="run the interchange coherence check")
    _add_bound_flags(sp)

    sp = sub.add_parser("coherence", help="parallel-path equality sweep")
    sp.add_argument("theory")
    sp.add_argument("--arity", type=int, required=True)
    sp.add_argument("--source", default=None,
                    help="source term for an explicit pair")
    sp.add_argument("--pair", nargs=2, metavar=("P", "Q"), default=None)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    _add_bound_flags(sp)

    sp = sub.add_parser("compare", help="compare a cylinder factorization "
                                        "against another one")
    sp.add_argument("--map", required=True)
    sp.add_argument("--other-k", required=True)
    sp.add_argument("--other-g", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--format", choices=["json", "text"], default="json")
    _add_bound_flags(sp)

    args = ap.parse_args(argv)
    try:
        return _dispatch(args)
    except (ParserError, PresentationError, PathError, FileNotFoundError,
            KeyError, ValueError) as e:
        sys.stderr.write("error: %s\n" % e)
        return 3


def _dispatch(args):
    cmd = args.command
    if cmd == "show":
        p = resolve_reference(_as_ref(args.theory))
        sys.stdout.write(render_presentation(p))
        return 0

    if cmd == "enumerate":
        bound = _bound_from(args)
        p = resolve_reference(_as_ref(args.theory))
        _prewarm(p, bound, args.jobs)
        cat = (hom_category(p, args.arity, bound) if args.objects == 1
               else hom_mn(p, args.objects, args.arity, bound))
        if args.render:
            from .render import render_category_figure
            render_category_figure(cat, args.render,
                                   title="%s(%d,%d)" % (args.theory,
                                                        args.objects,
                                                        args.arity))
        if args.format == "dot":
            sys.stdout.write(export(cat, "dot"))
        elif args.format == "json":
            sys.stdout.write(export(cat, "json", _tool_meta(bound)))
        else:
            sys.stdout.write("%d objects, %d morphism classes\n"
                             % (len(cat.objects), cat.class_count()))
        return 0

    if cmd == "classify":
        from .morphism import classify
        bound = _bound_from(args)
        F = _resolve_map(args.map, args.frm, args.to)
        _prewarm(F.source, bound, args.jobs)
        _prewarm(F.target, bound, args.jobs)
        rep = classify(F, bound)
        doc = {"tool": _tool_meta(bound), "morphism": F.name or args.map,
               "report": rep.as_dict()}
        _emit(doc, args.format)
        return EXIT[rep.weak_equivalence.status]

    if cmd == "certify":
        from .equivalence import certify, witness_json
        bound = _bound_from(args)
        F = _resolve_map(args.map, args.frm, args.to)
        _prewarm(F.source, bound, args.jobs)
        _prewarm(F.target, bound, args.jobs)
        cert, verdict = certify(F, bound)
        doc = {"tool": _tool_meta(bound), "morphism": F.name or args.map,
               "verdict": verdict.status, "detail": verdict.detail}
        if cert is not None:
            doc["witnesses"] = {str(n): witness_json(w)
                                for n, w in sorted(cert.per_arity.items())}
        _emit(doc, args.format)
        return EXIT[verdict.status]

    if cmd == "factor":
        from .factor import mapping_cylinder, path_object
        bound = _bound_from(args)
        F = _resolve_map(args.map, args.frm, args.to)
        res = (path_object(F, bound) if args.kind == "path"
               else mapping_cylinder(F, bound))
        pick = args.arity if args.arity is not None else bound.max_arity
        mid = res.middle.category(pick)
        if args.render:
            from .render import render_category_figure
            render_category_figure(mid, args.render,
                                   title="%s middle (1,%d)" % (args.kind, pick))
        if args.emit_dot:
            sys.stdout.write(export(mid, "dot"))
            return 0
        doc = {
            "tool": _tool_meta(bound),
            "kind": res.kind,
            "morphism": F.name or args.map,
            "middle_objects": {str(n): len(c.objects)
                               for n, c in sorted(res.middle.per_arity.items())},
            "into_middle": res.into_report.as_dict(),
            "out_of_middle": res.out_report.as_dict(),
            "middle_at_%d" % pick: json.loads(export(mid, "json")),
        }
        _emit(doc, args.format)
        return 0

    if cmd == "lift":
        from .morphism import lift_iso
        bound = _bound_from(args)
        F = _resolve_map(args.map, args.frm, args.to)
        syms = {s.name: s for s in F.source.symbols}
        tsyms = {s.name: s for s in F.target.symbols}
        f = parse_term(args.object, syms)
        from .morphism import image_term
        beta = TwoCellPath(f.arity, image_term(F, f), parse_steps(args.path))
        out = lift_iso(F, f, beta, bound)
        sys.stdout.write("%s : %s\n" % (out.source, out))
        return 0

    if cmd == "kronecker":
        from .kronecker import check_delta_coherence, kronecker
        bound = _bound_from(args)
        p1 = resolve_reference(_as_ref(args.left))
        p2 = resolve_reference(_as_ref(args.right))
        kp = kronecker(p1, p2, bound)
        text = render_presentation(kp.presentation)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.check:
            v = check_delta_coherence(kp, bound)
            sys.stderr.write("coherence: %s %s\n" % (v.status, v.detail))
            return EXIT[v.status]
        return 0

    if cmd == "coherence":
        bound = _bound_from(args)
        p = resolve_reference(_as_ref(args.theory))
        if args.pair:
            if not args.source:
                raise ParserError("--pair needs --source TERM")
            syms = {s.name: s for s in p.symbols}
            src = parse_term(args.source, syms)
            a = TwoCellPath(src.arity, src, parse_steps(args.pair[0]))
            b = TwoCellPath(src.arity, src, parse_steps(args.pair[1]))
            v = equal_paths(p, a, b, bound)
            doc = {"tool": _tool_meta(bound), "verdict": v.status,
                   "detail": v.detail}
            if v.is_holds and isinstance(v.witness, dict) and \
                    "moves" in v.witness:
                doc["moves"] = [list(map(str, m)) for m in v.witness["moves"]]
            _emit(doc, args.format)
            return EXIT[v.status]
        _prewarm(p, bound, args.jobs)
        cat = hom_category(p, args.arity, bound)
        multi = [(cat.object_names[i], cat.object_names[j], len(cat.hom(i, j)))
                 for i in range(len(cat.objects))
                 for j in range(len(cat.objects)) if len(cat.hom(i, j)) > 1]
        status = "Unknown" if cat.contaminated else (
            "Fails" if multi else "Holds")
        doc = {"tool": _tool_meta(bound), "verdict": status,
               "objects": len(cat.objects),
               "parallel_pairs_with_distinct_classes": [
                   {"src": a, "dst": b, "classes": k} for a, b, k in multi],
               "warnings": sorted(cat.warnings)}
        _emit(doc, args.format)
        return EXIT[status]

    if cmd == "compare":
        from .factor import compare_factorizations, mapping_cylinder
        bound = _bound_from(args)
        F = _resolve_map(args.map, None, None)
        K2 = _resolve_map(args.other_k, None, None)
        G2 = _resolve_map(args.other_g, None, None)
        cyl = mapping_cylinder(F, bound)
        cmpres = compare_factorizations(cyl, (K2, G2), bound, seed=args.seed)
        doc = {
            "tool": _tool_meta(bound),
            "uniqueness": cmpres.uniqueness.status,
            "detail": cmpres.uniqueness.detail,
            "loose_ends": {str(n): {str(k): v for k, v in d.items()}
                           for n, d in sorted(cmpres.loose_ends.items())},
        }
        _emit(doc, args.format)
        return EXIT[cmpres.uniqueness.status]

    raise ParserError("unknown command %r" % cmd)


def _as_ref(name):
    if name.endswith(".2th") or "/" in name:
        return name
    return "stdlib:" + name


if __name__ == "__main__":
    sys.exit(main())
