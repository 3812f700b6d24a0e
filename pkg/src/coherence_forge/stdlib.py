"""Built-in theories and morphisms used throughout the tool and its tests."""

from __future__ import annotations

from functools import lru_cache

from .morphism import TheoryMorphism, image_term, make_morphism
from .parser import parse_presentation
from .paths import RewriteStep, TwoCellPath
from .presentations import TheoryPresentation, initial_theory

THEORY_SOURCES = {
    "fin": """
# the initial theory: no operations, no 2-cells
symbols:
""",
    "bin": """
# one bare binary operation
symbols:
  ten/2
""",
    "assoc": """
# a binary operation with an associating iso and no coherence imposed
symbols:
  ten/2
cells:
  alpha : ten(ten(1,2),3) => ten(1,ten(2,3)) [iso]
""",
    "mon_nounit": """
# associativity iso subject to the pentagon; units omitted
symbols:
  ten/2
cells:
  alpha : ten(ten(1,2),3) => ten(1,ten(2,3)) [iso]
relations:
  ten(ten(ten(1,2),3),4) : alpha ; alpha = alpha@1 ; alpha ; alpha@2
""",
    "mon": """
# monoidal structure: associator, unitors, pentagon and triangle
symbols:
  ten/2
  e/0
cells:
  alpha : ten(ten(1,2),3) => ten(1,ten(2,3)) [iso]
  lam : ten(e,1) => 1 [iso]
  rho : ten(1,e) => 1 [iso]
relations:
  ten(ten(ten(1,2),3),4) : alpha ; alpha = alpha@1 ; alpha ; alpha@2
  ten(ten(1,e),2) : rho@1 = alpha ; lam@2
""",
    "smon_nounit": """
# strict associativity, no unit
symbols:
  ten/2
equations:
  ten(ten(1,2),3) -> ten(1,ten(2,3))
""",
    "smon": """
# strict monoid structure
symbols:
  ten/2
  e/0
equations:
  ten(ten(1,2),3) -> ten(1,ten(2,3))
  ten(e,1) -> 1
  ten(1,e) -> 1
""",
    "strfsh": """
# two binary operations; the second strictly associative and absorbing, with
# an iso comparison cell; presents the cylinder of bin -> smon_nounit
symbols:
  ten/2
  plus/2
equations:
  plus(plus(1,2),3) -> plus(1,plus(2,3))
  ten(plus(1,2),3) -> plus(plus(1,2),3)
  ten(1,plus(2,3)) -> plus(1,plus(2,3))
  plus(ten(1,2),3) -> plus(plus(1,2),3)
  plus(1,ten(2,3)) -> plus(1,plus(2,3))
cells:
  delta : ten(1,2) => plus(1,2) [iso]
relations:
  ten(ten(1,2),3) : delta = delta@1
  ten(1,ten(2,3)) : delta = delta@2
  plus(ten(1,2),3) : delta@1 = id
  plus(1,ten(2,3)) : delta@2 = id
""",
    "braid": """
# experimental: braiding via leaf permutation, hexagons included
symbols:
  ten/2
cells:
  alpha : ten(ten(1,2),3) => ten(1,ten(2,3)) [iso]
  c : ten(1,2) => ten(2,1) [iso]
relations:
  ten(ten(ten(1,2),3),4) : alpha ; alpha = alpha@1 ; alpha ; alpha@2
  ten(ten(1,2),3) : alpha ; c ; alpha = c@1 ; alpha ; c@2
  ten(1,ten(2,3)) : alpha~ ; c ; alpha~ = c@2 ; alpha~ ; c@1
""",
}

THEORY_KEYS = tuple(sorted(THEORY_SOURCES))


@lru_cache(maxsize=None)
def theory(key: str) -> TheoryPresentation:
    if key not in THEORY_SOURCES:
        raise KeyError("unknown stdlib theory %r (known: %s)"
                       % (key, ", ".join(THEORY_KEYS)))
    return parse_presentation(THEORY_SOURCES[key], name=key)


def _id_path_on_image(F0, cell):
    return TwoCellPath(cell.source.arity, image_term(F0, cell.source), ())


def _generator_path(cell, name=None):
    return TwoCellPath(cell.source.arity, cell.source,
                       (RewriteStep(name or cell.name, ()),))


@lru_cache(maxsize=None)
def morphism(key: str) -> TheoryMorphism:
    builders = {
        "assoc_to_mon": _assoc_to_mon,
        "mon_to_smon": _mon_to_smon,
        "mon_to_smon_unital": _mon_to_smon_unital,
        "bin_to_mon": _bin_to_mon,
        "bin_to_smon": _bin_to_smon,
        "bin_to_strfsh": _bin_to_strfsh,
        "strfsh_to_smon": _strfsh_to_smon,
        "strfsh_to_mon": _strfsh_to_mon,
    }
    if key not in builders:
        raise KeyError("unknown stdlib morphism %r (known: %s)"
                       % (key, ", ".join(sorted(builders))))
    return builders[key]()


MORPHISM_KEYS = ("assoc_to_mon", "mon_to_smon", "mon_to_smon_unital",
                 "bin_to_mon", "bin_to_smon", "bin_to_strfsh",
                 "strfsh_to_smon", "strfsh_to_mon")


def _sym_term(p, name):
    from .morphism import _symbol_term
    return _symbol_term(p.symbol(name))


def _assoc_to_mon():
    src, tgt = theory("assoc"), theory("mon_nounit")
    return make_morphism(src, tgt, {"ten": _sym_term(tgt, "ten")},
                         {"alpha": _generator_path(src.cell("alpha"))},
                         name="assoc_to_mon")


def _mon_to_smon():
    src, tgt = theory("mon_nounit"), theory("smon_nounit")
    F0 = make_morphism(src, tgt, {"ten": _sym_term(tgt, "ten")}, {}, name="")
    return make_morphism(src, tgt, {"ten": _sym_term(tgt, "ten")},
                         {"alpha": _id_path_on_image(F0, src.cell("alpha"))},
                         name="mon_to_smon")


def _mon_to_smon_unital():
    src, tgt = theory("mon"), theory("smon")
    sym = {"ten": _sym_term(tgt, "ten"), "e": _sym_term(tgt, "e")}
    F0 = make_morphism(src, tgt, sym, {}, name="")
    cells = {c.name: _id_path_on_image(F0, c) for c in src.cells}
    return make_morphism(src, tgt, sym, cells, name="mon_to_smon_unital")


def _bin_to_mon():
    src, tgt = theory("bin"), theory("mon_nounit")
    return make_morphism(src, tgt, {"ten": _sym_term(tgt, "ten")}, {},
                         name="bin_to_mon")


def _bin_to_smon():
    src, tgt = theory("bin"), theory("smon_nounit")
    return make_morphism(src, tgt, {"ten": _sym_term(tgt, "ten")}, {},
                         name="bin_to_smon")


def _bin_to_strfsh():
    src, tgt = theory("bin"), theory("strfsh")
    return make_morphism(src, tgt, {"ten": _sym_term(tgt, "ten")}, {},
                         name="bin_to_strfsh")


def _strfsh_to_smon():
    src, tgt = theory("strfsh"), theory("smon_nounit")
    sym = {"ten": _sym_term(tgt, "ten"), "plus": _sym_term(tgt, "ten")}
    F0 = make_morphism(src, tgt, sym, {}, name="")
    return make_morphism(src, tgt, sym,
                         {"delta": _id_path_on_image(F0, src.cell("delta"))},
                         name="strfsh_to_smon")


def _strfsh_to_mon():
    # the comparison map out of the cylinder; it commutes with the legs
    # generator-wise but cannot respect the strict plus-associativity of its
    # source, so check_morphism reports that equation honestly
    src, tgt = theory("strfsh"), theory("mon_nounit")
    sym = {"ten": _sym_term(tgt, "ten"), "plus": _sym_term(tgt, "ten")}
    F0 = make_morphism(src, tgt, sym, {}, name="")
    return make_morphism(src, tgt, sym,
                         {"delta": _id_path_on_image(F0, src.cell("delta"))},
                         name="strfsh_to_mon")
