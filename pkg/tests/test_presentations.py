import itertools

import pytest

from coherence_forge.parser import parse_presentation, parse_term
from coherence_forge.presentations import (
    PresentationError, apply_U, apply_c, apply_d, apply_pi0,
    check_ground_confluence, coproduct, enumerate_normal_forms,
    enumerate_raw_terms, initial_theory, is_normal, normalize_term,
    presentations_isomorphic,
)
from coherence_forge.stdlib import theory
from coherence_forge.terms import Leaf, canonical_key


def _term(p, text):
    return parse_term(text, {s.name: s for s in p.symbols})


def brute_bracketings(n):
    """Independent counter for binary bracketings of n letters."""
    if n == 1:
        return [("leaf",)]
    out = []
    for k in range(1, n):
        for a in brute_bracketings(k):
            for c in brute_bracketings(n - k):
                out.append(("node", a, c))
    return out


def test_catalan_oracle_matches(bin_theory):
    for n in range(1, 7):
        got = enumerate_normal_forms(bin_theory, n, 2 * n)
        assert len(got) == len(brute_bracketings(n))


def test_normalize_right_comb(smon):
    t = _term(smon, "ten(ten(1,2),3)")
    assert normalize_term(smon, t) == _term(smon, "ten(1,ten(2,3))")
    assert is_normal(smon, _term(smon, "ten(1,ten(2,3))"))


def test_normalize_idempotent_sweep(smon, strfsh):
    for p in (smon, strfsh):
        for n in range(1, 5):
            for t in enumerate_raw_terms(p, n, 8):
                nf = normalize_term(p, t)
                assert normalize_term(p, nf) == nf


def test_no_equations_is_identity(bin_theory):
    for n in range(1, 5):
        for t in enumerate_raw_terms(bin_theory, n, 8):
            assert normalize_term(bin_theory, t) == t


def test_ground_confluence(smon, strfsh):
    assert check_ground_confluence(smon, 4, 9) == []
    assert check_ground_confluence(strfsh, 4, 9) == []
    assert check_ground_confluence(theory("smon"), 3, 7) == []


def test_strfsh_normal_forms(strfsh):
    # pure tensor trees plus the unique collapsed word
    assert len(enumerate_normal_forms(strfsh, 4, 9)) == 6
    assert len(enumerate_normal_forms(strfsh, 3, 7)) == 3


def test_apply_d_is_bin():
    magmas = parse_presentation("symbols:\n  ten/2\n", name="magmas")
    assert apply_d(magmas) == theory("bin")


def test_apply_d_monoids_is_smon():
    monoids = parse_presentation(
        "symbols:\n  ten/2\n  e/0\nequations:\n"
        "  ten(ten(1,2),3) -> ten(1,ten(2,3))\n"
        "  ten(e,1) -> 1\n  ten(1,e) -> 1\n", name="monoids")
    assert apply_d(monoids) == theory("smon")


def test_apply_d_rejects_cells(mon):
    with pytest.raises(PresentationError):
        apply_d(mon)


def test_apply_d_empty_is_initial():
    assert apply_d(initial_theory()) == initial_theory()


def test_apply_U(mon):
    u = apply_U(mon)
    assert not u.cells and not u.relations
    assert u.symbols == mon.symbols
    # U after d changes nothing on a plain theory
    magmas = parse_presentation("symbols:\n  ten/2\n")
    assert apply_U(apply_d(magmas)).symbols == magmas.symbols
    assert apply_U(apply_d(magmas)).equations == magmas.equations


def test_apply_pi0_strictifies(mon):
    q = apply_pi0(mon, 4, 9)
    assert not q.cells
    t = _term(q, "ten(ten(1,2),3)")
    assert normalize_term(q, t) == _term(q, "ten(1,ten(2,3))")


def test_apply_pi0_on_discrete_is_identity(bin_theory):
    q = apply_pi0(bin_theory, 4, 9)
    assert q.equations == bin_theory.equations
    assert q.symbols == bin_theory.symbols
    # pi0 after d is the identity on plain theories
    magmas = parse_presentation("symbols:\n  ten/2\n")
    assert apply_pi0(apply_d(magmas), 4, 9) == magmas


def test_apply_pi0_braid_commutative():
    q = apply_pi0(theory("braid"), 3, 8)
    # associativity and commutativity collapse all labeled products
    assert len(enumerate_normal_forms(q, 3, 8)) == 1
    a = normalize_term(q, _term(q, "ten(2,ten(1,3))"))
    b = normalize_term(q, _term(q, "ten(ten(3,2),1)"))
    assert a == b


def test_apply_c_pointed_magmas():
    pointed = parse_presentation("symbols:\n  ten/2\n  p/0\n", name="pointed")
    c = apply_c(pointed, 2, 5)
    # some cell identifies the operation with its swap
    pairs = {(x.source, x.target) for x in c.cells} | \
            {(x.target, x.source) for x in c.cells}
    s = _term(c, "ten(1,2)")
    sw = _term(c, "ten(2,1)")
    # connected through the chain of cells at arity 2
    names = [x for x in c.cells if x.source.arity == 2]
    assert names, "no arity-2 cells generated"
    objs = {x.source for x in names} | {x.target for x in names}
    assert s in objs and sw in objs


def test_apply_c_empty():
    assert apply_c(initial_theory(), 3, 6) == initial_theory()


def test_apply_c_indiscrete(b4):
    from coherence_forge.homcat import hom_category
    magmas = parse_presentation("symbols:\n  ten/2\n", name="magmas")
    c = apply_c(magmas, 3, 7)
    cat = hom_category(c, 3, b4)
    n = len(cat.objects)
    assert n == 12   # both bracketings, all leaf labelings
    for i in range(n):
        for j in range(n):
            assert len(cat.hom(i, j)) == 1


def test_coproduct_unit(bin_theory):
    assert presentations_isomorphic(coproduct(bin_theory, initial_theory()),
                                    bin_theory)


def test_coproduct_counts(bin_theory, mon):
    q = coproduct(bin_theory, bin_theory)
    assert len(q.symbols) == 2
    assert len(enumerate_normal_forms(q, 2, 5)) == 2
    qm = coproduct(mon, bin_theory)
    # oracle: shapes times binary symbol labelings
    shapes = len(brute_bracketings(4))
    assert len(enumerate_normal_forms(qm, 4, 9)) == shapes * 2 ** 3


def test_coproduct_commutative_up_to_renaming(bin_theory, mon):
    assert presentations_isomorphic(coproduct(bin_theory, mon),
                                    coproduct(mon, bin_theory))
    a = coproduct(coproduct(bin_theory, mon), theory("smon_nounit"))
    b = coproduct(bin_theory, coproduct(mon, theory("smon_nounit")))
    assert presentations_isomorphic(a, b)


def test_truncation_monotone(mon):
    small = set(enumerate_normal_forms(mon, 4, 7))
    large = set(enumerate_normal_forms(mon, 4, 9))
    assert small <= large
