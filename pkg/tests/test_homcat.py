import json

from coherence_forge.bounds import Bound
from coherence_forge.homcat import export, hom_category, hom_mn
from coherence_forge.stdlib import theory

from test_presentations import brute_bracketings


def test_catalan_counts(bin_theory, b5):
    for n, want in [(2, 1), (3, 2), (4, 5), (5, 14)]:
        cat = hom_category(bin_theory, n, b5)
        assert len(cat.objects) == want
        assert len(cat.objects) == len(brute_bracketings(n))
        for (i, j), cs in cat.homs.items():
            for c in cs:
                assert cat.is_identity(c)


def test_smon_singletons(smon, b6):
    for n in range(1, 7):
        cat = hom_category(smon, n, b6)
        assert len(cat.objects) == 1
        assert cat.class_count() == 1


def test_mon_coherence(mon, b5):
    for n, want in [(4, 5), (5, 14)]:
        cat = hom_category(mon, n, b5)
        assert len(cat.objects) == want
        assert not cat.contaminated
        for i in range(want):
            for j in range(want):
                hom = cat.hom(i, j)
                assert len(hom) == 1
                assert cat.is_iso(hom[0])
        assert cat.check_laws()


def test_category_laws_everywhere(strfsh, mon, b4):
    for p in (strfsh, mon, theory("bin")):
        for n in (2, 3, 4):
            cat = hom_category(p, n, b4)
            assert cat.check_laws(), (p.name, n)


def test_product_category(bin_theory, b4):
    cat = hom_mn(bin_theory, 2, 4, b4)
    assert len(cat.objects) == 25
    assert cat.class_count() == 25
    assert cat.check_laws()
    single = hom_mn(bin_theory, 1, 4, b4)
    assert len(single.objects) == 5


def test_product_of_strict_is_singleton(smon, b4):
    for m in (2, 3):
        cat = hom_mn(smon, m, 3, b4)
        assert len(cat.objects) == 1
        assert cat.class_count() == 1


def test_export_deterministic(bin_theory, mon, b4):
    for p, n in [(bin_theory, 4), (mon, 4)]:
        cat1 = hom_category(p, n, b4)
        a = export(cat1, "json")
        b_ = export(hom_category(p, n, b4), "json")
        assert a == b_
        assert export(cat1, "dot") == export(cat1, "dot")


def test_dot_isolated_nodes(bin_theory, b4):
    dot = export(hom_category(bin_theory, 4, b4), "dot")
    assert dot.count("o4") >= 1
    assert "->" not in dot


def test_dot_mon_all_iso_edges(mon, b4):
    dot = export(hom_category(mon, 4, b4), "dot")
    # five objects, one class for each ordered pair of distinct objects
    assert dot.count("->") == 20


def test_json_schema_fields(mon, b4):
    doc = json.loads(export(hom_category(mon, 4, b4), "json",
                            tool_meta={"name": "t", "version": "0"}))
    assert set(doc) == {"arity", "objects", "homs", "truncation", "warnings",
                        "tool"}
    assert doc["arity"] == 4
    assert len(doc["objects"]) == 5
    assert doc["truncation"]["max_arity"] == 4
    for entry in doc["homs"]:
        assert set(entry) == {"src", "dst", "classes"}


def test_truncation_monotone_category(mon):
    small = hom_category(mon, 4, Bound(4, 7, 8))
    large = hom_category(mon, 4, Bound(4, 9, 16))
    objs_small = set(small.object_names)
    objs_large = set(large.object_names)
    assert objs_small <= objs_large
    assert small.class_count() <= large.class_count()


def test_braid_reaches_permuted_objects(b4):
    braid = theory("braid")
    cat = hom_category(braid, 3, b4)
    names = set(cat.object_names)
    assert "ten(1,ten(2,3))" in names
    assert any("ten(2,1)" in n or "ten(2,ten" in n or "ten(ten(2" in n
               for n in names)
    assert len(cat.objects) == 12    # both bracketings, all six labelings
