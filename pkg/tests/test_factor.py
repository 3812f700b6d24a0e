import pytest

from coherence_forge.bounds import Bound
from coherence_forge.factor import (
    FactorError, compare_factorizations, mapping_cylinder, path_object,
)
from coherence_forge.homcat import hom_category
from coherence_forge.morphism import identity_morphism, image_term
from coherence_forge.stdlib import morphism, theory


def test_path_object_identity_on_bin(b4, bin_theory):
    res = path_object(identity_morphism(bin_theory), b4)
    mid = res.middle.category(4)
    assert len(mid.objects) == 5          # only identity comparison cells
    assert res.into_report.trivial_cofibration.is_holds
    assert res.out_report.fibration.is_holds
    assert mid.check_laws()


def test_path_object_bin_to_smon(b4):
    res = path_object(morphism("bin_to_smon"), b4)
    mid = res.middle.category(4)
    assert len(mid.objects) == 5
    # homs agree with the source: identities only
    assert mid.class_count() == 5
    assert res.into_report.trivial_cofibration.is_holds
    assert res.out_report.fibration.is_holds


def test_path_object_composite_recovers_morphism(b4):
    F = morphism("bin_to_smon")
    res = path_object(F, b4)
    for n in range(b4.max_arity + 1):
        K, G = res.into_middle[n], res.out_of_middle[n]
        hfn = __import__("coherence_forge.morphism", fromlist=["hom_functor"])
        hf = hfn.hom_functor(F, n, b4, K.source, G.target)
        for i, t in enumerate(K.source.objects):
            assert G.obj_map[K.obj_map[i]] == hf.obj_map[i]
        for key, lab in K.label_map.items():
            a = K.obj_map[key[0]], K.obj_map[key[1]]
            glab = G.label_map[(a[0], a[1], lab)]
            assert glab == hf.label_map[key]


def test_cylinder_starfish_counts(b4):
    res = mapping_cylinder(morphism("bin_to_smon"), b4)
    mid = res.middle.category(4)
    assert len(mid.objects) == 6
    for i in range(6):
        for j in range(6):
            assert len(mid.hom(i, j)) == 1
    assert res.into_report.cofibration.is_holds
    assert res.out_report.trivial_fibration.is_holds
    assert mid.check_laws()


def test_cylinder_identity_on_bin(b4, bin_theory):
    res = mapping_cylinder(identity_morphism(bin_theory), b4)
    mid = res.middle.category(4)
    assert len(mid.objects) == 10
    # matched copies are linked by a unique class, unmatched pairs by none
    singletons = sum(1 for i in range(10) for j in range(10)
                     if len(mid.hom(i, j)) == 1)
    assert singletons == 20    # 5 matched pairs, both directions, plus loops


def test_cylinder_composite_recovers_morphism(b4):
    F = morphism("bin_to_smon")
    res = mapping_cylinder(F, b4)
    from coherence_forge.morphism import hom_functor
    for n in range(b4.max_arity + 1):
        K, G = res.into_middle[n], res.out_of_middle[n]
        hf = hom_functor(F, n, b4, K.source, G.target)
        for i in range(len(K.source.objects)):
            assert G.obj_map[K.obj_map[i]] == hf.obj_map[i]
        for key, lab in K.label_map.items():
            a = K.obj_map[key[0]], K.obj_map[key[1]]
            assert G.label_map[(a[0], a[1], lab)] == hf.label_map[key]


def test_unique_comparison_per_bracketing(b5):
    # one morphism class from each pure word to the collapsed word
    res = mapping_cylinder(morphism("bin_to_smon"), b5)
    for n in (2, 3, 4, 5):
        mid = res.middle.category(n)
        star = [a for a, o in enumerate(mid.objects) if o[0] == 1]
        assert len(star) == 1
        for a, o in enumerate(mid.objects):
            if o[0] == 0:
                assert len(mid.hom(a, star[0])) == 1


def test_cylinder_hom_mn_is_product(b4):
    res = mapping_cylinder(morphism("bin_to_smon"), b4)
    prod = res.middle.hom_mn(2, 3)
    base = res.middle.category(3)
    assert len(prod.objects) == len(base.objects) ** 2
    assert prod.check_laws()


def test_middle_substitution(b4):
    res = mapping_cylinder(morphism("bin_to_smon"), b4)
    mid2 = res.middle.category(2)
    # tensor-side object grafted into itself lands on the tensor side
    i_ten = next(a for a, o in enumerate(mid2.objects)
                 if o[0] == 0)
    out = res.middle.substitute_objects(2, i_ten, 1, 2, i_ten)
    assert out is not None
    obj = res.middle.category(3).objects[out]
    assert obj[0] == 0
    # collapsed-side object absorbs anything grafted into it
    i_star = next(a for a, o in enumerate(mid2.objects) if o[0] == 1)
    out2 = res.middle.substitute_objects(2, i_star, 1, 2, i_ten)
    assert res.middle.category(3).objects[out2][0] == 1


def test_path_middle_substitution_associative(b4, bin_theory):
    res = path_object(identity_morphism(bin_theory), b4)
    mid2 = res.middle.category(2)
    assert len(mid2.objects) == 1
    a = res.middle.substitute_objects(2, 0, 1, 2, 0)
    assert a is not None
    l1 = res.middle.substitute_objects(3, a, 1, 2, 0)
    r1 = res.middle.substitute_objects(3, a, 3, 2, 0)
    assert l1 is not None and r1 is not None
    assert l1 != r1   # different bracketings stay distinct


def test_compare_factorizations_starfish(b4):
    cyl = mapping_cylinder(morphism("bin_to_smon"), b4)
    cmp = compare_factorizations(
        cyl, (morphism("bin_to_mon"), morphism("mon_to_smon")), b4)
    assert cmp.uniqueness.is_holds
    assert cmp.loose_ends[4]
    # the only loose end is the collapsed word, with one image per bracketing
    (obj, count), = cmp.loose_ends[4].items()
    assert count == 5
    # connecting classes exist everywhere and are identities over the source
    for n, conn in cmp.alphas.items():
        assert len(conn) == len(cyl.middle.category(n).objects)


def test_compare_seed_changes_lift(b4):
    cyl = mapping_cylinder(morphism("bin_to_smon"), b4)
    legs = (morphism("bin_to_mon"), morphism("mon_to_smon"))
    c0 = compare_factorizations(cyl, legs, b4, seed=0)
    c1 = compare_factorizations(cyl, legs, b4, seed=1)
    assert c0.uniqueness.is_holds and c1.uniqueness.is_holds
    loose = next(iter(c0.loose_ends[4]))
    assert c0.h_objects[4][loose] != c1.h_objects[4][loose]


def test_compare_rejects_wrong_legs(b4):
    cyl = mapping_cylinder(morphism("bin_to_smon"), b4)
    with pytest.raises(FactorError):
        compare_factorizations(
            cyl, (morphism("bin_to_mon"), morphism("strfsh_to_smon")), b4)


def test_compare_against_handwritten_presentation(b4, strfsh):
    # every object of the comparison target is a valid image of the
    # collapsed word (all are isomorphic there), and all the choices stay
    # uniquely isomorphic
    cyl = mapping_cylinder(morphism("bin_to_smon"), b4)
    res = compare_factorizations(
        cyl, (morphism("bin_to_strfsh"), morphism("strfsh_to_smon")), b4)
    assert res.uniqueness.is_holds
    for n, d in res.loose_ends.items():
        hand = hom_category(strfsh, n, b4)
        assert all(v == len(hand.objects) for v in d.values())


def test_cylinder_matches_handwritten_presentation(b4, strfsh):
    cyl = mapping_cylinder(morphism("bin_to_smon"), b4)
    for n in range(2, 5):
        mid = cyl.middle.category(n)
        hand = hom_category(strfsh, n, b4)
        assert len(mid.objects) == len(hand.objects)
        # all hom-sets singletons on both sides: any object bijection is an
        # isomorphism of categories; exhibit the canonical one
        assert all(len(mid.hom(i, j)) == 1
                   for i in range(len(mid.objects))
                   for j in range(len(mid.objects)))
        assert all(len(hand.hom(i, j)) == 1
                   for i in range(len(hand.objects))
                   for j in range(len(hand.objects)))
        ten_side = [nm for nm in hand.object_names if "plus" not in nm]
        assert len(ten_side) == len(mid.objects) - 1


def test_factor_rejects_invalid_morphism(b4):
    with pytest.raises(FactorError):
        path_object(morphism("strfsh_to_mon"), b4)
