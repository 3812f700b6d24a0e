import itertools
import random

import pytest

from coherence_forge.equivalence import (
    WitnessError, adjointify, build_certified_witness, certify, check_witness,
    compose, coproduct_witness, find_equivalence, flip, identity_functor,
    identity_witness, inflate_groupoid, random_groupoid, twist_unit,
    witness_from_section, witness_json,
)
from coherence_forge.homcat import hom_category
from coherence_forge.morphism import hom_functor
from coherence_forge.stdlib import morphism, theory


def test_identity_witness(mon, b4):
    cat = hom_category(mon, 4, b4)
    W = identity_witness(cat)
    assert check_witness(W).is_holds


def test_mon_smon_equivalence_found(mon, smon, b4):
    C = hom_category(mon, 4, b4)
    D = hom_category(smon, 4, b4)
    W = find_equivalence(C, D)
    assert W is not None
    assert check_witness(W).is_holds
    assert len(C.objects) == 5 and len(D.objects) == 1
    back = flip(W)
    assert check_witness(back).is_holds


def test_bin_smon_no_equivalence(bin_theory, smon, b4):
    C = hom_category(bin_theory, 4, b4)
    D = hom_category(smon, 4, b4)
    assert find_equivalence(C, D) is None


def test_flip_involution(b4):
    rng = random.Random(11)
    C = random_groupoid(rng, 5)
    D = inflate_groupoid(rng, C)
    W = find_equivalence(C, D)
    WW = flip(flip(W))
    assert [c.label for c in WW.unit] == [c.label for c in W.unit]
    assert [c.label for c in WW.counit] == [c.label for c in W.counit]
    assert WW.forward.obj_map == W.forward.obj_map


def test_compose_with_flip_passes(b4):
    rng = random.Random(12)
    for _ in range(20):
        C = random_groupoid(rng, 5)
        D = inflate_groupoid(rng, C)
        W = find_equivalence(C, D)
        assert check_witness(compose(W, flip(W))).is_holds
        assert check_witness(compose(flip(W), W)).is_holds


def test_chained_witnesses(mon, smon, assoc, b4):
    # assoc-fragment -> mon -> smon at arity 4, composed at category level
    C = hom_category(theory("bin"), 4, b4)
    D = hom_category(mon, 4, b4)
    E = hom_category(smon, 4, b4)
    W2 = find_equivalence(D, E)
    assert W2 is not None
    W1 = identity_witness(D)
    W = compose(W1, W2)
    assert check_witness(W).is_holds


def test_coproduct_witness(mon, smon, bin_theory, b4):
    D = hom_category(mon, 4, b4)
    E = hom_category(smon, 4, b4)
    W1 = find_equivalence(D, E)
    B = hom_category(bin_theory, 4, b4)
    W2 = identity_witness(B)
    W = coproduct_witness(W1, W2)
    assert check_witness(W).is_holds
    assert len(W.source.objects) == len(D.objects) + len(B.objects)
    assert len(W.target.objects) == len(E.objects) + len(B.objects)


def test_witness_from_section_case1(mon, smon, b4):
    # the strict-monoid category includes into the coherent one as the
    # one-object full subcategory on the right comb
    C = hom_category(mon, 4, b4)
    D = hom_category(smon, 4, b4)
    W = find_equivalence(D, C)    # D -> C includes, since D is the skeleton
    F, G = W.forward, W.backward
    # G o F = id_D holds strictly here
    W1 = witness_from_section(F, G, 1)
    assert check_witness(W1).is_holds
    assert all(W1.source.is_identity(c) for c in W1.unit)
    # case 2 with the two functors swapped: F o G = id_D
    W2 = witness_from_section(G, F, 2)
    assert check_witness(W2).is_holds
    assert all(W2.target.is_identity(c) for c in W2.counit)


def test_witness_from_section_wrong_case(mon, smon, b4):
    C = hom_category(mon, 4, b4)
    D = hom_category(smon, 4, b4)
    W = find_equivalence(C, D)
    with pytest.raises(WitnessError):
        witness_from_section(W.forward, W.backward, 1)   # G o F is not id


def test_adjointify_properties(b4):
    rng = random.Random(13)
    for _ in range(30):
        C = random_groupoid(rng, 5)
        D = inflate_groupoid(rng, C)
        W = twist_unit(rng, find_equivalence(C, D))
        assert check_witness(W).is_holds
        A = adjointify(W)
        assert A.adjoint and check_witness(A).is_holds
        assert A.forward.obj_map == W.forward.obj_map
        assert A.backward.obj_map == W.backward.obj_map
        assert [c.label for c in A.counit] == [c.label for c in W.counit]
        A2 = adjointify(A)
        assert [c.label for c in A2.unit] == [c.label for c in A.unit]


def test_find_equivalence_brute_crosscheck(b4):
    """find_equivalence agrees with a brute-force decider on small groupoids."""
    rng = random.Random(14)
    for _ in range(40):
        C = random_groupoid(rng, 4)
        D = random_groupoid(rng, 4)
        got = find_equivalence(C, D) is not None
        want = _brute_equivalent(C, D)
        assert got == want, (C._groups, D._groups)


def _brute_equivalent(C, D):
    """Two groupoids are equivalent iff their skeletons match: same multiset
    of (automorphism group order) over isomorphism classes."""
    def profile(X):
        comps = {}
        for i in range(len(X.objects)):
            cid = X._groups["comp_of"][i]
            comps[cid] = X._groups["group_of"][cid]
        return sorted(comps.values())
    return profile(C) == profile(D)


def test_certify_strictification(b4):
    cert, verdict = certify(morphism("mon_to_smon"), b4)
    assert verdict.is_holds and cert is not None
    for n, W in cert.per_arity.items():
        assert check_witness(W).is_holds
        hf = hom_functor(morphism("mon_to_smon"), n, b4)
        assert W.forward.obj_map == hf.obj_map
    doc = witness_json(cert.per_arity[4])
    assert set(doc) == {"forward", "backward", "unit", "counit", "adjoint"}


def test_certify_absent_names_arity(b4):
    cert, verdict = certify(morphism("bin_to_smon"), b4)
    assert cert is None
    assert verdict.is_fails
    assert "arity" in verdict.detail


def test_certify_agrees_with_classifier(b4):
    from coherence_forge.morphism import classify
    for key in ["mon_to_smon", "bin_to_mon", "bin_to_smon", "strfsh_to_smon"]:
        F = morphism(key)
        cert, verdict = certify(F, b4)
        weq = classify(F, b4).weak_equivalence
        assert (cert is not None) == weq.is_holds
        assert verdict.status == weq.status
