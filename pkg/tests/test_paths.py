import random

import pytest

from coherence_forge.engine import enumerate_rewrites, equal_paths
from coherence_forge.parser import parse_term
from coherence_forge.paths import (
    PathError, RewriteStep, TwoCellPath, compose_paths, identity_path,
    invert_path, parse_steps, path_target, replay_path, user_steps,
)
from coherence_forge.stdlib import theory


def _term(p, text):
    return parse_term(text, {s.name: s for s in p.symbols})


def _path(p, source, text):
    return TwoCellPath(source.arity, source, parse_steps(text))


def test_enumerate_rewrites_single_redex(mon):
    t = _term(mon, "ten(ten(1,2),3)")
    steps = enumerate_rewrites(mon, t)
    assert [repr(s) for s in steps] == ["alpha"]


def test_enumerate_rewrites_empty_for_bin(bin_theory):
    for text in ["ten(ten(1,2),3)", "ten(1,2)"]:
        assert enumerate_rewrites(bin_theory, _term(bin_theory, text)) == ()


def test_enumerate_rewrites_left_comb(mon):
    t = _term(mon, "ten(ten(ten(1,2),3),4)")
    steps = enumerate_rewrites(mon, t)
    assert [repr(s) for s in steps] == ["alpha", "alpha@1"]
    t2 = _term(mon, "ten(1,ten(2,ten(3,4)))")
    back = enumerate_rewrites(mon, t2)
    assert all(s.inverse for s in back) and len(back) == 2


def test_compose_unit_and_assoc(mon):
    t = _term(mon, "ten(ten(ten(1,2),3),4)")
    p = _path(mon, t, "alpha ; alpha")
    idp = identity_path(t)
    assert compose_paths(mon, idp, p).steps == p.steps
    mid = path_target(mon, p)
    q = _path(mon, mid, "alpha~")
    r = _path(mon, path_target(mon, q), "alpha~@1")
    left = compose_paths(mon, compose_paths(mon, p, q), r)
    right = compose_paths(mon, p, compose_paths(mon, q, r))
    assert left.steps == right.steps


def test_compose_rejects_mismatch(mon):
    t = _term(mon, "ten(ten(1,2),3)")
    p = _path(mon, t, "alpha")
    with pytest.raises(PathError):
        compose_paths(mon, p, p)


def test_invert_roundtrip(mon):
    t = _term(mon, "ten(ten(ten(1,2),3),4)")
    p = _path(mon, t, "alpha@1 ; alpha")
    q = invert_path(mon, p)
    assert path_target(mon, q) == t
    assert invert_path(mon, q).steps == p.steps
    assert invert_path(mon, identity_path(t)).steps == ()


def test_invert_rejects_noninvertible():
    src = ("symbols:\n  ten/2\ncells:\n  a : ten(1,2) => ten(2,1)\n")
    from coherence_forge.parser import parse_presentation
    p = parse_presentation(src)
    t = _term(p, "ten(1,2)")
    path = _path(p, t, "a")
    with pytest.raises(PathError):
        invert_path(p, path)


def test_compose_with_inverse_is_identity_class(mon, b5):
    rng = random.Random(3)
    from coherence_forge.presentations import enumerate_normal_forms
    objs = enumerate_normal_forms(mon, 4, 9)
    done = 0
    while done < 100:
        t = objs[rng.randrange(len(objs))]
        steps = []
        cur = t
        for _ in range(rng.randint(1, 3)):
            opts = user_steps(mon, cur)
            if not opts:
                break
            st, raw = opts[rng.randrange(len(opts))]
            steps.append(st)
            from coherence_forge.presentations import normalize_term
            cur = normalize_term(mon, raw)
        if not steps:
            continue
        p = TwoCellPath(4, t, tuple(steps))
        q = invert_path(mon, p)
        loop = compose_paths(mon, p, q)
        v = equal_paths(mon, loop, identity_path(t), b5)
        assert v.is_holds, (p, v)
        done += 1


def test_replay_modulo_equations(strfsh):
    # the comparison cell can only fire on a non-normal representative here
    t = _term(strfsh, "plus(1,plus(2,3))")
    p = TwoCellPath(3, t, (RewriteStep("delta", (), inverse=True),))
    visited = replay_path(strfsh, p)
    assert visited[-1].symbol.name == "ten"


def test_path_render_roundtrip(mon):
    t = _term(mon, "ten(ten(ten(1,2),3),4)")
    p = _path(mon, t, "alpha@1 ; alpha~ ; alpha")
    assert parse_steps(repr(p)) == p.steps
    assert repr(identity_path(t)) == "id"
