from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from toricobs import lattice
from toricobs.catalog import (L12_PRESENTATION, build_fa_bundle, builtin_catalog,
                              g1_presentation, l5_presentation, p4, rel)
from toricobs.fan import (CollectionMismatch, Fan, InconsistentRelations, MalformedFan,
                          NotACone, UnderdeterminedRays, ValidationFailed, cone_exists,
                          detect_p1_factor, fan_from_primitive_data, p1_factors,
                          primitive_collections, primitive_relation, star_subdivision,
                          validate)

from .helpers import d

CATALOG = builtin_catalog()
catalog_fans = st.sampled_from([e.fan for e in CATALOG])


def test_p4_is_valid():
    r = validate(p4())
    assert r.smooth and r.complete and r.rays_primitive and r.projective


def test_missing_cone_breaks_completeness():
    f = p4()
    r = validate(Fan("P4-minus", f.rays, f.max_cones[1:]))
    assert r.smooth and not r.complete and not r.valid


def test_non_unimodular_cone():
    rays = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (-1, 0, 0, 2), (-1, -1, -1, -1))
    r = validate(Fan("bad", rays, tuple(combinations(range(5), 4))))
    assert not r.smooth


def test_non_primitive_ray():
    rays = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 2), (-1, -1, -1, -1))
    assert not validate(Fan("bad", rays, tuple(combinations(range(5), 4)))).rays_primitive


def test_malformed_input():
    rays = p4().rays
    with pytest.raises(MalformedFan):
        Fan("dup", rays[:4] + (rays[0],), ((0, 1, 2, 3),))
    with pytest.raises(MalformedFan):
        Fan("range", rays, ((0, 1, 2, 7),))
    with pytest.raises(MalformedFan):
        Fan("repeat", rays, ((0, 1, 1, 2),))
    with pytest.raises(ValueError):
        Fan("short", ((1, 0, 0),), ())


def test_report_lines():
    text = str(validate(p4()))
    assert text.splitlines() == ["smooth: True", "complete: True",
                                 "rays_primitive: True", "projective: True"]


def test_cone_exists(fans):
    assert cone_exists(p4(), (0, 1))
    assert not cone_exists(p4(), (0, 1, 2, 3, 4))
    assert not cone_exists(fans["L12"], (0, 7))


def test_primitive_collections_examples(fans):
    assert primitive_collections(p4()) == ((0, 1, 2, 3, 4),)
    assert primitive_collections(fans["L12"]) == ((0, 7), (1, 2), (3, 4), (5, 6))
    expect = sorted([d(3, 4, 5), d(4, 5, 7), d(7, 8), d(3, 6), d(6, 8), d(1, 2)])
    for label in ("I4", "I6", "I12", "I15"):
        assert list(primitive_collections(fans[label])) == expect


def test_primitive_relation_examples(fans):
    l12 = fans["L12"]
    assert primitive_relation(l12, d(2, 3)).rhs == ((0, 1),)
    assert primitive_relation(l12, d(1, 8)).rhs == ()
    assert primitive_relation(l12, d(2, 3)).format() == "x2+x3=x1"
    bl = fans["P4-blowup-point"]
    r = primitive_relation(bl, (0, 1, 2, 3))
    assert r.rhs == ((5, 1),) and bl.rays[5] == (1, 1, 1, 1)
    assert r.degree == 3


def test_l12_reconstruction():
    f = L12_PRESENTATION.build("L12")
    x = f.rays
    neg = lattice.scale(-1, x[0])
    assert (x[0], x[1], x[3], x[5]) == ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))
    assert x[7] == neg
    assert x[2] == tuple(a - b for a, b in zip(x[0], x[1]))
    assert x[4] == tuple(-a - b for a, b in zip(x[0], x[3]))
    assert x[6] == tuple(a - b for a, b in zip(x[3], x[5]))
    assert len(f.max_cones) == 16


def test_g1_reconstruction():
    f = g1_presentation(1).build("G1")
    x = f.rays
    e = [x[0], x[1], x[3], x[4]]
    assert e == [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)]
    assert x[6] == (-1, 0, 0, 0)
    assert x[2] == (1, -1, -1, 0)
    assert x[5] == (2, 0, -1, -1)
    # x2 + x3 + x4 = a x1
    assert lattice.add(lattice.add(x[1], x[2]), x[3]) == x[0]


def test_presentation_errors():
    with pytest.raises(UnderdeterminedRays):
        fan_from_primitive_data(8, (0, 1, 3, 5), [rel([1, 8]), rel([2, 3], {1: 1}),
                                                  rel([4, 5], {8: 1})])
    with pytest.raises(UnderdeterminedRays):
        fan_from_primitive_data(5, (0, 1, 1, 2), [rel([1, 2, 3, 4, 5])])
    with pytest.raises(InconsistentRelations):
        fan_from_primitive_data(8, (0, 1, 3, 5), list(L12_PRESENTATION.relations)
                                + [rel([1, 2], {3: 1})])
    with pytest.raises(ValidationFailed):
        fan_from_primitive_data(5, (0, 1, 2, 3), [rel([1, 2, 3, 5])])
    with pytest.raises(CollectionMismatch):
        fan_from_primitive_data(6, (0, 1, 2, 3), [rel([1, 2, 3, 4], {6: 1}), rel([5, 6]),
                                                  rel([1, 2, 3, 4, 5])])


def test_star_subdivision_of_p4():
    f = star_subdivision(p4(), (0, 1))
    assert f.n == 6 and f.rays[5] == (1, 1, 0, 0)
    assert len(f.max_cones) == 8
    assert validate(f).valid


def test_subdividing_a_non_cone(fans):
    with pytest.raises(NotACone):
        star_subdivision(fans["L12"], (0, 7))


def test_p1_factor_examples(fans):
    for label in ("L5", "L5(a=2)", "L5(a=3)"):
        assert detect_p1_factor(fans[label]).pair == d(1, 8)
    assert detect_p1_factor(p4()) is None
    assert detect_p1_factor(build_fa_bundle(0, 0, 2)).pair == d(4, 5)


def test_p2_times_f0_has_two_p1_factors():
    f = build_fa_bundle(0, 0, 0)
    assert primitive_collections(f) == (d(1, 2, 3), d(4, 5), d(6, 7))
    pairs = [p.pair for p in p1_factors(f)]
    assert pairs == [d(4, 5), d(6, 7)]


def test_p1_bundle_is_not_a_product():
    # x4 + x5 = x6 when a = 1, so the fibre pair is not opposite
    f = build_fa_bundle(1, 1, 0)
    assert all(p.pair != d(4, 5) for p in p1_factors(f))


# -- properties over the whole catalog -------------------------------------

@given(catalog_fans)
@settings(max_examples=60, deadline=None)
def test_faces_are_collection_free(fan):
    pcs = [frozenset(p) for p in primitive_collections(fan)]
    for s in combinations(range(fan.n), 4):
        free = not any(p <= frozenset(s) for p in pcs)
        assert cone_exists(fan, s) == free


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.type_label)
def test_primitive_relations_sum_exactly(entry):
    fan = entry.fan
    for pc in primitive_collections(fan):
        r = primitive_relation(fan, pc)
        left = [sum(fan.rays[i][k] for i in r.lhs) for k in range(4)]
        right = [sum(c * fan.rays[i][k] for i, c in r.rhs) for k in range(4)]
        assert left == right
        assert all(c > 0 for _, c in r.rhs)
        assert cone_exists(fan, [i for i, _ in r.rhs])


@given(catalog_fans, st.data())
@settings(max_examples=60, deadline=None)
def test_subdivision_counts(fan, data):
    two_cones = [c for c in combinations(range(fan.n), 2) if cone_exists(fan, c)]
    c = data.draw(st.sampled_from(two_cones))
    fine = star_subdivision(fan, c)
    containing = sum(1 for m in fan.max_cones if set(c) <= set(m))
    assert fine.n == fan.n + 1
    assert len(fine.max_cones) == len(fan.max_cones) + containing
    assert validate(fine).valid


@pytest.mark.parametrize("entry", [e for e in CATALOG if e.presentation],
                         ids=lambda e: e.type_label)
def test_presentation_round_trip(entry):
    given_rels = sorted(entry.presentation.relations, key=lambda r: r.lhs)
    got = [primitive_relation(entry.fan, pc) for pc in primitive_collections(entry.fan)]
    assert got == given_rels


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.type_label)
def test_p1_factor_certificate(entry):
    fan = entry.fan
    for f in p1_factors(fan):
        i, j = f.pair
        assert lattice.add(fan.rays[i], fan.rays[j]) == (0, 0, 0, 0)
        assert all(len({i, j} & set(c)) == 1 for c in fan.max_cones)
        assert lattice.pairing(f.splitting, fan.rays[i]) == 1
        assert all(lattice.pairing(f.splitting, fan.rays[k]) == 0 for k in f.complement)


def test_l5_presentations_differ_in_parameter():
    assert l5_presentation(1).build().rays != l5_presentation(2).build().rays
