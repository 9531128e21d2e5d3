from itertools import combinations

import pytest

from toricobs.blowup import CycleDetected, Edge, blowup_edges, is_2blowup, propagate
from toricobs.catalog import builtin_catalog, p4
from toricobs.fan import Fan, cone_exists, star_subdivision, validate
from toricobs.obstruction import Mode, Status, Verdict, certify
from toricobs.replay import replay

CATALOG = builtin_catalog()


def two_cones(fan):
    return [c for c in combinations(range(fan.n), 2) if cone_exists(fan, c)]


def unknown(name):
    return Verdict(name, Mode.FINITE, Status.INCONCLUSIVE, None, {})


def chain(fan, length):
    out = [fan]
    for k in range(length):
        f = out[-1]
        out.append(star_subdivision(f, two_cones(f)[k % 3], name=f"{fan.name}-b{k + 1}"))
    return out


@pytest.mark.parametrize("entry", CATALOG, ids=lambda e: e.type_label)
def test_round_trip_every_two_cone(entry):
    fan = entry.fan
    for c in two_cones(fan):
        fine = star_subdivision(fan, c)
        b = is_2blowup(fine, fan)
        assert b is not None and b.center == c
        assert b.new_ray == fan.n


def test_detection_ignores_ray_order():
    fine = star_subdivision(p4(), (0, 1))
    perm = [5, 3, 0, 4, 1, 2]
    where = {old: new for new, old in enumerate(perm)}
    shuffled = Fan("shuffled", tuple(fine.rays[i] for i in perm),
                          tuple(tuple(where[i] for i in c) for c in fine.max_cones))
    assert validate(shuffled).valid
    assert is_2blowup(shuffled, p4()).center == (0, 1)


def test_non_examples():
    assert is_2blowup(p4(), p4()) is None
    bl = star_subdivision(p4(), (0, 1))
    assert is_2blowup(p4(), bl) is None
    # two successive blow-ups are not one
    assert is_2blowup(star_subdivision(bl, (2, 3)), p4()) is None
    # same ray count as a blow-up, but the new ray is a point blow-up of a 4-cone
    fake = Fan("fake", p4().rays + ((1, 1, 1, 1),), (
        (0, 1, 2, 5), (0, 1, 3, 5), (0, 2, 3, 5), (1, 2, 3, 5),
        (0, 1, 2, 4), (0, 1, 3, 4), (0, 2, 3, 4), (1, 2, 3, 4)))
    assert validate(fake).valid
    assert is_2blowup(fake, p4()) is None


def test_edges():
    bl = star_subdivision(p4(), (0, 1), name="P4b")
    assert blowup_edges([p4(), bl]) == [Edge("P4b", "P4", (0, 1))]
    assert blowup_edges([p4()]) == []
    with pytest.raises(ValueError):
        blowup_edges([p4(), p4()])


def test_edges_for_catalog_blowups():
    base = [e.fan for e in CATALOG if e.type_label in ("G1", "J2", "L12", "M5")]
    extra = [star_subdivision(f, two_cones(f)[0], name=f.name + "+") for f in base]
    edges = blowup_edges(base + extra)
    assert {(e.fine, e.coarse) for e in edges} >= {(f.name + "+", f.name) for f in base}


def test_chain_of_three_inherits(fans):
    fs = chain(fans["G1"], 3)
    names = [f.name for f in fs]
    seeds = {names[0]: certify(fs[0], Mode.FINITE)}
    seeds.update({n: unknown(n) for n in names[1:]})
    out = propagate(fs, blowup_edges(fs), seeds)
    last = out[names[-1]]
    assert last.status == Status.NO_FINITE_MORPHISM
    assert last.propagated_from == names
    assert "Propagated" in last.tags
    replay(last.certificate)


def test_inconclusive_seeds_stay_inconclusive():
    fs = chain(p4(), 2)
    out = propagate(fs, blowup_edges(fs), {f.name: unknown(f.name) for f in fs})
    assert all(v.status == Status.INCONCLUSIVE for v in out.values())


def test_embedding_verdict_is_not_propagated(fans):
    l12 = fans["L12"]
    fine = star_subdivision(l12, two_cones(l12)[0], name="L12+")
    seeds = {"L12": certify(l12, Mode.EMBEDDING)}
    assert seeds["L12"].status == Status.NO_EMBEDDING
    out = propagate([l12, fine], blowup_edges([l12, fine]), seeds)
    assert "L12+" not in out
    assert "NonPropagable" in out["L12"].tags


def test_own_verdict_is_kept(fans):
    fs = chain(fans["G1"], 1)
    seeds = {f.name: certify(f) for f in fs}
    out = propagate(fs, blowup_edges(fs), seeds)
    for f in fs:
        if seeds[f.name].status == Status.NO_FINITE_MORPHISM:
            assert out[f.name].propagated_from is None


def test_cycle_detected():
    a, b = p4(), star_subdivision(p4(), (0, 1), name="P4b")
    with pytest.raises(CycleDetected):
        propagate([a, b], [Edge("P4b", "P4", (0, 1)), Edge("P4", "P4b", (0, 1))], {})


def test_unknown_edge_endpoint():
    with pytest.raises(ValueError):
        propagate([p4()], [Edge("nope", "P4", (0, 1))], {})
