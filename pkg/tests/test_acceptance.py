"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (visible with ``pytest -s``, and also
through ``capsys.disabled`` under plain ``pytest``) and then asserts.
"""
import itertools
import random
import time

import pytest

from toricobs.blowup import blowup_edges, is_2blowup, propagate
from toricobs.catalog import L12_CHOW_HINT, builtin_catalog
from toricobs.chow import intersection_number, table
from toricobs.fan import cone_exists, star_subdivision
from toricobs.obstruction import (Mode, Status, Verdict, certify, chow_class_stage,
                                  initial_zeros, pair, saturate)
from toricobs.picard import basis_relations
from toricobs import lattice
from toricobs.replay import replay

from .golden import L12_CHOW_RELATIONS, cases
from .helpers import d
from .test_chow import PRODUCTS, multinomial_degree, multiprojective

CATALOG = builtin_catalog()

NFM_FANS = (["G1", "G1(a=2)", "G1(a=3)", "L5", "L5(a=2)", "L5(a=3)",
             "D1", "D2", "D3", "D5", "D6", "D8", "D9", "D12", "D16",
             "I4", "I6", "I12", "I15", "J2", "L1", "L2", "L10",
             "M1", "M2", "M3", "M4", "M5", "P4-blowup-point"])

POSITIVE_FANS = ["P4", "P1xP3", "P2xP2", "P2xS6", "P2xS7", "P2xS8", "P1xP1xP1xP1"]


def report(capsys, name, failures):
    line = f"{'PASS' if not failures else 'FAIL'}  {name}"
    if failures:
        line += ": " + "; ".join(str(f) for f in failures[:5])
    with capsys.disabled():
        print("\n" + line)
    assert not failures, failures


def two_cones(fan):
    return [c for c in itertools.combinations(range(fan.n), 2) if cone_exists(fan, c)]


def test_nfm_verdicts(capsys, fans):
    failures = []
    start = time.perf_counter()
    for label in NFM_FANS:
        t0 = time.perf_counter()
        v = certify(fans[label], Mode.FINITE)
        took = time.perf_counter() - t0
        if v.status != Status.NO_FINITE_MORPHISM:
            failures.append(f"{label}: {v.status.value}")
        if took >= 1:
            failures.append(f"{label}: {took:.2f}s")
        if label.startswith("L5") and v.rule != "P1FactorSubgraph":
            failures.append(f"{label}: rule {v.rule}")
    total = time.perf_counter() - start
    if total >= 30:
        failures.append(f"total {total:.1f}s")
    report(capsys, f"1 no finite morphism for {len(NFM_FANS)} fans ({total:.2f}s)", failures)


def test_l12_separation(capsys, entries):
    failures = []
    entry = entries["L12"]
    l12 = entry.fan
    fin = certify(l12, Mode.FINITE)
    if fin.status != Status.INCONCLUSIVE:
        failures.append(f"finite: {fin.status.value}")
    emb = certify(l12, Mode.EMBEDDING, entry.chow_hint)
    if emb.status != Status.NO_EMBEDDING or emb.rule != "ChowClassStage":
        failures.append(f"embedding: {emb.status.value} {emb.rule}")
    steps = [s for s in emb.certificate.get("steps", [])
             if s["rule"] == "ChowImpliedZero" and s["target"] == list(d(3, 5))]
    uses_square = bool(steps) and [0, 0] in [p for p, _ in steps[0]["free"] + steps[0]["nonneg"]]
    if not uses_square:
        failures.append("q(3,5)=0 is not derived from the square of D1 A")

    _, result = chow_class_stage(l12, saturate(l12, initial_zeros(l12)), L12_CHOW_HINT)
    if result is None:
        failures.append("chow stage silent")
    else:
        if result.forced_zero != [2, 4, 5]:
            failures.append(f"forced {result.forced_zero}")
        # coordinates a1..a6 on D3D5, D3D7, D3D8, D5D7, D5D8, D7D8
        expected = {d(3, 5): (0, 0, 0, 0, 1, 1), d(3, 7): (0, 0, 0, 0, 1, 0),
                    d(5, 7): (0, 0, 1, 0, 0, 0)}
        system = dict(result.system)
        for p, row in expected.items():
            if system.get(p) != row:
                failures.append(f"row {p}: {system.get(p)}")
    replay(emb.certificate)
    report(capsys, "2 L12 inconclusive for finite maps, no embedding", failures)


def test_known_positive_cases_stay_inconclusive(capsys, entries):
    failures = []
    for label in POSITIVE_FANS:
        for mode in Mode:
            v = certify(entries[label].fan, mode, entries[label].chow_hint)
            if v.status != Status.INCONCLUSIVE:
                failures.append(f"{label} {mode.value}: {v.status.value} {v.rule}")
    report(capsys, "3 inconclusive on " + ", ".join(POSITIVE_FANS), failures)


def test_multinomial_oracle(capsys):
    failures = []
    checks = 0
    start = time.perf_counter()
    for dims in PRODUCTS:
        fan, factor = multiprojective(*dims)
        for idx in itertools.combinations_with_replacement(range(fan.n), 4):
            checks += 1
            got = intersection_number(fan, idx)
            if got != multinomial_degree(dims, factor, idx):
                failures.append(f"{fan.name} {idx}: {got}")
    took = time.perf_counter() - start
    if took >= 5:
        failures.append(f"{took:.2f}s")
    report(capsys, f"4 products of projective spaces, {checks} numbers ({took:.2f}s)", failures)


def test_l12_intersection_values(capsys, fans):
    l12 = fans["L12"]
    expected = {(3, 5, 5, 8): 1, (3, 5, 5, 7): 0, (5, 5, 7, 8): 0, (3, 5, 7, 8): 1}
    failures = [f"D{k}: {intersection_number(l12, d(*k))}" for k, v in expected.items()
                if intersection_number(l12, d(*k)) != v]
    report(capsys, "5 L12 intersection numbers", failures)


def test_golden_relations(capsys, fans):
    failures = []
    golden = cases()
    for case in golden:
        got = basis_relations(case.fan, d(*case.basis))
        if got != case.relations:
            failures.append(case.label)
        for v, coeffs in case.combos:
            combined = tuple(sum(c * r[k] for c, r in zip(coeffs, got)) for k in range(case.fan.n))
            if combined != v:
                failures.append(f"{case.label} combination {v}")
    t = table(fans["L12"])
    for lhs, rhs in L12_CHOW_RELATIONS:
        for k, l in itertools.combinations_with_replacement(range(8), 2):
            if t(*d(*lhs), k, l) != sum(c * t(*d(*p), k, l) for c, p in rhs):
                failures.append(f"L12 A2 relation {lhs}")
                break
    report(capsys, f"6 divisor relations for {len(golden)} presentations", failures)


def _components_complete(state):
    return all(len(c) == 1 or state.clique_zero(c) for c in state.components())


def test_property_suites(capsys, fans):
    failures = []
    # (i) saturation on random seeds
    fan_list = [e.fan for e in CATALOG]
    for seed in range(200):
        rng = random.Random(seed)
        fan = rng.choice(fan_list)
        state = initial_zeros(fan)
        pairs = list(itertools.combinations_with_replacement(range(fan.n), 2))
        state.zero_set |= set(rng.sample(pairs, rng.randint(0, 6)))
        once = saturate(fan, state)
        if saturate(fan, once).zero_set != once.zero_set:
            failures.append(f"seed {seed}: not idempotent")
        if not _components_complete(once):
            failures.append(f"seed {seed}: incomplete component")

    # (ii) linear equivalence kills every intersection number
    for fan in fan_list:
        t = table(fan)
        for m in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
            coef = [lattice.pairing(m, x) for x in fan.rays]
            for j, k, l in itertools.combinations_with_replacement(range(fan.n), 3):
                if sum(c * t(i, j, k, l) for i, c in enumerate(coef) if c):
                    failures.append(f"{fan.name}: m={m} ({j},{k},{l})")

    # (iii) subdividing any 2-cone is detected as that blow-up
    for fan in fan_list:
        for c in two_cones(fan):
            b = is_2blowup(star_subdivision(fan, c), fan)
            if b is None or b.center != c:
                failures.append(f"{fan.name}: blow-up at {c} not detected")

    # (iv) chains inherit; a no-embedding verdict does not spread
    chain = [fans["G1"]]
    for k in range(3):
        f = chain[-1]
        chain.append(star_subdivision(f, two_cones(f)[k], name=f"G1-b{k + 1}"))
    names = [f.name for f in chain]
    seeds = {names[0]: certify(chain[0])}
    seeds.update({n: Verdict(n, Mode.FINITE, Status.INCONCLUSIVE, None, {}) for n in names[1:]})
    out = propagate(chain, blowup_edges(chain), seeds)
    if out[names[-1]].status != Status.NO_FINITE_MORPHISM or out[names[-1]].propagated_from != names:
        failures.append("chain of three did not inherit")
    l12 = fans["L12"]
    fine = star_subdivision(l12, two_cones(l12)[0], name="L12-b")
    held = propagate([l12, fine], blowup_edges([l12, fine]),
                     {"L12": certify(l12, Mode.EMBEDDING, L12_CHOW_HINT)})
    if "L12-b" in held or "NonPropagable" not in held["L12"].tags:
        failures.append("no-embedding verdict propagated")
    report(capsys, "7 saturation, annihilation, blow-up round trip, propagation", failures)


def test_certificates_replay(capsys, fans):
    failures = []
    count = 0
    for e in CATALOG:
        for mode in Mode:
            cert = certify(e.fan, mode, e.chow_hint).certificate
            count += 1
            try:
                replay(cert)
            except Exception as exc:
                failures.append(f"{e.type_label} {mode.value}: {exc}")
    chain = [fans["L5"]]
    for k in range(3):
        f = chain[-1]
        chain.append(star_subdivision(f, two_cones(f)[k], name=f"L5-b{k + 1}"))
    seeds = {f.name: Verdict(f.name, Mode.FINITE, Status.INCONCLUSIVE, None, {}) for f in chain[1:]}
    seeds[chain[0].name] = certify(chain[0])
    for name, v in propagate(chain, blowup_edges(chain), seeds).items():
        if v.propagated_from:
            count += 1
            try:
                replay(v.certificate)
            except Exception as exc:
                failures.append(f"{name} propagated: {exc}")
    report(capsys, f"8 {count} certificates replay", failures)
