"""Independent certificate checker.

Re-derives every claim of a certificate from the fan data stored in it.
Nothing here calls the engine: matrices go through sympy, and degree-4
intersection numbers come from torus localization

    D_i D_j D_k D_l = sum over maximal cones s of
        prod_t w_s(i_t) / prod_{r in s} w_s(r),

where w_s(r) = <m_{s,r}, v> for the dual basis m_{s,.} of s, the factor for
i_t is zero when i_t is not in s, and v is a generic vector.
"""
from __future__ import annotations

import random
from collections import Counter, defaultdict
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from math import gcd, prod

import sympy
from sympy.matrices.normalforms import smith_normal_form


class ReplayError(Exception):
    """A certificate claim failed to check."""


def _need(cond, msg):
    if not cond:
        raise ReplayError(msg)


class FanData:
    """Plain fan data with the few facts the checker needs."""

    def __init__(self, d: dict):
        self.name = d.get("name", "")
        self.rays = [tuple(int(x) for x in r) for r in d["rays"]]
        self.cones = [tuple(sorted(int(i) for i in c)) for c in d["max_cones"]]
        self.n = len(self.rays)
        self._duals = {}
        self._weights = None

    def in_cone(self, idx) -> bool:
        s = set(idx)
        return any(s <= set(c) for c in self.cones)

    def dual(self, cone):
        if cone not in self._duals:
            inv = sympy.Matrix([self.rays[i] for i in cone]).T.inv()
            # row r of the inverse pairs to delta with the cone's rays
            self._duals[cone] = [[int(inv[r, c]) for c in range(4)] for r in range(4)]
        return self._duals[cone]

    def check(self):
        _need(len(set(self.rays)) == self.n, "repeated ray")
        for r in self.rays:
            _need(len(r) == 4 and gcd(*r) == 1, f"ray {r} is not primitive")
        used = set()
        walls = defaultdict(list)
        for c in self.cones:
            _need(len(set(c)) == 4 and all(0 <= i < self.n for i in c), f"bad cone {c}")
            _need(abs(sympy.Matrix([self.rays[i] for i in c]).det()) == 1,
                  f"cone {c} is not unimodular")
            used.update(c)
            for w in combinations(c, 3):
                walls[w].append(c)
        _need(used == set(range(self.n)), "unused ray")
        for w, cs in walls.items():
            _need(len(cs) == 2, f"face {w} lies in {len(cs)} cones")
            a, b = cs
            u = (set(a) - set(w)).pop()
            v = (set(b) - set(w)).pop()
            normal = sympy.Matrix([self.rays[i] for i in w]).nullspace()[0]
            su = sum(normal[t] * self.rays[u][t] for t in range(4))
            sv = sum(normal[t] * self.rays[v][t] for t in range(4))
            _need(su * sv < 0, f"cones across face {w} overlap")
        # a generic point lies in exactly one cone
        rng = random.Random(7)
        p = [rng.randint(10**6, 10**7) * rng.choice((-1, 1)) for _ in range(4)]
        hits = sum(1 for c in self.cones
                   if all(sum(m[t] * p[t] for t in range(4)) > 0 for m in self.dual(c)))
        _need(hits == 1, f"generic point covered {hits} times")

    def _cone_weights(self):
        if self._weights is None:
            rng = random.Random(11)
            while True:
                v = [rng.randint(-97, 97) for _ in range(4)]
                ws = []
                for c in self.cones:
                    w = {i: sum(m[t] * v[t] for t in range(4)) for i, m in zip(c, self.dual(c))}
                    if 0 in w.values():
                        break
                    ws.append((c, w, prod(w.values())))
                else:
                    self._weights = ws
                    break
        return self._weights

    def degree(self, idx) -> Fraction:
        total = Fraction(0)
        for c, w, den in self._cone_weights():
            if all(i in w for i in idx):
                total += Fraction(prod(w[i] for i in idx), den)
        return total


def _pairs(n):
    return list(combinations_with_replacement(range(n), 2))


def _connected(vertices, edges) -> bool:
    vertices = list(vertices)
    if not vertices:
        return False
    adj = defaultdict(set)
    for i, j in edges:
        if i in vertices and j in vertices:
            adj[i].add(j)
            adj[j].add(i)
    seen = {vertices[0]}
    stack = [vertices[0]]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return seen == set(vertices)


def _pair(p):
    i, j = (int(x) for x in p)
    return (i, j) if i <= j else (j, i)


def _check_ample(fan: FanData, a):
    _need(a is not None and len(a) == fan.n, "missing ample witness")
    walls = defaultdict(list)
    for c in fan.cones:
        for w in combinations(c, 3):
            walls[w].append(c)
    for w, (s1, s2) in walls.items():
        u = (set(s1) - set(w)).pop()
        v = (set(s2) - set(w)).pop()
        target = [fan.rays[u][t] + fan.rays[v][t] for t in range(4)]
        coeffs = {k: sum(m[t] * target[t] for t in range(4)) for k, m in zip(s1, fan.dual(s1))}
        _need(coeffs[u] == 0, f"wall {w}: x_u + x_v not in its span")
        val = a[u] + a[v] - sum(coeffs[k] * a[k] for k in w)
        _need(val > 0, f"ample witness fails on wall {w}")


def _check_step(fan: FanData, step: dict, zeros: set, chow_ok: bool) -> list:
    rule = step["rule"]
    concl = [_pair(p) for p in step["concludes"]]
    if rule == "DisjointDivisors":
        i, j = step["collection"]
        _need(i != j and not fan.in_cone((i, j)), f"x{i+1},x{j+1} span a cone")
        _need(concl == [_pair((i, j))], "DisjointDivisors conclusion")
    elif rule == "RelationRule":
        piv = int(step["pivot"])
        m = [int(x) for x in step["m"]]
        rel = [int(x) for x in step["relation"]]
        _need(len(rel) == fan.n, "relation length")
        for k in range(fan.n):
            _need(rel[k] == sum(m[t] * fan.rays[k][t] for t in range(4)),
                  f"relation coefficient {k} does not come from m")
        dropped = set(step["discarded"])
        for k in dropped:
            _need(_pair((piv, k)) in zeros, f"discarded x{k+1} is not known to vanish")
        surv = [k for k in range(fan.n) if k not in dropped and rel[k]]
        _need(surv, "nothing survives")
        _need(all(rel[k] > 0 for k in surv) or all(rel[k] < 0 for k in surv),
              "survivors are not single-signed")
        _need(sorted(concl) == sorted(_pair((piv, k)) for k in surv), "RelationRule conclusion")
    elif rule == "Transitivity":
        i, j, k = (int(x) for x in step["via"])
        _need(_pair((i, j)) in zeros and _pair((j, k)) in zeros, "Transitivity premises")
        _need(concl == [_pair((i, k))], "Transitivity conclusion")
    elif rule == "ChowImpliedZero":
        _need(chow_ok, "Chow step outside embedding mode")
        t = _pair(step["target"])
        lam = int(step["lambda"])
        _need(lam > 0, "lambda must be positive")
        combo = Counter({t: lam})
        for p, c in step["nonneg"]:
            _need(int(c) > 0, "nonnegative multiplier is not positive")
            combo[_pair(p)] += int(c)
        for p, c in step["free"]:
            _need(_pair(p) in zeros, "free multiplier on a pair not known to vanish")
            combo[_pair(p)] += int(c)
        # zero as a class in A^2: pairs to zero with every degree-2 monomial
        for q in _pairs(fan.n):
            val = sum(c * fan.degree(p + q) for p, c in combo.items() if c)
            _need(val == 0, f"combination is nonzero against D{q[0]+1}D{q[1]+1}")
        _need(concl == [t], "ChowImpliedZero conclusion")
    else:
        raise ReplayError(f"unknown rule {rule}")
    return concl


def _pic_generated(fan: FanData, comp) -> bool:
    rest = [k for k in range(fan.n) if k not in set(comp)]
    if not rest:
        return True
    if len(rest) > 4:
        return False
    # Pic / <D_comp> is Z^rest modulo the relation rows restricted to rest
    mat = sympy.Matrix([[fan.rays[k][t] for k in rest] for t in range(4)])
    if mat.rank() < len(rest):
        return False
    snf = smith_normal_form(mat, domain=sympy.ZZ)
    diag = [abs(snf[i, i]) for i in range(min(snf.shape))]
    return all(d == 1 for d in diag if d != 0) and sum(1 for d in diag if d) == len(rest)


def _check_contradiction(fan: FanData, c: dict, zeros: set):
    kind = c["kind"]
    w = c["witness"]
    if kind == "FullGraphConnected":
        _need(_connected(range(fan.n), zeros), "zero graph is not connected")
    elif kind == "PicGeneratingComponent":
        comp = [int(x) for x in w["component"]]
        for i in comp:
            for j in comp:
                _need(_pair((i, j)) in zeros, "component is not a complete zero graph")
        _need(_pic_generated(fan, comp), "component classes do not generate Pic")
    elif kind == "P1FactorSubgraph":
        i, j = (int(x) for x in w["fibers"])
        _need(all(a == -b for a, b in zip(fan.rays[i], fan.rays[j])), "fibers not opposite")
        m = [int(x) for x in w["splitting"]]
        for k in range(fan.n):
            val = sum(m[t] * fan.rays[k][t] for t in range(4))
            want = 1 if k == i else -1 if k == j else 0
            _need(val == want, "splitting functional is wrong")
        top, bottom = set(), set()
        for cone in fan.cones:
            _need((i in cone) != (j in cone), "a cone meets the fibers twice or not at all")
            (top if i in cone else bottom).add(tuple(k for k in cone if k not in (i, j)))
        _need(top == bottom, "fan is not a product")
        rest = [k for k in range(fan.n) if k not in (i, j)]
        _need(_connected(rest, zeros), "complement is not connected")
    elif kind == "ChowClassStage":
        pairs = _pairs(fan.n)
        pm = sympy.Matrix([[fan.degree(p + q) for q in pairs] for p in pairs])
        zrows = [pairs.index(z) for z in sorted(zeros)]
        span = pm.extract(zrows, list(range(len(pairs)))).nullspace() if zrows else \
            [sympy.eye(len(pairs))[:, k] for k in range(len(pairs))]
        if span:
            basis = sympy.Matrix.hstack(*span)
            _need((basis.T * pm * basis).is_zero_matrix, "alpha^2 does not vanish")
    elif kind == "ContractionCriterion":
        lhs = [int(x) for x in w["lhs"]]
        (e, k), = [(int(a), int(b)) for a, b in w["rhs"]]
        _need(len(set(lhs)) == 4 and not fan.in_cone(lhs), "lhs spans a cone")
        _need(all(fan.in_cone(s) for s in combinations(lhs, 3)), "lhs is not minimal")
        _need(k >= 1, "coefficient must be positive")
        _need(all(sum(fan.rays[a][t] for a in lhs) == k * fan.rays[e][t] for t in range(4)),
              "relation does not hold")
    else:
        raise ReplayError(f"unknown contradiction {kind}")


def replay(cert: dict) -> None:
    """Raise ReplayError unless every claim of ``cert`` checks out."""
    if "propagated" in cert:
        return _replay_propagated(cert)
    fan = FanData(cert["fan"])
    fan.check()
    _check_ample(fan, cert.get("ample"))
    embedding = cert["mode"] == "embedding"
    zeros: set = set()
    for step in cert["steps"]:
        zeros.update(_check_step(fan, step, zeros, embedding))
    _need(zeros == {_pair(p) for p in cert["zero_set"]}, "final zero-set differs")
    status, rule = cert["status"], cert["rule"]
    if status == "Inconclusive":
        _need(rule is None, "Inconclusive with a rule")
        return
    if rule == "ContractionCriterion":
        _need(status == "NoFiniteMorphism", "status for contraction")
        _check_contradiction(fan, {"kind": rule, "witness": cert["contraction"]}, zeros)
    elif rule == "ChowClassStage":
        _need(embedding and status == "NoEmbedding", "status for Chow stage")
        _check_contradiction(fan, {"kind": rule, "witness": {}}, zeros)
    else:
        _need(status == "NoFiniteMorphism", "status for a graph contradiction")
        c = cert["contradiction"]
        _need(c is not None and c["kind"] == rule, "contradiction record")
        _check_contradiction(fan, c, zeros)


def _replay_propagated(cert: dict) -> None:
    prop = cert["propagated"]
    src = prop["source_certificate"]
    _need(src["status"] == "NoFiniteMorphism", "only finite-morphism verdicts propagate")
    _need(cert["status"] == src["status"], "propagated status differs from source")
    replay(src)
    fans = {k: FanData(v) for k, v in prop["fans"].items()}
    path = prop["path"]
    _need(path[0] == src["fan"]["name"], "path does not start at the source")
    _need(fans[path[0]].rays == FanData(src["fan"]).rays, "source fan differs")
    _need(len(prop["edges"]) == len(path) - 1, "edge count")
    for e, (coarse, fine) in zip(prop["edges"], zip(path, path[1:])):
        _need(e["coarse"] == coarse and e["fine"] == fine, "edge order")
        _check_subdivision(fans[fine], fans[coarse], tuple(e["center"]))


def _check_subdivision(fine: FanData, coarse: FanData, center):
    fine.check()
    i, j = center
    _need(coarse.in_cone((i, j)) and i != j, "center is not a 2-cone")
    new = tuple(a + b for a, b in zip(coarse.rays[i], coarse.rays[j]))
    _need(sorted(fine.rays) == sorted(coarse.rays + [new]), "rays do not match")
    pos = {r: k for k, r in enumerate(fine.rays)}
    mp = [pos[r] for r in coarse.rays]
    want = set()
    for c in coarse.cones:
        if i in c and j in c:
            for drop in (i, j):
                want.add(tuple(sorted(pos[new] if k == drop else mp[k] for k in c)))
        else:
            want.add(tuple(sorted(mp[k] for k in c)))
    _need(want == set(fine.cones), "cones are not the star subdivision")
