"""Complete nonsingular fans in N = Z^4.

A fan is given by its ray generators and its maximal cones (4-element
index sets).  Ray indices are 0-based everywhere in code and files; the
human-readable output uses the 1-based labels x_1, ..., x_n.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from . import lattice
from .exactlp import find_feasible
from .lattice import Vector


class FanError(ValueError):
    pass


class MalformedFan(FanError):
    pass


class NoContainingCone(FanError):
    pass


class NotACone(FanError):
    pass


class UnderdeterminedRays(FanError):
    pass


class InconsistentRelations(FanError):
    pass


class ValidationFailed(FanError):
    pass


class CollectionMismatch(FanError):
    pass


def label(i: int) -> str:
    return f"x{i + 1}"


@dataclass(frozen=True)
class Fan:
    name: str
    rays: tuple[Vector, ...]
    max_cones: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = tuple(lattice.as_vector(r) for r in self.rays)
        if len(set(rays)) != len(rays):
            dup = [r for r, c in Counter(rays).items() if c > 1]
            raise MalformedFan(f"duplicate ray {dup[0]}")
        n = len(rays)
        cones = []
        for c in self.max_cones:
            c = tuple(sorted(int(i) for i in c))
            if any(i < 0 or i >= n for i in c):
                raise MalformedFan(f"cone {list(c)} has an index out of range 0..{n - 1}")
            if len(set(c)) != len(c):
                raise MalformedFan(f"cone {list(c)} repeats an index")
            cones.append(c)
        object.__setattr__(self, "rays", rays)
        object.__setattr__(self, "max_cones", tuple(sorted(set(cones))))

    @property
    def n(self) -> int:
        return len(self.rays)

    @cached_property
    def faces(self) -> frozenset[frozenset[int]]:
        out = set()
        for c in self.max_cones:
            for k in range(len(c) + 1):
                out.update(frozenset(s) for s in combinations(c, k))
        return frozenset(out)

    def cone_rays(self, cone: Iterable[int]) -> list[Vector]:
        return [self.rays[i] for i in cone]

    def __repr__(self):
        return f"Fan({self.name!r}, n={self.n}, cones={len(self.max_cones)})"


@dataclass
class ValidationReport:
    smooth: bool
    complete: bool
    rays_primitive: bool
    projective: bool | None = None
    problems: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.smooth and self.complete and self.rays_primitive

    def __str__(self):
        lines = [
            f"smooth: {self.smooth}",
            f"complete: {self.complete}",
            f"rays_primitive: {self.rays_primitive}",
            f"projective: {self.projective}",
        ]
        lines += [f"problem: {p}" for p in self.problems]
        return "\n".join(lines)


def validate(fan: Fan) -> ValidationReport:
    """Check that ``fan`` is a finite complete nonsingular fan.

    Completeness is decided combinatorially: every 3-face lies in exactly two
    maximal cones, the dual graph is connected, adjacent cones lie on
    opposite sides of their common wall, and an interior point of one cone
    lies in no other cone (so the cones cover N_R exactly once).
    """
    return _validate(fan)


@lru_cache(maxsize=512)
def _validate(fan: Fan) -> ValidationReport:
    problems = []
    prim = all(lattice.is_primitive(r) for r in fan.rays)
    if not prim:
        bad = [label(i) for i, r in enumerate(fan.rays) if not lattice.is_primitive(r)]
        problems.append("non-primitive rays " + ",".join(bad))

    smooth = True
    dets = {}
    for c in fan.max_cones:
        if len(c) != 4:
            smooth = False
            problems.append(f"cone {list(c)} is not 4-dimensional simplicial")
            continue
        d = lattice.det4(*fan.cone_rays(c))
        dets[c] = d
        if abs(d) != 1:
            smooth = False
            problems.append(f"cone {list(c)} has determinant {d}")

    complete = _check_complete(fan, dets, problems)
    report = ValidationReport(smooth=smooth, complete=complete, rays_primitive=prim,
                              problems=problems)
    if report.valid:
        report.projective = is_projective(fan)
    return report


def _check_complete(fan: Fan, dets: Mapping[tuple, int], problems: list[str]) -> bool:
    if not fan.max_cones:
        problems.append("no maximal cones")
        return False
    if any(len(c) != 4 for c in fan.max_cones):
        return False
    used = set().union(*fan.max_cones)
    if len(used) != fan.n:
        problems.append("unused rays " + ",".join(label(i) for i in sorted(set(range(fan.n)) - used)))
        return False
    walls = defaultdict(list)
    for c in fan.max_cones:
        for w in combinations(c, 3):
            walls[w].append(c)
    ok = True
    for w, cs in walls.items():
        if len(cs) != 2:
            problems.append(f"face {list(w)} lies in {len(cs)} maximal cone(s)")
            ok = False
    if not ok:
        return False
    if any(d == 0 for d in dets.values()):
        problems.append("degenerate cone")
        return False

    # connectivity of the dual graph
    adj = defaultdict(set)
    for cs in walls.values():
        a, b = cs
        adj[a].add(b)
        adj[b].add(a)
    seen = {fan.max_cones[0]}
    stack = [fan.max_cones[0]]
    while stack:
        c = stack.pop()
        for d in adj[c]:
            if d not in seen:
                seen.add(d)
                stack.append(d)
    if len(seen) != len(fan.max_cones):
        problems.append("dual graph of maximal cones is disconnected")
        return False

    for w, (a, b) in walls.items():
        u = next(i for i in a if i not in w)
        v = next(i for i in b if i not in w)
        base = fan.cone_rays(w)
        su = lattice.determinant(base + [fan.rays[u]])
        sv = lattice.determinant(base + [fan.rays[v]])
        if su * sv >= 0:
            problems.append(f"cones {list(a)} and {list(b)} overlap across face {list(w)}")
            return False

    p = [sum(r[k] for r in fan.cone_rays(fan.max_cones[0])) for k in range(4)]
    hits = sum(1 for c in fan.max_cones if _in_closed_cone(fan, c, p))
    if hits != 1:
        problems.append(f"cones cover an interior point {hits} times")
        return False
    return True


def _in_closed_cone(fan: Fan, cone, v) -> bool:
    inv = lattice.inverse(fan.cone_rays(cone))
    coeffs = [sum(Fraction(v[r]) * inv[r][c] for r in range(4)) for c in range(4)]
    return all(x >= 0 for x in coeffs)


def require_valid(fan: Fan) -> None:
    rep = validate(fan)
    if not rep.valid:
        raise ValidationFailed(f"{fan.name}: " + "; ".join(rep.problems))


def wall_relations(fan: Fan) -> list[tuple[tuple[int, ...], dict[int, int]]]:
    """For every wall tau = sigma & sigma', the relation x_u + x_w = sum c_k x_k.

    Returned as (wall, {ray: coefficient of D_ray . C_tau}).
    """
    walls = defaultdict(list)
    for c in fan.max_cones:
        for w in combinations(c, 3):
            walls[w].append(c)
    out = []
    for w, cs in sorted(walls.items()):
        if len(cs) != 2:
            continue
        a, b = cs
        u = next(i for i in a if i not in w)
        v = next(i for i in b if i not in w)
        s = lattice.add(fan.rays[u], fan.rays[v])
        coeffs = lattice.express_in_basis(s, fan.cone_rays(a))
        # s has no x_u component because both cones are unimodular on the same wall
        row = {u: 1, v: 1}
        for k, ck in zip(a, coeffs):
            if k != u and ck:
                row[k] = row.get(k, 0) - ck
        out.append((w, row))
    return out


@lru_cache(maxsize=512)
def ample_witness(fan: Fan) -> tuple[int, ...] | None:
    """Integer a with sum a_i D_i ample (toric Kleiman criterion), or None.

    Ample means D . C_tau > 0 for every wall curve; this is an exact LP in a.
    """
    rows = set()
    for _, row in wall_relations(fan):
        rows.add(tuple(row.get(k, 0) for k in range(fan.n)))
    ge = [(r, 1) for r in sorted(rows)]
    a = find_feasible(fan.n, ge=ge)
    if a is None:
        return None
    return lattice.primitive_integer(a)


def is_projective(fan: Fan) -> bool:
    return ample_witness(fan) is not None


def cone_exists(fan: Fan, indices: Iterable[int]) -> bool:
    s = frozenset(indices)
    if len(s) > 4:
        return False
    return s in fan.faces


@dataclass(frozen=True)
class PrimitiveRelation:
    lhs: tuple[int, ...]
    rhs: tuple[tuple[int, int], ...]  # (ray, positive coefficient), sorted by ray

    @property
    def degree(self) -> int:
        return len(self.lhs) - sum(c for _, c in self.rhs)

    def format(self) -> str:
        left = "+".join(label(i) for i in self.lhs)
        if not self.rhs:
            return f"{left}=0"
        right = "+".join(label(i) if c == 1 else f"{c}{label(i)}" for i, c in self.rhs)
        return f"{left}={right}"


@lru_cache(maxsize=512)
def primitive_collections(fan: Fan) -> tuple[tuple[int, ...], ...]:
    """Minimal non-faces, sorted lexicographically.

    In a simplicial 4-dimensional complex any 5 rays fail to span a cone,
    so minimal non-faces have at most 5 elements.
    """
    out = []
    for k in range(2, min(fan.n, 5) + 1):
        for s in combinations(range(fan.n), k):
            if frozenset(s) in fan.faces:
                continue
            if all(frozenset(t) in fan.faces for t in combinations(s, k - 1)):
                out.append(s)
    return tuple(sorted(out))


def primitive_relation(fan: Fan, pc: Sequence[int]) -> PrimitiveRelation:
    lhs = tuple(sorted(pc))
    s = tuple(sum(fan.rays[i][k] for i in lhs) for k in range(4))
    if not any(s):
        return PrimitiveRelation(lhs, ())
    for cone in fan.max_cones:
        if lattice.det4(*fan.cone_rays(cone)) == 0:
            continue
        coeffs = lattice.express_in_basis(s, fan.cone_rays(cone))
        if all(c >= 0 for c in coeffs):
            rhs = tuple(sorted((i, c) for i, c in zip(cone, coeffs) if c > 0))
            return PrimitiveRelation(lhs, rhs)
    raise NoContainingCone(f"{fan.name}: no cone contains the sum of {list(lhs)}")


def primitive_relations(fan: Fan) -> list[PrimitiveRelation]:
    return [primitive_relation(fan, pc) for pc in primitive_collections(fan)]


def cones_avoiding(n: int, collections: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """All 4-subsets of range(n) containing none of the given collections."""
    cols = [frozenset(c) for c in collections]
    return [c for c in combinations(range(n), 4)
            if not any(p <= frozenset(c) for p in cols)]


def fan_from_primitive_data(
    n: int,
    basis: Sequence[int],
    relations: Sequence[PrimitiveRelation],
    name: str = "",
) -> Fan:
    """Rebuild a fan presented by a basis and its primitive relations.

    ``basis[k]`` is the ray sent to the k-th standard basis vector.  The
    remaining rays are solved by back-substitution through the relations;
    the maximal cones are the 4-subsets containing no left-hand side.
    """
    if len(set(basis)) != 4:
        raise UnderdeterminedRays("basis must name 4 distinct rays")
    known: dict[int, tuple[Fraction, ...]] = {}
    for k, i in enumerate(basis):
        known[i] = tuple(Fraction(int(k == j)) for j in range(4))

    def side_sum(terms):
        tot = [Fraction(0)] * 4
        for i, c in terms:
            for j in range(4):
                tot[j] += c * known[i][j]
        return tot

    for _ in range(n + 1):
        progress = False
        for rel in relations:
            lhs = [(i, 1) for i in rel.lhs]
            rhs = list(rel.rhs)
            unknown = {i for i, _ in lhs + rhs if i not in known}
            if len(unknown) != 1:
                continue
            u = unknown.pop()
            if any(i == u for i, _ in lhs):
                own = [t for t in lhs if t[0] != u]
                val = [a - b for a, b in zip(side_sum(rhs), side_sum(own))]
            else:
                c = dict(rhs)[u]
                own = [t for t in rhs if t[0] != u]
                val = [(a - b) / c for a, b in zip(side_sum(lhs), side_sum(own))]
            if any(x.denominator != 1 for x in val):
                raise InconsistentRelations(f"{label(u)} would have non-integral coordinates")
            known[u] = tuple(val)
            progress = True
        if not progress:
            break
    missing = sorted(set(range(n)) - set(known))
    if missing:
        raise UnderdeterminedRays("cannot solve " + ",".join(label(i) for i in missing))

    for rel in relations:
        lhs = side_sum([(i, 1) for i in rel.lhs])
        if lhs != side_sum(rel.rhs):
            raise InconsistentRelations(f"relation {rel.format()} fails for the solved rays")

    rays = [tuple(int(x) for x in known[i]) for i in range(n)]
    try:
        fan = Fan(name, tuple(rays), tuple(cones_avoiding(n, [r.lhs for r in relations])))
    except MalformedFan as exc:
        raise ValidationFailed(str(exc)) from exc
    require_valid(fan)
    given = sorted(tuple(sorted(r.lhs)) for r in relations)
    if list(primitive_collections(fan)) != given:
        raise CollectionMismatch(
            f"{name}: recomputed primitive collections {list(primitive_collections(fan))} "
            f"differ from the presentation {given}")
    for rel in relations:
        got = primitive_relation(fan, rel.lhs)
        if got.rhs != tuple(sorted(rel.rhs)):
            raise CollectionMismatch(f"{name}: {rel.format()} is not the primitive relation "
                                     f"(fan gives {got.format()})")
    return fan


def star_subdivision(fan: Fan, cone2: Sequence[int], name: str | None = None) -> Fan:
    """Star subdivision at a 2-dimensional cone (an equivariant 2-blow-up)."""
    i, j = sorted(cone2)
    if i == j or not cone_exists(fan, (i, j)):
        raise NotACone(f"{{{label(i)},{label(j)}}} is not a cone of {fan.name}")
    new = fan.n
    cones = []
    for c in fan.max_cones:
        if i in c and j in c:
            cones.append(tuple(new if k == i else k for k in c))
            cones.append(tuple(new if k == j else k for k in c))
        else:
            cones.append(c)
    rays = fan.rays + (lattice.add(fan.rays[i], fan.rays[j]),)
    if name is None:
        name = f"{fan.name}/({label(i)},{label(j)})"
    return Fan(name, rays, tuple(cones))


@dataclass(frozen=True)
class P1Factor:
    pair: tuple[int, int]
    complement: tuple[int, ...]
    splitting: tuple[int, ...]  # m in M with <m, x_i> = 1 and <m, x_k> = 0 off the pair


def p1_factors(fan: Fan) -> list[P1Factor]:
    """All splittings of the fan as (fan of P^1) x (3-dimensional fan)."""
    out = []
    for i, j in combinations(range(fan.n), 2):
        if lattice.add(fan.rays[i], fan.rays[j]) != (0, 0, 0, 0):
            continue
        if any((i in c) == (j in c) for c in fan.max_cones):
            continue
        top = {tuple(k for k in c if k != i) for c in fan.max_cones if i in c}
        bottom = {tuple(k for k in c if k != j) for c in fan.max_cones if j in c}
        if top != bottom:
            continue
        others = tuple(k for k in range(fan.n) if k not in (i, j))
        # Product, not merely a P^1-bundle: the other rays lie in a hyperplane
        # complementary to Z x_i.
        eqs = [(fan.rays[i], 1)] + [(fan.rays[k], 0) for k in others]
        m = _solve_integral_functional(eqs)
        if m is None:
            continue
        out.append(P1Factor((i, j), others, m))
    return out


def _solve_integral_functional(eqs) -> tuple[int, ...] | None:
    aug = [list(v) + [b] for v, b in eqs]
    red, piv = lattice.rref(aug)
    if 4 in piv:
        return None
    m = [Fraction(0)] * 4
    for row, p in zip(red, piv):
        m[p] = row[4]
    if any(x.denominator != 1 for x in m):
        return None
    return tuple(int(x) for x in m)


def detect_p1_factor(fan: Fan) -> P1Factor | None:
    fs = p1_factors(fan)
    return fs[0] if fs else None
