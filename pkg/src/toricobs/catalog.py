"""Built-in fans: parametric families, primitive-relation presentations and
products of projective spaces and del Pezzo surfaces.

Family coordinates and presentations are transcribed with 1-based labels
x1..xn in mind; the code stores 0-based indices.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product as iproduct
from typing import Sequence

from .fan import (Fan, PrimitiveRelation, ValidationFailed, cones_avoiding,
                  fan_from_primitive_data, require_valid)


@dataclass(frozen=True)
class Presentation:
    """A fan given by a basis of N and its primitive relations."""
    n: int
    basis: tuple[int, ...]
    relations: tuple[PrimitiveRelation, ...]

    def build(self, name: str = "") -> Fan:
        return fan_from_primitive_data(self.n, self.basis, self.relations, name)


@dataclass(frozen=True)
class CatalogEntry:
    type_label: str
    fan: Fan
    provenance: str
    presentation: Presentation | None = None
    chow_hint: tuple[tuple[int, int], ...] | None = None


def rel(lhs: Sequence[int], rhs: dict[int, int] | None = None) -> PrimitiveRelation:
    """Primitive relation from 1-based labels: rel([2, 3], {1: 1}) is x2+x3=x1."""
    rhs = rhs or {}
    return PrimitiveRelation(tuple(sorted(i - 1 for i in lhs)),
                             tuple(sorted((i - 1, c) for i, c in rhs.items() if c)))


def _explicit(name: str, rays, collections_1based) -> Fan:
    cols = [[i - 1 for i in c] for c in collections_1based]
    try:
        fan = Fan(name, tuple(tuple(r) for r in rays), tuple(cones_avoiding(len(rays), cols)))
    except ValueError as exc:
        raise ValidationFailed(f"{name}: {exc}") from exc
    require_valid(fan)
    return fan


def build_fa_bundle(a: int, s: int, t: int, name: str | None = None) -> Fan:
    """F_a-bundle over P^2 with x3 = (-1,-1,s,t) and x5 = (0,0,-1,a)."""
    rays = [(1, 0, 0, 0), (0, 1, 0, 0), (-1, -1, s, t), (0, 0, 1, 0),
            (0, 0, -1, a), (0, 0, 0, 1), (0, 0, 0, -1)]
    return _explicit(name or f"F{a}-bundle(s={s},t={t})", rays, [[1, 2, 3], [4, 5], [6, 7]])


def _family_i(a, b, c):
    rays = [(1, 0, 0, 0), (-1, b, 0, c), (0, 1, 0, 0), (0, 0, 1, 0),
            (0, -1, -1, a + 1), (0, 0, 0, -1), (0, 1, 0, -1), (0, 0, 0, 1)]
    cols = [[3, 4, 5], [4, 5, 7], [7, 8], [3, 6], [6, 8], [1, 2]]
    return rays, cols


def _family_l(a, b, c, d):
    rays = [(0, 1, 0, 0), (-1, 1, 0, 0), (1, 0, 0, 0), (0, 0, 1, 0),
            (a, b, -1, 0), (0, 0, 0, 1), (c, d, 0, -1), (0, -1, 0, 0)]
    cols = [[1, 8], [2, 3], [4, 5], [6, 7]]
    return rays, cols


def _family_m(a, b, c):
    # Eight rays: the collections below involve x8 = (-1,0,0,0).
    rays = [(1, 0, 0, 0), (0, 1, 0, 0), (-1, -1, 1, 1), (0, 0, 1, 0),
            (a, 0, -1, 0), (0, 0, 0, 1), (a * c + b, 0, -c, -1), (-1, 0, 0, 0)]
    cols = [[1, 8], [1, 2, 3], [4, 6, 8], [4, 5], [6, 7], [2, 3, 5], [2, 3, 7]]
    return rays, cols


_FAMILIES = {"I": _family_i, "L": _family_l, "M": _family_m}


def build_family(family: str, *params: int, name: str | None = None) -> Fan:
    """Fan of the I, L or M family for the given integer parameters.

    I takes (a, b, c), L takes (a, b, c, d), M takes (a, b, c).
    Raises ValidationFailed if the parameters do not give a smooth complete fan.
    """
    try:
        maker = _FAMILIES[family.upper()]
    except KeyError:
        raise ValueError(f"unknown family {family!r}; expected one of I, L, M") from None
    rays, cols = maker(*params)
    return _explicit(name or f"{family.upper()}{tuple(params)}", rays, cols)


def g1_presentation(a: int = 1) -> Presentation:
    return Presentation(7, (0, 1, 3, 4), (
        rel([1, 7]),
        rel([2, 3, 4], {1: a}),
        rel([4, 5, 6], {1: a + 1}),
        rel([5, 6, 7], {2: 1, 3: 1}),
        rel([1, 2, 3], {5: 1, 6: 1}),
    ))


def l5_presentation(a: int = 1) -> Presentation:
    return Presentation(8, (0, 1, 3, 5), (
        rel([1, 8]),
        rel([2, 3]),
        rel([4, 5], {3: a}),
        rel([6, 7], {3: a}),
    ))


J2_PRESENTATION = Presentation(8, (0, 1, 3, 4), (
    rel([3, 6], {7: 1}),
    rel([1, 2, 8], {4: 1, 5: 1}),
    rel([4, 5, 6], {1: 1, 2: 1}),
    rel([7, 8], {3: 1}),
    rel([6, 8]),
    rel([3, 4, 5], {8: 1}),
    rel([4, 5, 7]),
    rel([1, 2, 3]),
    rel([1, 2, 7], {6: 1}),
))

L12_PRESENTATION = Presentation(8, (0, 1, 3, 5), (
    rel([1, 8]),
    rel([2, 3], {1: 1}),
    rel([4, 5], {8: 1}),
    rel([6, 7], {4: 1}),
))

# D3D5, D3D7, D3D8, D5D7, D5D8, D7D8: the coordinates used for the
# hand computation of the L12 class
L12_CHOW_HINT = ((2, 4), (2, 6), (2, 7), (4, 6), (4, 7), (6, 7))

M5_PRESENTATION = Presentation(8, (0, 1, 3, 5), (
    rel([1, 8], {5: 1}),
    rel([4, 5], {7: 1}),
    rel([6, 7], {1: 1}),
    rel([1, 2, 3], {6: 1}),
    rel([2, 3, 5], {6: 1, 8: 1}),
    rel([2, 3, 7]),
    rel([4, 6, 8]),
))

# (a, s, t) for the F_a-bundle types
D_TYPES = {
    "D1": (1, 0, 2), "D2": (1, 2, 0), "D3": (1, 1, 1), "D5": (0, 2, 0),
    "D6": (1, 0, 1), "D8": (1, 1, 0), "D9": (0, 1, 1), "D12": (0, 1, 0),
    "D16": (1, 1, -1),
}
I_TYPES = {"I4": (1, 1, -1), "I6": (0, 1, 0), "I12": (0, 0, -1), "I15": (1, 0, -1)}
L_TYPES = {"L1": (0, 1, 0, 1), "L2": (1, 0, 1, 0), "L10": (1, 0, -1, 1)}
M_TYPES = {"M1": (0, 0, 0), "M2": (1, 1, 0), "M3": (1, 0, 1), "M4": (1, 0, 0)}


# -- low-dimensional pieces for product fans -------------------------------

@dataclass(frozen=True)
class SmallFan:
    """A complete smooth fan of dimension < 4, only used to build products."""
    name: str
    rays: tuple[tuple[int, ...], ...]
    cones: tuple[tuple[int, ...], ...]


def projective_space(d: int) -> SmallFan:
    rays = [tuple(int(i == j) for j in range(d)) for i in range(d)]
    rays.append(tuple(-1 for _ in range(d)))
    return SmallFan(f"P{d}", tuple(rays), tuple(combinations(range(d + 1), d)))


def polygon(name: str, rays) -> SmallFan:
    """Complete 2-dimensional fan from rays listed in cyclic order."""
    k = len(rays)
    return SmallFan(name, tuple(tuple(r) for r in rays),
                    tuple(tuple(sorted((i, (i + 1) % k))) for i in range(k)))


DEL_PEZZO = {
    "P2": projective_space(2),
    "P1xP1": polygon("P1xP1", [(1, 0), (0, 1), (-1, 0), (0, -1)]),
    "S8": polygon("S8", [(1, 0), (1, 1), (0, 1), (-1, -1)]),
    "S7": polygon("S7", [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1)]),
    "S6": polygon("S6", [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)]),
}


def product(*factors: SmallFan, name: str | None = None) -> Fan:
    dims = [len(f.rays[0]) for f in factors]
    if sum(dims) != 4:
        raise ValueError("factor dimensions must add up to 4")
    rays = []
    offsets = []
    shift = 0
    for f, d in zip(factors, dims):
        offsets.append(len(rays))
        for r in f.rays:
            v = [0, 0, 0, 0]
            v[shift:shift + d] = r
            rays.append(tuple(v))
        shift += d
    cones = []
    for combo in iproduct(*[f.cones for f in factors]):
        cones.append(tuple(sorted(off + i for off, c in zip(offsets, combo) for i in c)))
    fan = Fan(name or "x".join(f.name for f in factors), tuple(rays), tuple(cones))
    require_valid(fan)
    return fan


def p4() -> Fan:
    rays = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (-1, -1, -1, -1))
    return Fan("P4", rays, tuple(combinations(range(5), 4)))


def blowup_p4_point() -> Fan:
    """P^4 blown up at a T-fixed point: x6 = x1+x2+x3+x4 subdivides a 4-cone."""
    rays = [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1),
            (-1, -1, -1, -1), (1, 1, 1, 1)]
    return _explicit("P4-blowup-point", rays, [[1, 2, 3, 4], [5, 6]])


def _dp_products() -> list[tuple[str, Fan]]:
    names = list(DEL_PEZZO)
    out = []
    for i, a in enumerate(names):
        for b in names[i:]:
            label = f"{a}x{b}"
            out.append((label, product(DEL_PEZZO[a], DEL_PEZZO[b], name=label)))
    return out


def builtin_catalog() -> list[CatalogEntry]:
    """Every fan with explicit data, validated at load, sorted by label."""
    return list(_load_catalog())


@lru_cache(maxsize=1)
def _load_catalog() -> tuple[CatalogEntry, ...]:
    entries: list[CatalogEntry] = []

    def add(lbl, fan, prov, pres=None, hint=None):
        entries.append(CatalogEntry(lbl, fan, prov, pres, hint))

    def add_pres(lbl, pres, prov, hint=None):
        add(lbl, pres.build(lbl), prov, pres, hint)

    for a in (1, 2, 3):
        lbl = "G1" if a == 1 else f"G1(a={a})"
        add_pres(lbl, g1_presentation(a), "primitive relations, G-type example family")
        lbl = "L5" if a == 1 else f"L5(a={a})"
        add_pres(lbl, l5_presentation(a), "primitive relations, L5-type example family")
    for lbl, (a, s, t) in D_TYPES.items():
        add(lbl, build_fa_bundle(a, s, t, name=lbl), f"F_a-bundle a={a} s={s} t={t}")
    for lbl, params in I_TYPES.items():
        add(lbl, build_family("I", *params, name=lbl), f"I family {params}")
    add_pres("J2", J2_PRESENTATION, "primitive relations")
    for lbl, params in L_TYPES.items():
        add(lbl, build_family("L", *params, name=lbl), f"L family {params}")
    add_pres("L12", L12_PRESENTATION, "primitive relations", L12_CHOW_HINT)
    for lbl, params in M_TYPES.items():
        add(lbl, build_family("M", *params, name=lbl), f"M family {params}")
    add_pres("M5", M5_PRESENTATION, "primitive relations")
    add("P4", p4(), "projective space")
    add("P1xP3", product(projective_space(1), projective_space(3), name="P1xP3"), "product")
    for lbl, fan in _dp_products():
        add(lbl, fan, "product of toric del Pezzo surfaces")
    add("P4-blowup-point", blowup_p4_point(), "synthetic point blow-up")

    labels = [e.type_label for e in entries]
    assert len(set(labels)) == len(labels)
    return tuple(sorted(entries, key=lambda e: e.type_label))


def catalog_by_label() -> dict[str, Fan]:
    return {e.type_label: e.fan for e in builtin_catalog()}
