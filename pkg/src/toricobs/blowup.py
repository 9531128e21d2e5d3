"""2-blow-up detection between fans and propagation of verdicts.

Blowing up a torus-invariant surface is a star subdivision at a 2-cone.  If
the coarse variety admits no totally nondegenerate finite morphism from an
abelian surface, neither does the blow-up: compose with the blow-down.  No
such argument is available for embeddings, so embedding-only verdicts are
never propagated.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from graphlib import CycleError, TopologicalSorter
from typing import Mapping, Sequence

from . import lattice
from .fan import Fan, cone_exists
from .obstruction import Status, Verdict, fan_json


class CycleDetected(ValueError):
    """The blow-up edges contain a directed cycle."""


@dataclass(frozen=True)
class Blowup:
    center: tuple[int, int]           # in coarse indices
    ray_map: tuple[int, ...]          # coarse index -> fine index
    new_ray: int                      # fine index of x_i + x_j


@dataclass(frozen=True)
class Edge:
    fine: str
    coarse: str
    center: tuple[int, int]


def is_2blowup(fine: Fan, coarse: Fan) -> Blowup | None:
    """The 2-cone of ``coarse`` whose star subdivision is ``fine``, if any.

    Rays are matched by coordinates, so the two fans must be written in the
    same lattice coordinates; only the order of the rays may differ.
    """
    if fine.n != coarse.n + 1:
        return None
    where = {r: k for k, r in enumerate(fine.rays)}
    try:
        ray_map = tuple(where[r] for r in coarse.rays)
    except KeyError:
        return None
    (new,) = set(range(fine.n)) - set(ray_map)
    fine_cones = set(fine.max_cones)
    for i in range(coarse.n):
        for j in range(i + 1, coarse.n):
            if lattice.add(coarse.rays[i], coarse.rays[j]) != fine.rays[new]:
                continue
            if not cone_exists(coarse, (i, j)):
                continue
            if _subdivided(coarse, (i, j), ray_map, new) == fine_cones:
                return Blowup((i, j), ray_map, new)
    return None


def _subdivided(coarse: Fan, center, ray_map, new) -> set:
    i, j = center
    out = set()
    for c in coarse.max_cones:
        mapped = [ray_map[k] for k in c]
        if i in c and j in c:
            out.add(tuple(sorted(new if k == ray_map[i] else k for k in mapped)))
            out.add(tuple(sorted(new if k == ray_map[j] else k for k in mapped)))
        else:
            out.add(tuple(sorted(mapped)))
    return out


def blowup_edges(catalog: Sequence[Fan]) -> list[Edge]:
    """Every (fine, coarse) pair related by one 2-blow-up, sorted by names."""
    names = [f.name for f in catalog]
    if len(set(names)) != len(names):
        raise ValueError("fan names in a catalog must be unique")
    edges = []
    for fine in catalog:
        for coarse in catalog:
            if fine.n != coarse.n + 1:
                continue
            b = is_2blowup(fine, coarse)
            if b is not None:
                edges.append(Edge(fine.name, coarse.name, b.center))
    return sorted(edges, key=lambda e: (e.fine, e.coarse, e.center))


def _order(names, edges: Sequence[Edge]) -> list[str]:
    ts = TopologicalSorter({n: set() for n in names})
    for e in edges:
        ts.add(e.fine, e.coarse)
    try:
        return list(ts.static_order())
    except CycleError as exc:
        raise CycleDetected("blow-up edges form a cycle: " + " -> ".join(exc.args[1])) from None


def propagate(catalog: Sequence[Fan], edges: Sequence[Edge],
              seeds: Mapping[str, Verdict]) -> dict[str, Verdict]:
    """Push NoFiniteMorphism verdicts from coarse fans to their blow-ups.

    A fan without a conclusive seed of its own inherits from any coarse fan
    reachable through the edges; the copy is tagged ``Propagated`` and
    carries the chain of names from the source.  NoEmbedding seeds stay
    where they are, tagged ``NonPropagable``.
    """
    fans = {f.name: f for f in catalog}
    names = list(fans)
    known = set(names)
    for e in edges:
        if e.fine not in known or e.coarse not in known:
            raise ValueError(f"edge {e.fine} -> {e.coarse} names a fan outside the catalog")
    order = _order(names, edges)
    out: dict[str, Verdict] = {}
    for name, v in seeds.items():
        if v.status == Status.NO_EMBEDDING:
            v = replace(v, tags=list(v.tags) + ["NonPropagable"])
        out[name] = v
    coarser: dict[str, list[Edge]] = {}
    for e in edges:
        coarser.setdefault(e.fine, []).append(e)
    for name in order:
        current = out.get(name)
        if current is not None and current.status == Status.NO_FINITE_MORPHISM:
            continue
        for e in sorted(coarser.get(name, []), key=lambda e: e.coarse):
            src = out.get(e.coarse)
            if src is None or src.status != Status.NO_FINITE_MORPHISM:
                continue
            path = list(src.propagated_from or [e.coarse]) + [name]
            hop = {"fine": e.fine, "coarse": e.coarse, "center": list(e.center)}
            prev = src.certificate.get("propagated")
            cert = {"status": src.status.value, "rule": src.rule, "propagated": {
                "path": path,
                "edges": (prev["edges"] if prev else []) + [hop],
                "fans": {**(prev["fans"] if prev else {e.coarse: fan_json(fans[e.coarse])}),
                         name: fan_json(fans[name])},
                "source_certificate": prev["source_certificate"] if prev else src.certificate,
            }}
            out[name] = Verdict(name, src.mode, src.status, src.rule, cert,
                                propagated_from=path, tags=["Propagated"])
            break
    return out
