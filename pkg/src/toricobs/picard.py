"""Linear relations among the T-invariant prime divisors.

For m in M the principal divisor div(e(m)) is sum_i <m, x_i> D_i, so the
relations in Pic(X) = Z^n / L form the rank-4 lattice L of pairing
vectors.  Pic(X) is free of rank n - 4 for a smooth complete fan.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import lattice
from .fan import Fan, label


@dataclass(frozen=True)
class RelationLattice:
    n: int
    rows: tuple[tuple[int, ...], ...]

    def contains(self, vec: Sequence[int]) -> bool:
        c = lattice.solve_combination(self.rows, vec)
        return c is not None and all(x.denominator == 1 for x in c)


def relation_vector(fan: Fan, m: Sequence) -> tuple:
    """Coefficients of div(e(m)) on D_1, ..., D_n."""
    return tuple(lattice.pairing(m, x) for x in fan.rays)


def relation_lattice(fan: Fan) -> RelationLattice:
    rows = tuple(tuple(int(v) for v in relation_vector(fan, e))
                 for e in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
    assert lattice.rank(rows) == 4
    return RelationLattice(fan.n, rows)


def basis_relations(fan: Fan, basis_ray_indices: Sequence[int]) -> list[tuple[int, ...]]:
    """The four relations div(e(x_k^*)) = 0 for the dual basis of the chosen rays.

    Relation k has coefficient 1 on the k-th chosen ray and 0 on the other
    three.  Raises :class:`lattice.NotABasis` if the rays are not a basis.
    """
    duals = lattice.dual_basis(fan.cone_rays(basis_ray_indices))
    return [tuple(int(v) for v in relation_vector(fan, d)) for d in duals]


def classes_generate_pic(fan: Fan, subset: Iterable[int]) -> bool:
    """Whether {D_i : i in subset} generates Pic(X) over Z.

    Modding out by e_i (i in subset) leaves the relation rows restricted to
    the complementary columns; the classes generate iff those rows span the
    whole of Z^k, i.e. the k x k minors have gcd 1.
    """
    subset = set(subset)
    rest = [i for i in range(fan.n) if i not in subset]
    k = len(rest)
    if k == 0:
        return True
    if k > 4:
        return False
    rows = [[r[i] for i in rest] for r in relation_lattice(fan).rows]
    return lattice.maximal_minor_gcd(rows, k) == 1


def format_relation(vec: Sequence[int]) -> str:
    """Render a relation vector as, e.g., ``D1+D3-D5-D8=0``."""
    terms = []
    for i, c in enumerate(vec):
        if c == 0:
            continue
        name = f"D{i + 1}"
        coef = "" if abs(c) == 1 else str(abs(c))
        sign = "-" if c < 0 else "+"
        terms.append((sign, coef + name))
    if not terms:
        return "0=0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, t in terms[1:]:
        out += sign + t
    return out + "=0"


def divisor_label(i: int) -> str:
    return "D" + label(i)[1:]
