"""Intersection theory on smooth complete toric 4-folds.

Degree-4 numbers D_i D_j D_k D_l are computed by the usual reduction: a
product of distinct divisors is 1 on a cone and 0 off it, and a repeated
D_i is replaced by a linearly equivalent combination supported away from
a cone containing the other factors.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Sequence

from . import lattice
from .fan import Fan, require_valid


class RankDeficiency(RuntimeError):
    pass


Pair = tuple[int, int]


class IntersectionTable:
    """Memoized quadruple intersection numbers of one fan.

    Values are computed completely before being stored, so a concurrent
    reader sees either no entry or the final one.
    """

    def __init__(self, fan: Fan):
        require_valid(fan)
        self.fan = fan
        self._memo: dict[tuple[int, ...], int] = {}
        self._duals: dict[tuple[tuple[int, ...], int], tuple] = {}

    def __call__(self, *idx: int) -> int:
        if len(idx) == 1:
            idx = tuple(idx[0])
        key = tuple(sorted(idx))
        if len(key) != 4:
            raise ValueError("need exactly four divisor indices")
        val = self._memo.get(key)
        if val is None:
            val = _reduce(self.fan, key, self._lookup, self._dual, None)
            self._memo[key] = val
        return val

    def _lookup(self, key):
        return self(key)

    def _dual(self, cone, i):
        k = (cone, i)
        d = self._duals.get(k)
        if d is None:
            duals = lattice.dual_basis(self.fan.cone_rays(cone))
            d = duals[cone.index(i)]
            self._duals[k] = d
        return d


def _reduce(fan: Fan, key, recurse, dual, rng: random.Random | None) -> int:
    counts = Counter(key)
    support = frozenset(counts)
    if support not in fan.faces:
        return 0
    if len(support) == 4:
        return 1
    repeated = sorted(i for i, c in counts.items() if c > 1)
    containing = [c for c in fan.max_cones if support <= set(c)]
    if rng is None:
        i, cone = repeated[0], containing[0]
    else:
        i, cone = rng.choice(repeated), rng.choice(containing)
    m = dual(cone, i)
    rest = list(key)
    rest.remove(i)
    total = 0
    for k in range(fan.n):
        if k in cone:
            continue
        c = lattice.pairing(m, fan.rays[k])
        if c:
            total -= int(c) * recurse(tuple(sorted(rest + [k])))
    return total


@lru_cache(maxsize=256)
def table(fan: Fan) -> IntersectionTable:
    return IntersectionTable(fan)


def intersection_number(fan: Fan, multiset: Sequence[int], rng: random.Random | None = None) -> int:
    """Degree of D_i D_j D_k D_l for a multiset of four 0-based ray indices.

    With ``rng`` given, the reduction picks its repeated index and its cone at
    random at every step and bypasses the memo; the answer must not change.
    """
    if rng is None:
        return table(fan)(tuple(multiset))

    def dual(cone, i):
        return lattice.dual_basis(fan.cone_rays(cone))[cone.index(i)]

    def recurse(key):
        return _reduce(fan, key, recurse, dual, rng)

    return recurse(tuple(sorted(multiset)))


def all_pairs(n: int) -> list[Pair]:
    return list(combinations_with_replacement(range(n), 2))


@dataclass(frozen=True)
class Codim2Basis:
    """Pair monomials D_i D_j forming a basis of A^2(X)_Q.

    ``pairing[p][b]`` is the degree of (pair p) . (basis monomial b) for p
    running over ``pairs`` (all i <= j); ``expansion[p]`` writes pair p in
    the basis.
    """
    monomials: tuple[Pair, ...]
    pairs: tuple[Pair, ...]
    pairing: tuple[tuple[int, ...], ...]
    expansion: dict

    @property
    def rank(self) -> int:
        return len(self.monomials)

    def functional(self, pair: Pair) -> tuple[int, ...]:
        """Coefficients of alpha -> D_i D_j . alpha in basis coordinates."""
        return self.pairing[self.pairs.index(tuple(sorted(pair)))]

    def gram(self) -> list[list[int]]:
        """alpha . beta for basis monomials (the quadratic form alpha^2)."""
        return [list(self.functional(b)) for b in self.monomials]


def pair_matrix(fan: Fan) -> tuple[list[Pair], list[list[int]]]:
    t = table(fan)
    pairs = all_pairs(fan.n)
    mat = [[t(p + q) for q in pairs] for p in pairs]
    return pairs, mat


def codim2_basis(fan: Fan, hint: Sequence[Pair] | None = None) -> Codim2Basis:
    """A basis of A^2(X)_Q made of pair monomials.

    Pairing is perfect on A^2(X)_Q, so a class is determined by its row of
    the pair matrix.  The monomials are chosen greedily by rank, trying
    ``hint`` first; a hint with dependent entries is ignored.
    """
    pairs, mat = pair_matrix(fan)
    index = {p: k for k, p in enumerate(pairs)}
    candidates = list(pairs)
    if hint:
        hint = [tuple(sorted(h)) for h in hint]
        probe = lattice.RowSpace(len(pairs))
        if all(probe.add(mat[index[h]]) for h in hint):
            candidates = hint + [p for p in pairs if p not in hint]
    space = lattice.RowSpace(len(pairs))
    chosen = [p for p in candidates if space.add(mat[index[p]])]
    rows = [mat[index[p]] for p in chosen]
    # Coefficients on the echelon pivot columns determine the expansion;
    # every other column is then checked.
    piv = space.pivots
    inv = lattice.inverse([[row[c] for c in piv] for row in rows])
    r = len(chosen)
    expansion = {}
    for p in pairs:
        target = mat[index[p]]
        c = [sum(target[piv[k]] * inv[k][b] for k in range(r)) for b in range(r)]
        for col in range(len(pairs)):
            if sum(c[b] * rows[b][col] for b in range(r) if rows[b][col]) != target[col]:
                raise RankDeficiency(f"{fan.name}: D{p[0] + 1}D{p[1] + 1} is not in the span")
        expansion[p] = tuple(c)
    cols = [index[b] for b in chosen]
    pairing = tuple(tuple(mat[index[p]][c] for c in cols) for p in pairs)
    return Codim2Basis(tuple(chosen), tuple(pairs), pairing, expansion)


def c2_pairing(fan: Fan, alpha: Sequence, basis: Codim2Basis | None = None) -> Fraction:
    """c_2(X) . alpha with c_2(X) = sum_{i<j} D_i D_j."""
    if basis is None:
        basis = codim2_basis(fan)
    total = Fraction(0)
    for (i, j), row in zip(basis.pairs, basis.pairing):
        if i < j:
            total += sum(Fraction(a) * r for a, r in zip(alpha, row))
    return total
