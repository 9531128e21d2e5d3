"""Exact rational feasibility LP.

A phase-one simplex over :class:`fractions.Fraction` with Bland's rule, so
it always terminates and never rounds.  Only feasibility (and a feasible
point) is ever needed by the certifier, so there is no phase two.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def find_feasible(
    nvars: int,
    ge: Sequence[tuple[Sequence, object]] = (),
    eq: Sequence[tuple[Sequence, object]] = (),
    nonneg: Sequence[int] = (),
) -> list[Fraction] | None:
    """Return some rational x with a.x >= b for (a, b) in ``ge`` and
    a.x == b for (a, b) in ``eq``, or None if the system is infeasible.

    Variables listed in ``nonneg`` are constrained to x_j >= 0; all others
    are free.

    >>> find_feasible(2, ge=[((1, 0), 1), ((0, 1), 0), ((-1, -1), -3)])
    [Fraction(1, 1), Fraction(0, 1)]
    >>> find_feasible(1, ge=[((1,), 1), ((-1,), 0)]) is None
    True
    """
    nonneg = set(nonneg)
    # Column layout: one column per nonneg variable, two (x+, x-) per free one.
    cols: list[tuple[int, int]] = []
    for j in range(nvars):
        cols.append((j, 1))
        if j not in nonneg:
            cols.append((j, -1))
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    nslack = len(ge)
    width = len(cols) + nslack
    for k, (a, b) in enumerate(ge):
        row = [Fraction(a[j]) * s for j, s in cols] + [Fraction(0)] * nslack
        row[len(cols) + k] = Fraction(-1)
        rows.append(row)
        rhs.append(Fraction(b))
    for a, b in eq:
        rows.append([Fraction(a[j]) * s for j, s in cols] + [Fraction(0)] * nslack)
        rhs.append(Fraction(b))
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]

    m = len(rows)
    total = width + m
    tab = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        tab.append(rows[i] + art + [rhs[i]])
    basis = [width + i for i in range(m)]
    # Reduced costs of the phase-one objective sum(artificials).
    cost = [Fraction(0)] * (total + 1)
    for i in range(m):
        for j in range(width):
            cost[j] -= tab[i][j]
        cost[total] -= tab[i][total]

    while True:
        enter = next((j for j in range(total) if cost[j] < 0), None)
        if enter is None:
            break
        leave = None
        best = None
        for i in range(m):
            if tab[i][enter] > 0:
                ratio = tab[i][total] / tab[i][enter]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            # Unbounded direction cannot occur: the objective is bounded below by 0.
            raise AssertionError("phase-one objective unbounded")
        _pivot(tab, cost, leave, enter)
        basis[leave] = enter

    if cost[total] != 0:
        return None
    values = [Fraction(0)] * width
    for i, b in enumerate(basis):
        if b < width:
            values[b] = tab[i][total]
    x = [Fraction(0)] * nvars
    for c, (j, s) in enumerate(cols):
        x[j] += s * values[c]
    return x


def _pivot(tab, cost, r, c):
    p = tab[r][c]
    pr = tab[r]
    nz = [j for j, y in enumerate(pr) if y != 0]
    for j in nz:
        pr[j] /= p
    for i, row in enumerate(tab):
        if i != r and row[c] != 0:
            f = row[c]
            for j in nz:
                row[j] -= f * pr[j]
    if cost[c] != 0:
        f = cost[c]
        for j in nz:
            cost[j] -= f * pr[j]


def check_feasible(x, ge=(), eq=(), nonneg=()) -> bool:
    """Plain evaluation of a candidate point; used by tests and replay."""
    for a, b in ge:
        if sum(Fraction(ai) * xi for ai, xi in zip(a, x)) < b:
            return False
    for a, b in eq:
        if sum(Fraction(ai) * xi for ai, xi in zip(a, x)) != b:
            return False
    return all(x[j] >= 0 for j in nonneg)
