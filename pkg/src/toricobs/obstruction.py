"""Certifier for the non-existence of totally nondegenerate maps A -> X.

Write q(i, j) = (phi^*D_i)(phi^*D_j) for a hypothetical totally
nondegenerate finite morphism phi from an abelian surface A.  Every
q(i, j) is >= 0: pullbacks of the D_i are nonzero effective divisors,
and effective divisors on an abelian surface are nef (translate one of
them).  The engine collects pairs with q = 0 using

* disjoint divisors: a 2-element primitive collection gives D_i D_j = 0;
* the relation rule: a principal divisor sum_k <m,x_k> D_k times D_i
  gives sum_k <m,x_k> q(i,k) = 0, so if the coefficients that are not
  already known to vanish share one sign, those q(i,k) vanish too;
* transitivity: q(i,j) = q(j,k) = 0 forces q(i,k) = 0 (also for i = k);

and then looks for a contradiction with projectivity.  In embedding mode
the unknown class [A] in A^2(X)_Q is modelled as a vector and the same
nonnegativity facts become an exact LP; if alpha^2 vanishes on every
class allowed by the forced zeros then c_2(X).A = A^2 = 0 contradicts
projectivity as well.

The engine never claims that a map exists: Inconclusive is the only
non-negative verdict.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Sequence

from . import lattice
from .chow import Codim2Basis, codim2_basis
from .exactlp import find_feasible
from .fan import (Fan, FanError, ample_witness, label, p1_factors, primitive_collections,
                  primitive_relations, validate)
from .picard import classes_generate_pic, format_relation, relation_vector


class InvalidFan(FanError):
    pass


class Mode(str, enum.Enum):
    FINITE = "finite"
    EMBEDDING = "embedding"


class Status(str, enum.Enum):
    NO_FINITE_MORPHISM = "NoFiniteMorphism"
    NO_EMBEDDING = "NoEmbedding"
    INCONCLUSIVE = "Inconclusive"


def pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i <= j else (j, i)


def pair_label(p) -> str:
    return f"q({p[0] + 1},{p[1] + 1})"


# -- trace steps -------------------------------------------------------------

@dataclass(frozen=True)
class DisjointDivisors:
    collection: tuple[int, int]

    @property
    def concluded(self):
        return (self.collection,)

    def to_json(self):
        return {"rule": "DisjointDivisors", "collection": list(self.collection),
                "concludes": [list(self.collection)]}


@dataclass(frozen=True)
class RelationRule:
    pivot: int
    m: tuple[int, ...]
    relation: tuple[int, ...]
    discarded: tuple[int, ...]
    concluded: tuple[tuple[int, int], ...]

    def to_json(self):
        return {"rule": "RelationRule", "pivot": self.pivot, "m": list(self.m),
                "relation": list(self.relation), "discarded": list(self.discarded),
                "concludes": [list(p) for p in self.concluded]}


@dataclass(frozen=True)
class Transitivity:
    i: int
    j: int
    k: int

    @property
    def concluded(self):
        return (pair(self.i, self.k),)

    def to_json(self):
        return {"rule": "Transitivity", "via": [self.i, self.j, self.k],
                "concludes": [list(pair(self.i, self.k))]}


@dataclass(frozen=True)
class ChowImpliedZero:
    """lam * q_target + sum y_p q_p + sum z_p q_p == 0 as functionals on A^2,
    with lam > 0, y >= 0 and every z-pair already known to vanish."""
    target: tuple[int, int]
    lam: int
    nonneg: tuple[tuple[tuple[int, int], int], ...]
    free: tuple[tuple[tuple[int, int], int], ...]

    @property
    def concluded(self):
        return (self.target,)

    def to_json(self):
        return {"rule": "ChowImpliedZero", "target": list(self.target), "lambda": self.lam,
                "nonneg": [[list(p), c] for p, c in self.nonneg],
                "free": [[list(p), c] for p, c in self.free],
                "concludes": [list(self.target)]}


Step = DisjointDivisors | RelationRule | Transitivity | ChowImpliedZero


@dataclass
class ObstructionState:
    n: int
    zero_set: set = field(default_factory=set)
    trace: list = field(default_factory=list)

    def copy(self) -> "ObstructionState":
        return ObstructionState(self.n, set(self.zero_set), list(self.trace))

    def apply(self, step) -> None:
        self.trace.append(step)
        self.zero_set.update(step.concluded)

    def is_zero(self, i, j) -> bool:
        return pair(i, j) in self.zero_set

    def neighbors(self, j) -> list[int]:
        return [i for i in range(self.n) if i != j and pair(i, j) in self.zero_set]

    def components(self) -> list[tuple[int, ...]]:
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.zero_set:
            if i != j:
                parent[find(i)] = find(j)
        groups: dict[int, list[int]] = {}
        for v in range(self.n):
            groups.setdefault(find(v), []).append(v)
        return sorted(tuple(g) for g in groups.values())

    def clique_zero(self, vertices: Sequence[int]) -> bool:
        """All q(i, j) with i <= j in ``vertices`` (squares included) vanish."""
        vs = sorted(vertices)
        return all(pair(a, b) in self.zero_set for k, a in enumerate(vs) for b in vs[k:])


# -- stages ------------------------------------------------------------------

def initial_zeros(fan: Fan) -> ObstructionState:
    state = ObstructionState(fan.n)
    for pc in primitive_collections(fan):
        if len(pc) == 2:
            state.apply(DisjointDivisors(tuple(pc)))
    return state


@lru_cache(maxsize=8192)
def _single_signed_functional(fan: Fan, target: int, survivors: frozenset) -> tuple[int, ...] | None:
    """Integral m with <m, x_target> > 0 and <m, x_u> >= 0 on survivors."""
    ge = [(fan.rays[target], 1)] + [(fan.rays[u], 0) for u in sorted(survivors) if u != target]
    x = find_feasible(4, ge=ge)
    if x is None:
        return None
    return lattice.primitive_integer(x)


def relation_rule_step(fan: Fan, state: ObstructionState) -> RelationRule | None:
    """One application of the relation rule, or None if it cannot fire.

    For a pivot i the survivors U are the k with q(i, k) not yet known to
    vanish.  A relation whose nonzero coefficients on U all have one sign
    exists iff some m has <m, x_t> >= 1 and <m, x_u> >= 0 on U (the
    mirrored case is the same LP for -m).
    """
    for i in range(fan.n):
        survivors = frozenset(k for k in range(fan.n) if not state.is_zero(i, k))
        for t in sorted(survivors):
            m = _single_signed_functional(fan, t, survivors)
            if m is None:
                continue
            r = tuple(int(v) for v in relation_vector(fan, m))
            concluded = tuple(pair(i, k) for k in sorted(survivors) if r[k] != 0)
            discarded = tuple(k for k in range(fan.n) if k not in survivors)
            return RelationRule(i, m, r, discarded, concluded)
    return None


def _transitivity_pass(state: ObstructionState) -> bool:
    changed = False
    for j in range(state.n):
        nb = state.neighbors(j)
        for a, i in enumerate(nb):
            for k in nb[a:]:
                if pair(i, k) not in state.zero_set:
                    state.apply(Transitivity(i, j, k))
                    changed = True
    return changed


def saturate(fan: Fan, state: ObstructionState) -> ObstructionState:
    """Fixpoint of transitivity and the relation rule; returns a new state."""
    state = state.copy()
    while True:
        while _transitivity_pass(state):
            pass
        step = relation_rule_step(fan, state)
        if step is None:
            return state
        state.apply(step)


@dataclass(frozen=True)
class Contradiction:
    kind: str
    witness: dict

    def to_json(self):
        return {"kind": self.kind, "witness": self.witness}


def contradiction_check(fan: Fan, state: ObstructionState) -> Contradiction | None:
    """Test, in order: full graph connected, a Pic-generating zero component,
    and a P^1 factor whose complementary vertices form one zero component."""
    comps = state.components()
    everything = tuple(range(fan.n))
    if len(comps) == 1 and state.clique_zero(everything):
        return Contradiction("FullGraphConnected", {"component": list(everything)})
    for comp in comps:
        if state.clique_zero(comp) and classes_generate_pic(fan, comp):
            return Contradiction("PicGeneratingComponent", {"component": list(comp)})
    for f in p1_factors(fan):
        if state.clique_zero(f.complement):
            return Contradiction("P1FactorSubgraph", {
                "fibers": list(f.pair), "complement": list(f.complement),
                "splitting": list(f.splitting)})
    return None


def contraction_criterion(fan: Fan) -> dict | None:
    """A primitive relation x_a+x_b+x_c+x_d = k x_e with k >= 1, if any."""
    for rel in primitive_relations(fan):
        if len(rel.lhs) == 4 and len(rel.rhs) == 1 and rel.rhs[0][1] >= 1:
            return {"lhs": list(rel.lhs), "rhs": [list(t) for t in rel.rhs],
                    "relation": rel.format()}
    return None


# -- Chow-class stage (embeddings only) -------------------------------------

@dataclass
class ChowStageResult:
    basis: Codim2Basis
    zero_pairs: list
    system: list            # (pair, functional) for every known zero with nonzero functional
    kernel: list            # integral basis of the classes allowed by the zeros
    forced_zero: list       # basis coordinates vanishing on all allowed classes
    derived: list           # pairs added by the LP step, in order

    def to_json(self):
        return {
            "basis": [list(b) for b in self.basis.monomials],
            "functionals": {f"{p[0]},{p[1]}": list(row)
                            for p, row in zip(self.basis.pairs, self.basis.pairing)},
            "zero_pairs": [list(p) for p in self.zero_pairs],
            "system": [[list(p), list(f)] for p, f in self.system],
            "kernel": [list(v) for v in self.kernel],
            "forced_zero": self.forced_zero,
            "derived": [list(p) for p in self.derived],
        }


def _integral(vec) -> tuple[int, ...]:
    den = 1
    for x in vec:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return tuple(x // g for x in ints) if g > 1 else tuple(ints)


def _chow_implied_zero(basis: Codim2Basis, state: ObstructionState,
                       target, squares_only: bool = False) -> ChowImpliedZero | None:
    """Farkas test: is q_target <= 0 on K = {q_Z = 0, q_rest >= 0}?

    With ``squares_only`` the nonnegative multipliers may only sit on
    self-intersections q(i,i), which are nonnegative for any divisor.
    """
    others = [p for p in basis.pairs if p != target]
    nonneg_pairs = [p for p in others if p not in state.zero_set
                    and (not squares_only or p[0] == p[1])]
    free_pairs = [p for p in others if p in state.zero_set]
    cols = nonneg_pairs + free_pairs
    f = {p: basis.functional(p) for p in basis.pairs}
    eq = []
    for b in range(basis.rank):
        eq.append(([f[p][b] for p in cols], -f[target][b]))
    x = find_feasible(len(cols), eq=eq, nonneg=range(len(nonneg_pairs)))
    if x is None:
        return None
    coeffs = _integral([Fraction(1)] + list(x))
    lam, rest = coeffs[0], coeffs[1:]
    nonneg = tuple((p, c) for p, c in zip(nonneg_pairs, rest) if c)
    free = tuple((p, c) for p, c in zip(free_pairs, rest[len(nonneg_pairs):]) if c)
    return ChowImpliedZero(target, lam, nonneg, free)


def _positive_point(basis: Codim2Basis, state: ObstructionState, target, span=None):
    """Some alpha in K with q_target(alpha) >= 1, or None.

    ``span`` is a basis of {q_Z = 0}; the LP runs in its coordinates with
    duplicate and vanishing constraints dropped.
    """
    if span is None:
        span = _zero_kernel(basis, state)
    if not span:
        return None

    def restrict(p):
        f = basis.functional(p)
        return tuple(lattice.pairing(f, v) for v in span)

    ge = {restrict(p) for p in basis.pairs if p not in state.zero_set and p != target}
    ge.discard(tuple([0] * len(span)))
    rows = [(a, 0) for a in sorted(ge)]
    rows.append((restrict(target), 1))
    y = find_feasible(len(span), ge=rows)
    if y is None:
        return None
    return [sum(c * v[b] for c, v in zip(y, span)) for b in range(basis.rank)]


def _zero_kernel(basis: Codim2Basis, state: ObstructionState):
    rows = [basis.functional(p) for p in sorted(state.zero_set)]
    if not rows:
        return [[Fraction(int(i == j)) for j in range(basis.rank)] for i in range(basis.rank)]
    return lattice.kernel(rows, basis.rank)


def chow_class_stage(fan: Fan, state: ObstructionState,
                     hint: Sequence | None = None) -> tuple[ObstructionState, ChowStageResult | None]:
    """Embedding-only stage.  Returns the extended state and, if it fires,
    the result describing the vanishing of alpha^2 on the allowed classes."""
    basis = codim2_basis(fan, hint)
    state = state.copy()
    derived = []
    while True:
        steps = []
        # A point of K positive on q_p rules p out cheaply; K is a convex
        # cone, so witnesses add up.  Only the remaining pairs need Farkas.
        witness = [Fraction(0)] * basis.rank
        span = _zero_kernel(basis, state)
        for p in basis.pairs:
            if p in state.zero_set:
                continue
            if lattice.pairing(basis.functional(p), witness) > 0:
                continue
            alpha = _positive_point(basis, state, p, span)
            if alpha is not None:
                witness = [a + b for a, b in zip(witness, alpha)]
                continue
            step = (_chow_implied_zero(basis, state, p, squares_only=True)
                    or _chow_implied_zero(basis, state, p))
            if step is not None:
                steps.append(step)
        if not steps:
            break
        # every step of a round is certified against the same zero-set
        for step in steps:
            state.apply(step)
            derived.append(step.target)
        state = saturate(fan, state)

    zero_pairs = sorted(state.zero_set)
    kern = _zero_kernel(basis, state)
    gram = basis.gram()
    for u in kern:
        for v in kern:
            val = sum(u[a] * gram[a][b] * v[b] for a in range(basis.rank) for b in range(basis.rank))
            if val != 0:
                return state, None
    system = [(p, basis.functional(p)) for p in zero_pairs if any(basis.functional(p))]
    forced = [b for b in range(basis.rank) if all(v[b] == 0 for v in kern)]
    result = ChowStageResult(basis, zero_pairs, system, [_integral(v) for v in kern],
                             forced, derived)
    return state, result


# -- verdicts ----------------------------------------------------------------

@dataclass
class Verdict:
    fan_name: str
    mode: Mode
    status: Status
    rule: str | None
    certificate: dict
    propagated_from: list | None = None
    tags: list = field(default_factory=list)

    def summary(self) -> str:
        if self.status == Status.INCONCLUSIVE:
            return "Inconclusive"
        if self.propagated_from:
            return f"{self.status.value} ({self.rule}, 2-blow-up of {self.propagated_from[0]})"
        return f"{self.status.value} ({self.rule})"


def fan_json(fan: Fan) -> dict:
    return {"name": fan.name, "rays": [list(r) for r in fan.rays],
            "max_cones": [list(c) for c in fan.max_cones]}


def certify(fan: Fan, mode: Mode | str = Mode.FINITE, chow_hint: Sequence | None = None) -> Verdict:
    """Run the whole pipeline on a projective smooth complete fan."""
    mode = Mode(mode)
    report = validate(fan)
    if not report.valid:
        raise InvalidFan(f"{fan.name}: " + "; ".join(report.problems))
    if not report.projective:
        # every criterion relies on an ample class on X
        raise InvalidFan(f"{fan.name}: fan is not projective")

    state = saturate(fan, initial_zeros(fan))
    contra = contradiction_check(fan, state)
    contraction = contraction_criterion(fan)
    cert = {"fan": fan_json(fan), "mode": mode.value, "ample": list(ample_witness(fan)),
            "contraction": contraction,
            "contradiction": None, "chow_stage": None}
    tags = []
    status, rule = Status.INCONCLUSIVE, None
    if contra is not None:
        status, rule = Status.NO_FINITE_MORPHISM, contra.kind
        cert["contradiction"] = contra.to_json()
        if contra.kind == "PicGeneratingComponent":
            tags.append("relies-on-pic-generating-component-remark")
    elif contraction is not None:
        status, rule = Status.NO_FINITE_MORPHISM, "ContractionCriterion"
        tags.append("contraction-not-confirmed-by-engine")
    elif mode == Mode.EMBEDDING:
        state, chow = chow_class_stage(fan, state, chow_hint)
        if chow is not None:
            status, rule = Status.NO_EMBEDDING, "ChowClassStage"
            cert["chow_stage"] = chow.to_json()
    cert["steps"] = [s.to_json() for s in state.trace]
    cert["zero_set"] = [list(p) for p in sorted(state.zero_set)]
    cert["status"] = status.value
    cert["rule"] = rule
    cert["tags"] = tags
    return Verdict(fan.name, mode, status, rule, cert, tags=tags)


def describe_pair(p) -> str:
    i, j = p
    return f"C{i + 1}C{j + 1}" if i != j else f"C{i + 1}^2"


def format_trace(verdict: Verdict) -> str:
    lines = []
    for s in verdict.certificate["steps"]:
        rule = s["rule"]
        concl = ", ".join(describe_pair(p) for p in s["concludes"]) + " = 0"
        if rule == "DisjointDivisors":
            i, j = s["collection"]
            lines.append(f"{label(i)},{label(j)} primitive collection: {concl}")
        elif rule == "RelationRule":
            rel = format_relation(s["relation"])
            lines.append(f"D{s['pivot'] + 1} times {rel}: {concl}")
        elif rule == "Transitivity":
            i, j, k = s["via"]
            lines.append(f"{describe_pair((i, j))} = {describe_pair((j, k))} = 0: {concl}")
        else:
            lines.append(f"forced on the allowed classes of A^2: {concl}")
    return "\n".join(lines)
