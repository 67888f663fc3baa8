"""Hitting sets: grids, randomized PIT, annihilators and exhaustive checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .algebra import FieldElement, FieldSpec, MultiPoly, kernel_vector, monomials, odometer
from .budgets import budget
from .circuits import ABP, Circuit, evaluate, expand, sparse_to_formula
from .errors import InfeasibleError, ParameterError, PreconditionError, ResourceError
from .rng import SplitRng

MODELS = ("formula", "abp", "circuit")


@dataclass(frozen=True)
class ClassDescriptor:
    """The class C(n, d, s); ``s=None`` means unbounded size."""

    model: str
    n: int
    d: int
    s: int | None = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ParameterError(f"model must be one of {MODELS}")
        if self.n < 1 or self.d < 0 or (self.s is not None and self.s < 1):
            raise ParameterError(f"invalid class parameters n={self.n}, d={self.d}, s={self.s}")


@dataclass(frozen=True)
class HittingSet:
    field: FieldSpec
    claimed: ClassDescriptor
    points: tuple[tuple[int, ...], ...]
    provenance: str = "external"
    dedupe: bool = field(default=True, compare=False)

    def __post_init__(self):
        pts = []
        seen = set()
        for p in self.points:
            p = tuple(self.field.reduce(x) for x in p)
            if len(p) != self.claimed.n:
                raise ParameterError(f"point {p} has {len(p)} coordinates, class has n = {self.claimed.n}")
            if self.dedupe:
                if p in seen:
                    continue
                seen.add(p)
            pts.append(p)
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self) -> int:
        return len(self.points)

    @property
    def cardinality(self) -> int:
        return len(self.points)

    def restrict(self, k: int) -> list[tuple[int, ...]]:
        return [p[:k] for p in self.points]


def _values(F: FieldSpec, xs: Sequence) -> list[int]:
    return [x.value if isinstance(x, FieldElement) else F.reduce(int(x)) for x in xs]


def grid_hitting_set(field_: FieldSpec, n: int, d: int, sample: Sequence, point_budget: int | None = None) -> HittingSet:
    """The grid ``sample^n``, which hits every nonzero polynomial of degree <= d."""
    vals = _values(field_, sample)
    if len(set(vals)) != len(vals):
        raise ParameterError("grid sample must consist of distinct elements")
    if len(vals) <= d:
        raise ParameterError(f"sample of size {len(vals)} is insufficient for degree {d}; need at least {d + 1}")
    limit = budget("points") if point_budget is None else point_budget
    size = len(vals) ** n
    if size > limit:
        raise ResourceError(f"grid of {size} points exceeds budget {limit}", projected=size)
    return HittingSet(field_, ClassDescriptor("formula", n, d, None), tuple(product(vals, repeat=n)), "grid")


@dataclass(frozen=True)
class PitResult:
    nonzero: bool
    point: tuple[int, ...] | None = None
    value: int | None = None
    trials_used: int = 0
    failure_bound: Fraction | None = None


def randomized_pit(c: Circuit | ABP, sample: Sequence, trials: int, seed: int) -> PitResult:
    """Evaluate at ``trials`` seeded uniform points of ``sample^n``.

    A returned witness is always a genuine nonzero value.  The
    probably-zero verdict carries the bound ``(d/|S|)^trials`` on the chance
    that a nonzero polynomial of formal degree ``d`` escaped detection.
    """
    vals = _values(c.field, sample)
    if not vals:
        raise ParameterError("randomized PIT needs a nonempty sample")
    if trials < 1:
        raise ParameterError("trials must be at least 1")
    rng = SplitRng(seed).split("pit")
    n = c.num_vars
    for t in range(1, trials + 1):
        point = tuple(vals[rng.below(len(vals))] for _ in range(n))
        v = evaluate(c, point).value
        if v:
            return PitResult(True, point, v, t)
    ratio = Fraction(min(c.formal_degree, len(vals)), len(vals))
    return PitResult(False, trials_used=trials, failure_bound=ratio ** trials)


def annihilator_monomials(k: int, d_ind: int) -> list[tuple[int, ...]]:
    """Unknown order for the annihilator system: last variable varies fastest."""
    return list(product(range(d_ind + 1), repeat=k))


def find_annihilator(h: HittingSet, k: int, d_ind: int, system_budget: int | None = None) -> MultiPoly:
    """Canonical nonzero Q(z_0..z_{k-1}) of individual degree <= d_ind vanishing on h.

    Points are restricted to their first ``k`` coordinates.  The unknowns
    are the coefficients of the monomials in :func:`annihilator_monomials`
    order, and the kernel vector is the canonical one of
    :func:`kernel_vector`.
    """
    F = h.field
    if k < 1 or k > h.claimed.n:
        raise ParameterError(f"k = {k} must lie in 1..{h.claimed.n}")
    if d_ind < 0:
        raise ParameterError("individual degree must be non-negative")
    unknowns = (d_ind + 1) ** k
    restricted = list(dict.fromkeys(h.restrict(k)))
    if unknowns <= len(restricted):
        raise InfeasibleError(f"(d'+1)^k = {unknowns} does not exceed the {len(restricted)} distinct points "
                              f"of H restricted to k = {k} coordinates; the kernel may be trivial")
    limit = budget("linear_system") if system_budget is None else system_budget
    if unknowns > limit:
        raise ResourceError(f"linear system with {unknowns} unknowns exceeds budget {limit}", projected=unknowns)
    monos = annihilator_monomials(k, d_ind)
    powers = [[F.pow(x, e) for e in range(d_ind + 1)] for x in F.elements()] if F.order <= 4096 else None
    rows = []
    for p in restricted:
        row = []
        for e in monos:
            v = 1
            for x, ex in zip(p, e):
                v = F.mul(v, powers[x][ex] if powers else F.pow(x, ex))
            row.append(v)
        rows.append(row)
    vec = kernel_vector(F, rows, unknowns)
    if vec is None:  # more unknowns than equations: impossible over a field
        raise AssertionError("trivial kernel for an underdetermined system")
    return MultiPoly(F, k, {e: c for e, c in zip(monos, vec) if c})


def annihilator_formula(q: MultiPoly, h_size: int | None = None, d: int | None = None) -> Circuit:
    """Sum-of-products formula for an annihilator (leaf count <= terms * (deg + 1))."""
    return sparse_to_formula(q)


@dataclass(frozen=True)
class HittingCheck:
    ok: bool
    counterexample: MultiPoly | None = None
    checked: int = 0

    def __bool__(self) -> bool:
        return self.ok


def verify_hitting_exhaustive(h: HittingSet, n: int, d_ind: int, enum_budget: int | None = None,
                              chunk: int = 1 << 16) -> HittingCheck:
    """Check every nonzero n-variate polynomial of individual degree <= d_ind.

    Monomials and coefficient vectors are both enumerated in odometer order
    with index 0 varying fastest; the first polynomial vanishing on all of
    ``h`` is returned as the counterexample.
    """
    F = h.field
    q = F.order
    monos = monomials(n, d_ind)
    nm = len(monos)
    total = q ** nm
    limit = budget("enumeration") if enum_budget is None else enum_budget
    if total - 1 > limit:
        raise ResourceError(f"{total - 1} candidate polynomials exceed budget {limit}", projected=total - 1)
    pts = [p[:n] for p in h.points]
    if any(len(p) < n for p in pts):
        raise ParameterError(f"hitting-set points have fewer than n = {n} coordinates")
    if not pts:
        first = next(c for c in odometer(q, nm) if any(c))
        return HittingCheck(False, _poly_from(F, n, monos, first), 1)
    # monomial values at each point: shape (nm, P)
    mono_vals = np.array([[_mono_value(F, p, e) for p in pts] for e in monos], dtype=np.int64)
    weights = q ** np.arange(nm, dtype=np.int64)
    for lo in range(1, total, chunk):
        hi = min(total, lo + chunk)
        idx = np.arange(lo, hi, dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % q  # (chunk, nm)
        acc = np.zeros((hi - lo, len(pts)), dtype=np.int64)
        for j in range(nm):
            acc = F.vadd(acc, F.vmul(digits[:, j:j + 1], mono_vals[j][None, :]))
        vanish = ~np.any(acc != 0, axis=1)
        if vanish.any():
            first = int(np.argmax(vanish))
            coeffs = tuple(int(x) for x in digits[first])
            return HittingCheck(False, _poly_from(F, n, monos, coeffs), lo + first)
    return HittingCheck(True, None, total - 1)


def _mono_value(F: FieldSpec, p, e) -> int:
    v = 1
    for x, k in zip(p, e):
        if k:
            v = F.mul(v, F.pow(x, k))
    return v


def _poly_from(F, n, monos, coeffs) -> MultiPoly:
    return MultiPoly(F, n, {e: c for e, c in zip(monos, coeffs) if c})


@dataclass(frozen=True)
class MultipleCheck:
    ok: bool
    witness: int | None = None
    point: tuple[int, ...] | None = None


def random_sparse_poly(F: FieldSpec, num_vars: int, rng: SplitRng, max_terms: int = 4, max_deg: int = 2) -> MultiPoly:
    terms = {}
    for _ in range(rng.below(max_terms + 1)):
        e = tuple(rng.below(max_deg + 1) for _ in range(num_vars))
        terms[e] = F.add(terms.get(e, 0), rng.below(F.order))
    return MultiPoly(F, num_vars, terms)


def check_multiples_vanish(q: MultiPoly, h: HittingSet, witnesses: int, seed: int) -> MultipleCheck:
    """Every multiple ``q * R`` (seeded random sparse R) vanishes on h."""
    pts = h.restrict(q.num_vars)
    for p in pts:
        if q.evaluate(p):
            raise PreconditionError(f"q does not vanish on hitting-set point {p}")
    rng = SplitRng(seed).split("multiples")
    for w in range(witnesses):
        r = random_sparse_poly(q.field, q.num_vars, rng.split(w))
        prod = q * r
        for p in pts:
            if prod.evaluate(p):
                return MultipleCheck(False, w, p)
    return MultipleCheck(True)


def is_zero_polynomial(c: Circuit | ABP) -> bool:
    return expand(c).is_zero()
