"""Variable reduction by design-based substitution, and the extraction of a
low-degree multiple of the hard polynomial from a circuit the substitution
kills (no factorization involved).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import FieldSpec, MultiPoly, UniPoly, interpolate, multi_divide_exact, odometer
from .budgets import budget
from .circuits import (
    Builder,
    Circuit,
    Node,
    compose,
    eval_values,
    expand,
    horner_formula,
    relabel,
    sparse_to_formula,
)
from .designs import Design
from .errors import FieldTooSmallError, ParameterError, PreconditionError, ResourceError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NWSubstitution:
    design: Design
    q: MultiPoly
    q_formula: Circuit = field(default=None)

    def __post_init__(self):
        if self.design.k != self.q.num_vars:
            raise ParameterError(f"design set size {self.design.k} != {self.q.num_vars} variables of q")
        if self.q.is_zero():
            raise ParameterError("the substituted polynomial must be nonzero")
        if self.q_formula is None:
            object.__setattr__(self, "q_formula", sparse_to_formula(self.q))
        elif self.q_formula.field != self.q.field:
            raise ParameterError("q_formula and q live in different fields")

    @property
    def field(self) -> FieldSpec:
        return self.q.field

    @property
    def d(self) -> int:
        """Maximum individual degree of q."""
        return self.q.max_individual_degree()

    @property
    def degree(self) -> int:
        return self.q.total_degree

    def block(self, i: int) -> tuple[int, ...]:
        return tuple(sorted(self.design.sets[i]))

    def image(self, point: Sequence[int], m: int) -> tuple[int, ...]:
        """``(q(a|S_1), ..., q(a|S_m))`` evaluated directly from q."""
        return tuple(self.q.evaluate([point[j] for j in self.block(i)]) for i in range(m))


def nw_substitute(p: Circuit, sub: NWSubstitution) -> Circuit:
    """Circuit over the design universe computing p(q(y|S_1), ..., q(y|S_m))."""
    if p.field != sub.field:
        raise ParameterError(f"circuit over {p.field}, substitution over {sub.field}")
    m = p.num_vars
    if m > sub.design.m:
        raise ParameterError(f"circuit has {m} variables but the design only {sub.design.m} sets")
    ell = sub.design.l
    copies = [relabel(sub.q_formula, sub.block(i), ell) for i in range(m)]
    out = compose(p, copies)
    return Circuit(out.field, out.nodes, out.output, out.kind, ell)


def image_points(sub: NWSubstitution, points: Sequence[Sequence[int]], m: int) -> list[tuple[int, ...]]:
    """Evaluate the m relabelled formula copies at every point."""
    copies = [relabel(sub.q_formula, sub.block(i), sub.design.l) for i in range(m)]
    return [tuple(eval_values(c, a) for c in copies) for a in points]


# ------------------------------------------------------------------ extraction


@dataclass(frozen=True)
class LowestCoefficient:
    a: int
    coefficient: MultiPoly


def split_lowest_coefficient(p_prime: MultiPoly, x_var: int) -> LowestCoefficient:
    """Least ``a`` with nonzero coefficient of ``x_var^a``; the coefficient drops ``x_var``."""
    if p_prime.is_zero():
        raise PreconditionError("the zero polynomial has no nonzero coefficient")
    parts = p_prime.coefficients_in(x_var)
    a = min(parts)
    keep = [i for i in range(p_prime.num_vars) if i != x_var]
    coeff = MultiPoly(p_prime.field, len(keep), {tuple(e[i] for i in keep): c for e, c in parts[a].terms.items()})
    return LowestCoefficient(a, coeff)


def _tensor_interpolate(F: FieldSpec, nodes: list[int], values: np.ndarray) -> dict[tuple, int]:
    """Dense multivariate interpolation from a full grid ``nodes^n``."""
    coeffs = values.copy()
    for axis in range(coeffs.ndim):
        moved = np.moveaxis(coeffs, axis, -1)
        flat = moved.reshape(-1, len(nodes))
        out = np.zeros_like(flat)
        for row in range(flat.shape[0]):
            poly = interpolate(F, nodes, [int(v) for v in flat[row]])
            out[row, :len(poly.coeffs)] = poly.coeffs
        coeffs = np.moveaxis(out.reshape(moved.shape), -1, axis)
    return {tuple(int(i) for i in idx): int(v) for idx, v in np.ndenumerate(coeffs) if v}


def extract_lowest_coeff(p_prime: Circuit, d_cap: int, y_degree_cap: int | None = None,
                         grid_budget: int | None = None) -> LowestCoefficient:
    """Lowest nonzero x-coefficient of a circuit by evaluation and interpolation only.

    The last variable of ``p_prime`` is x; the others form the y block.  For
    every y on a grid wide enough for ``y_degree_cap`` the univariate in x is
    interpolated from ``d_cap + 1`` values, and the chosen coefficient is then
    rebuilt over the y block by tensor interpolation.
    """
    F = p_prime.field
    n = p_prime.num_vars
    if n < 1:
        raise ParameterError("p_prime needs at least the x variable")
    if d_cap + 1 > F.order:
        raise FieldTooSmallError(f"{F} has fewer than {d_cap + 1} points for interpolation in x", needed=d_cap + 1)
    e = p_prime.formal_degree if y_degree_cap is None else y_degree_cap
    if e + 1 > F.order:
        raise FieldTooSmallError(f"{F} is too small for y-degree {e}", needed=e + 1)
    ny = n - 1
    grid = (e + 1) ** ny
    limit = budget("ki_dense") if grid_budget is None else grid_budget
    if grid * (d_cap + 1) > limit:
        raise ResourceError(f"{grid * (d_cap + 1)} evaluations exceed budget {limit}", projected=grid * (d_cap + 1))
    xs = list(range(d_cap + 1))
    ynodes = list(range(e + 1))
    table = np.zeros((grid, d_cap + 1), dtype=np.int64)
    ypoints = list(odometer(e + 1, ny))
    for gi, yp in enumerate(ypoints):
        coeffs = interpolate(F, xs, [eval_values(p_prime, list(yp) + [x]) for x in xs]).coeffs
        table[gi, :len(coeffs)] = coeffs
    nz = np.nonzero(np.any(table != 0, axis=0))[0]
    if nz.size == 0:
        raise PreconditionError("p_prime is identically zero on the interpolation grid")
    a = int(nz[0])
    # odometer order has y_0 fastest, i.e. Fortran order on the grid
    values = table[:, a].reshape((e + 1,) * ny, order="F") if ny else table[:, a].reshape(())
    if ny == 0:
        return LowestCoefficient(a, MultiPoly.constant(F, 0, int(values)))
    terms = _tensor_interpolate(F, ynodes, values)
    return LowestCoefficient(a, MultiPoly(F, ny, terms))


@dataclass(frozen=True)
class ExtractionResult:
    t: int  # 1-based hybrid index: P_{t-1} nonzero, P_t zero
    assignment: dict
    p_prime: MultiPoly  # variables: y|S_t in sorted order, then x_t
    a: int
    p_tilde: MultiPoly
    p_tilde_formula: Circuit
    quotient: MultiPoly
    s: int
    d: int
    D: int
    r: int
    degree_bound: int
    size_bound: int
    size_bound_ok: bool


def _substitute_one(P: MultiPoly, var: int, poly: MultiPoly) -> MultiPoly:
    polys = [MultiPoly.var(P.field, P.num_vars, i) for i in range(P.num_vars)]
    polys[var] = poly
    return P.substitute(polys)


def _first_assignment(P: MultiPoly, free_vars: list[int], search_budget: int | None) -> dict:
    """First assignment of ``free_vars`` in odometer order that keeps P nonzero.

    Odometer order makes the last variable most significant.  When every
    free variable has degree below the field order, a nonzero polynomial
    has a nonvanishing completion, so fixing variables from the most
    significant down to the smallest value that keeps P nonzero gives
    exactly the first success.  Otherwise assignments are enumerated.
    """
    F = P.field
    if all(e[v] < F.order for e in P.terms for v in free_vars):
        out: dict[int, int] = {}
        cur = P
        for v in reversed(free_vars):
            for c in range(F.order):
                nxt = cur.partial_evaluate({v: c})
                if not nxt.is_zero():
                    out[v], cur = c, nxt
                    break
        return {v: out[v] for v in free_vars}
    limit = budget("assignment_search") if search_budget is None else search_budget
    for tries, vals in enumerate(odometer(F.order, len(free_vars))):
        if tries >= limit:
            raise ResourceError(f"assignment search exceeded {limit} attempts", projected=F.order ** len(free_vars))
        cand = dict(zip(free_vars, vals))
        if not P.partial_evaluate(cand).is_zero():
            return cand
    raise FieldTooSmallError(f"no assignment over {F} keeps the hybrid polynomial nonzero")


def ki_extract(p: Circuit, sub: NWSubstitution, dense_budget: int | None = None,
               search_budget: int | None = None) -> ExtractionResult:
    """Reproduce the extraction argument on a concrete instance.

    Requires ``p`` nonzero and ``p(q(y|S_1), ..., q(y|S_m))`` identically zero.
    Returns the nonzero multiple ``p_tilde = q * quotient`` together with a
    formula for it built from ``p``'s formula, univariate/sparse formulas for
    the restricted copies of q, and interpolation in x.
    """
    F = p.field
    design = sub.design
    ell, k, r = design.l, design.k, design.r
    m = p.num_vars
    if m > design.m:
        raise ParameterError(f"circuit has {m} variables but the design only {design.m} sets")
    dense = budget("ki_dense") if dense_budget is None else dense_budget
    P = expand(p)
    if P.is_zero():
        raise PreconditionError("p must be a nonzero polynomial")
    D = P.total_degree
    ring = ell + m
    lifted = P.remap(ring, [ell + j for j in range(m)])
    Qs = [sub.q.remap(ring, sub.block(i)) for i in range(m)]

    hybrids = [lifted]
    for i in range(m):
        nxt = _substitute_one(hybrids[-1], ell + i, Qs[i])
        if len(nxt) > dense:
            raise ResourceError(f"hybrid polynomial with {len(nxt)} terms exceeds budget {dense}", projected=len(nxt))
        hybrids.append(nxt)
    if not hybrids[m].is_zero():
        raise PreconditionError("the substituted circuit is not identically zero")
    t = next(i for i in range(1, m + 1) if hybrids[i].is_zero())
    prev = hybrids[t - 1]

    block_t = sub.block(t - 1)
    x_t = ell + t - 1
    keep = set(block_t) | {x_t}
    free_vars = [v for v in range(ring) if v not in keep and (v < ell or v > x_t)]
    assignment = _first_assignment(prev, free_vars, search_budget)
    restricted = prev.partial_evaluate(assignment)

    # P'(y|S_t, x_t) in k + 1 variables
    pos = {v: j for j, v in enumerate(block_t)}
    pos[x_t] = k
    p_prime = MultiPoly(F, k + 1, {
        tuple(e[v] for v in list(block_t) + [x_t]): c for e, c in restricted.terms.items()
    })
    low = split_lowest_coefficient(p_prime, k)
    quotient = multi_divide_exact(low.coefficient, sub.q)
    if quotient is None:
        raise AssertionError("lowest coefficient is not divisible by q")

    d = max(sub.d, 1)
    s = p.size
    degree_bound = k * sub.d * D
    if low.coefficient.total_degree > degree_bound:
        raise AssertionError(f"degree {low.coefficient.total_degree} exceeds k*d*D = {degree_bound}")

    dx = max(e[k] for e in p_prime.terms)  # x-degree of P', at most D
    formula = _p_tilde_formula(p, sub, t, assignment, pos, low.a, dx, ell)
    if r == 2:
        size_bound = 4 * s * d * (D + 1)
    else:
        size_bound = s * (r - 1) * d ** r * (D + 1)
    size_ok = formula.size <= size_bound
    if r == 2 and not size_ok:
        raise AssertionError(f"formula with {formula.size} leaves exceeds 4*s*d*(D+1) = {size_bound}")
    if not size_ok:
        log.warning("extraction formula has %d leaves, above s*(r-1)*d^r*(D+1) = %d", formula.size, size_bound)
    return ExtractionResult(t, assignment, p_prime, low.a, low.coefficient, formula, quotient,
                            s, sub.d, D, r, degree_bound, size_bound, size_ok)


def _p_tilde_formula(p: Circuit, sub: NWSubstitution, t: int, assignment: dict, pos: dict,
                     a: int, dx: int, ell: int) -> Circuit:
    """Formula for the a-th x-coefficient of P' over the k block variables.

    P' has x-degree ``dx``, so interpolation at ``dx + 1`` points is exact.
    """
    F = p.field
    k = sub.design.k
    if dx + 1 > F.order:
        raise FieldTooSmallError(f"interpolation in x needs {dx + 1} field elements", needed=dx + 1)
    subs: list[Circuit] = []
    for j in range(p.num_vars):
        x_var = ell + j
        if j < t - 1:
            # Q restricted to the variables S_j shares with S_t
            qj = sub.q.remap(ell, sub.block(j)).partial_evaluate({v: assignment[v] for v in assignment if v < ell})
            shared = sorted({v for e in qj.terms for v, ex in enumerate(e) if ex})
            if len(shared) <= 1 and sub.design.r == 2:
                var = shared[0] if shared else 0
                uni = UniPoly(F, tuple(qj.terms.get(tuple(i if v == var else 0 for v in range(ell)), 0)
                                       for i in range(qj.total_degree + 1)))
                sub_f = horner_formula(uni, pos.get(var, 0), k + 1)
            else:
                sub_f = sparse_to_formula(qj.remap(k + 1, [pos.get(v, 0) for v in range(ell)]))
            subs.append(Circuit(F, sub_f.nodes, sub_f.output, "formula", k + 1))
        elif j == t - 1:
            b = Builder(F)
            subs.append(b.build(b.var(k), num_vars=k + 1))
        else:
            b = Builder(F)
            subs.append(b.build(b.const(assignment[x_var]), num_vars=k + 1))
    p_prime_f = compose(p, subs)

    alphas = list(range(dx + 1))
    b = Builder(F)
    summands = []
    for e, alpha in enumerate(alphas):
        basis = interpolate(F, alphas, [1 if i == e else 0 for i in range(dx + 1)])
        lam = basis.coeff(a)
        fixed = Circuit(F, tuple(Node("const", alpha) if nd.op == "var" and nd.arg == k else nd
                                 for nd in p_prime_f.nodes), p_prime_f.output, "formula", k + 1)
        summands.append(b.mul(b.const(lam), b.embed(fixed)))
    out = b.build(b.add(*summands), num_vars=k)
    return Circuit(F, out.nodes, out.output, "formula", k)
