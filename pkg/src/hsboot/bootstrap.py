"""Recursive hitting-set generator and its parameter schedule.

Two modes share one recursion:

* report mode works with exact big integers and rationals only and never
  materializes a point; it returns the recursion tree with cardinalities
  as exponents of the size parameter ``s``;
* toy mode materializes every set on a desk-scale field, with per-stage
  overrides of the design and grid parameters.

Stage numbering follows the generator: stage 1 lifts the base hitting set
to ``n_1 = n_0^8`` variables, stage 2 to ``n_2 = n_1^10`` and every later
stage to ``n_i = 2^(n_{i-1}^(1/4))``.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

import numpy as np

from .algebra import FieldSpec, MultiPoly, monomials
from .budgets import budget
from .designs import Design, build_design, round_down_pow2, verify_design
from .errors import FieldTooSmallError, ParameterError, ResourceError
from .hitting import ClassDescriptor, HittingSet, find_annihilator, verify_hitting_exhaustive
from .reduction import NWSubstitution, image_points

log = logging.getLogger(__name__)

EXACT_BITS = 1 << 16  # integers wider than this are kept as powers of two
DECIMAL_BITS = 13000  # wider integers are written as 2^e or in hex (stays under the str() digit cap)


@dataclass(frozen=True)
class Pow2:
    """The integer 2^e, kept symbolic."""

    e: int

    def __str__(self) -> str:
        return f"2^{self.e}"


def _int_text(v: int) -> str:
    if v.bit_length() <= DECIMAL_BITS:
        return str(v)
    a = abs(v)
    if a & (a - 1) == 0:
        return f"{'-' if v < 0 else ''}2^{a.bit_length() - 1}"
    return hex(v)


def exact_text(x) -> str:
    """Exact text for an int, Fraction or Pow2 of any width."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return _int_text(x.numerator)
        return f"{_int_text(x.numerator)}/{_int_text(x.denominator)}"
    if isinstance(x, int):
        return _int_text(x)
    return str(x)


def iroot4(n: int) -> int:
    return math.isqrt(math.isqrt(n))


def _ge(a: int | Pow2, b: int) -> bool:
    if isinstance(a, Pow2):
        return a.e >= (b - 1).bit_length() if b > 1 else True
    return a >= b


def _frac_le_pow2(x: Fraction, e: int) -> bool:
    """Exact test ``x <= 2^e`` for x > 0."""
    if e >= 0:
        if x.numerator.bit_length() <= e:
            return True
        return x.numerator <= x.denominator << e
    return x.numerator << -e <= x.denominator


def _le_num(x: Fraction, n: int | Pow2) -> bool:
    return _frac_le_pow2(x, n.e) if isinstance(n, Pow2) else x <= n


# ------------------------------------------------------------------ schedule


def _design_covers(design: tuple[int, int, int], n: int | Pow2) -> bool | None:
    """Whether a (k^c, k, r) design has at least n sets, i.e. k^((c-1) r) >= n."""
    l, k, r = design
    if k < 2 or k & (k - 1):
        return None
    t = k.bit_length() - 1
    lt = l.bit_length() - 1
    if l != 1 << lt or lt % t:
        return None
    bits = (lt // t - 1) * r * t  # log2 of the family size
    target = n.e if isinstance(n, Pow2) else (n - 1).bit_length()
    return bits >= target


@dataclass(frozen=True)
class StageParams:
    i: int
    n: int | Pow2
    t: Fraction
    design: tuple[int, int, int]  # (l, k, r) requested for this stage
    g: Fraction  # exponent of the hitting set fed into the stage
    h: Fraction  # exponent the stage claims (= t)

    def to_dict(self) -> dict:
        l, k, r = self.design
        return {"i": self.i, "n": exact_text(self.n), "t": exact_text(self.t), "design": {"l": exact_text(l), "k": exact_text(k), "r": exact_text(r)},
                "g": exact_text(self.g), "h": exact_text(self.h)}


@dataclass(frozen=True)
class Check:
    name: str
    stage: int
    holds: bool | None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "stage": self.stage, "holds": self.holds, "detail": self.detail}


@dataclass(frozen=True)
class Schedule:
    n0: int
    epsilon: Fraction
    B: Fraction
    s_star: int
    stages: tuple[StageParams, ...]
    checks: tuple[Check, ...] = ()

    @property
    def t0(self) -> Fraction:
        return self.n0 - self.epsilon

    def t(self, i: int) -> Fraction:
        return self.t0 if i == 0 else self.stages[i - 1].t

    def n(self, i: int) -> int | Pow2:
        return self.n0 if i == 0 else self.stages[i - 1].n

    def to_dict(self) -> dict:
        return {"n0": self.n0, "epsilon": exact_text(self.epsilon), "B": exact_text(self.B), "s_star": exact_text(self.s_star),
                "t0": exact_text(self.t0), "stages": [s.to_dict() for s in self.stages],
                "checks": [c.to_dict() for c in self.checks]}


def closed_form_t(anchor: Fraction, j: int) -> Fraction:
    """``20^(2^j - 1) * anchor^(2^j)``: the squaring recurrence unrolled j times."""
    return Fraction(20) ** (2 ** j - 1) * anchor ** (2 ** j)


def schedule_from_paper(n0: int, epsilon: Fraction | str | float, s_star: int, min_stages: int = 0) -> Schedule:
    """Stages up to the first ``i`` with ``n_i >= s_star`` (none if ``n_0 >= s_star``).

    ``min_stages`` forces at least that many stages regardless of ``s_star``.

    Every proof inequality is evaluated and recorded as a :class:`Check`;
    violated ones are logged but never block.
    """
    eps = Fraction(epsilon)
    if n0 < 2:
        raise ParameterError("n0 must be at least 2")
    if eps <= 0:
        raise ParameterError("epsilon must be positive")
    B = 3 * Fraction(n0) / eps
    stages: list[StageParams] = []
    checks: list[Check] = [Check("n0 > 150/epsilon", 0, n0 > 150 / eps, f"n0={n0}, 150/eps={exact_text(150 / eps)}")]
    t_prev = Fraction(n0) - eps
    n_prev: int | Pow2 = n0
    i = 0
    while not _ge(n_prev, s_star) or i < min_stages:
        i += 1
        if isinstance(n_prev, Pow2):
            raise ResourceError(f"stage {i} needs n_{i - 1} = {exact_text(n_prev)} exactly", projected=n_prev.e)
        if i == 1:
            n_i: int | Pow2 = n0 ** 8
            t_i = Fraction(n_i, 50)
            design = (n0 ** 5, n0, 2)
            checks.append(Check("B*l < m/50", 1, B * n0 ** 5 < Fraction(n_i, 50),
                                f"B*l={exact_text(B * n0 ** 5)}, m/50={exact_text(Fraction(n_i, 50))}"))
        elif i == 2:
            n_i = n_prev ** 10
            t_i = Fraction(iroot4(n_i), 10)
            design = (n_prev ** 2, n_prev, 10)
            checks.append(Check("5r*g(n) <= k", 2, 5 * 10 * t_prev <= n_prev, f"5r*g={exact_text(50 * t_prev)}, k={exact_text(n_prev)}"))
            checks.append(Check("h(m) = 3 m^(1/5) <= m^(1/4)/10", 2, 30 ** 20 <= n_i, "equivalent to 30^20 <= m"))
            checks.append(Check("stage output 3*l <= t_2", 2, 3 * n_prev ** 2 <= t_i, f"3l={exact_text(3 * n_prev ** 2)}, t_2={exact_text(t_i)}"))
        else:
            e = iroot4(n_prev)
            n_i = (1 << e) if e <= EXACT_BITS else Pow2(e)
            t_i = 20 * t_prev ** 2
            k = math.isqrt(n_prev)
            design = (n_prev, k, iroot4(n_prev))
            checks.append(Check("g(n) <= n^(1/4)/10", i, (10 * t_prev) ** 4 <= n_prev, f"g={exact_text(t_prev)}"))
            checks.append(Check("5r*g(n) <= k", i, 5 * design[2] * t_prev <= k, f"5r*g={exact_text(5 * design[2] * t_prev)}, k={exact_text(k)}"))
            checks.append(Check("k is a power of two", i, k >= 2 and k & (k - 1) == 0, f"k={exact_text(k)}"))
            checks.append(Check("h(m) <= m^(1/4)/10", i, _le_num((10 * t_i) ** 4, n_i), f"h={exact_text(t_i)}"))
        checks.append(Check("design family covers n_i", i, _design_covers(design, n_i), f"(l, k, r) = ({', '.join(map(exact_text, design))})"))
        stages.append(StageParams(i, n_i, t_i, design, g=t_prev, h=t_i))
        t_prev, n_prev = t_i, n_i
    for c in checks:
        if c.holds is False:
            log.warning("schedule inequality violated at stage %d: %s (%s)", c.stage, c.name, c.detail)
    return Schedule(n0, eps, B, s_star, tuple(stages), tuple(checks))


# ------------------------------------------------------------------ report mode


@dataclass
class CostNode:
    stage: int
    size_exponent: Fraction  # the call is Hitting-Set(stage, s^size_exponent)
    output_exponent: Fraction  # cardinality is s^output_exponent
    claimed_exponent: Fraction
    role: str = "root"
    formula: str = ""
    symbolic: str = ""
    children: list["CostNode"] = field(default_factory=list)

    def base_calls(self) -> list[Fraction]:
        if self.stage == 0:
            return [self.size_exponent]
        return [e for c in self.children for e in c.base_calls()]

    def to_dict(self) -> dict:
        return {"stage": self.stage, "role": self.role, "size_exponent": exact_text(self.size_exponent),
                "output_exponent": exact_text(self.output_exponent), "claimed_exponent": exact_text(self.claimed_exponent),
                "formula": self.formula, "symbolic": self.symbolic, "children": [c.to_dict() for c in self.children]}


def _cost_tree(sch: Schedule, i: int, e: Fraction, s: int, role: str = "root") -> CostNode:
    if i == 0:
        out = (sch.n0 - sch.epsilon) * e
        return CostNode(0, e, out, out, role, f"Initial-Hitting-Set({s}^{exact_text(e)})", f"Initial-Hitting-Set(s^{exact_text(e)})")
    st = sch.stages[i - 1]
    if i == 1:
        base = _cost_tree(sch, 0, sch.B * e, s, "annihilate")
        l = st.design[0]
        return CostNode(1, e, sch.B * e * l, st.t * e, role, f"({s}^{exact_text(sch.B * e)})^({exact_text(l)})",
                        f"(s^{exact_text(sch.B * e)})^(n_0^5)", [base])
    if i == 2:
        child = _cost_tree(sch, 1, 5 * e, s, "annihilate")
        l = st.design[0]
        return CostNode(2, e, 3 * e * l, st.t * e, role, f"({s}^{exact_text(3 * e)})^({exact_text(l)})",
                        f"(s^{exact_text(3 * e)})^(n_1^2)", [child])
    t_prev = sch.t(i - 1)
    ann = _cost_tree(sch, i - 1, 5 * e, s, "annihilate")
    ev = _cost_tree(sch, i - 1, 20 * t_prev * e, s, "evaluate")
    return CostNode(i, e, ev.output_exponent, st.t * e, role, f"|H_{i - 1}({s}^{exact_text(20 * t_prev * e)})|",
                    f"|H_{i - 1}(s^{exact_text(20 * t_prev * e)})|", [ann, ev])


def _exact_power(s: int, e: Fraction) -> str | None:
    if e.denominator != 1 or e < 0:
        return None
    if e * max(1, s.bit_length()) > DECIMAL_BITS:
        return None
    return str(s ** int(e))


def hitting_set_report(sch: Schedule, i: int, s: int) -> dict:
    """Exact symbolic accounting of Hitting-Set(i, s) without materializing points."""
    if not 0 <= i <= len(sch.stages):
        raise ParameterError(f"stage {i} not in schedule (0..{len(sch.stages)})")
    tree = _cost_tree(sch, i, Fraction(1), s)
    calls = tree.base_calls()
    t_prev_sq = sch.t(i - 1) ** 2 if i >= 1 else Fraction(1)
    max_call = max(calls)
    report = {
        "stage": i,
        "s": s,
        "n_i": exact_text(sch.n(i)),
        "t_i": exact_text(sch.t(i)),
        "cardinality": {
            "exponent_of_s": exact_text(tree.output_exponent),
            "formula": tree.formula,
            "symbolic": tree.symbolic,
            "decimal": _exact_power(s, tree.output_exponent),
            "log2": float(tree.output_exponent) * math.log2(s) if s > 1 else 0.0,
        },
        "claimed_exponent": exact_text(tree.claimed_exponent),
        "within_claim": tree.output_exponent <= tree.claimed_exponent,
        "base_calls": {
            "count": len(calls),
            "limit": 2 ** i,
            "exponents": [exact_text(c) for c in calls],
            "max_exponent": exact_text(max_call),
            "max_limit": exact_text(sch.B * t_prev_sq),
            "within_limits": len(calls) <= 2 ** i and max_call <= sch.B * t_prev_sq,
        },
        "tree": tree.to_dict(),
    }
    return report


def closed_form_report(sch: Schedule) -> list[dict]:
    """Recurrence versus closed form for the repeated-squaring stages.

    The squaring ``t_i = 20 t_{i-1}^2`` starts after stage 2, so the closed
    form is anchored at ``t_2`` with ``j = i - 2``.
    """
    rows = []
    if len(sch.stages) < 2:
        return rows
    anchor = sch.stages[1].t
    for st in sch.stages[1:]:
        j = st.i - 2
        cf = closed_form_t(anchor, j)
        rows.append({"i": st.i, "j": j, "recurrence": exact_text(st.t), "closed_form": exact_text(cf), "equal": cf == st.t})
    return rows


def squaring_chain(anchor: Fraction, j_max: int) -> list[tuple[int, Fraction, Fraction]]:
    """``(j, recurrence, closed form)`` for ``j <= j_max``, each computed on its own."""
    rows, t = [], anchor
    for j in range(j_max + 1):
        if j:
            t = 20 * t * t
        rows.append((j, t, closed_form_t(anchor, j)))
    return rows


def cost_report(n0: int, epsilon, s: int, s_star: int | None = None, stage: int | None = None) -> dict:
    sch = schedule_from_paper(n0, epsilon, s_star if s_star is not None else s, min_stages=stage or 0)
    return report_from_schedule(sch, s, stage)


def report_from_schedule(sch: Schedule, s: int, stage: int | None = None) -> dict:
    b = len(sch.stages) if stage is None else stage
    return {
        "format": "hsboot-cost-report/1",
        "schedule": sch.to_dict(),
        "stage_count": len(sch.stages),
        "closed_form": closed_form_report(sch),
        "hitting_set": hitting_set_report(sch, b, s),
    }


# ------------------------------------------------------------------ base generators


class BaseGenerator:
    """Supplies hitting sets for n0-variate classes to the first stage."""

    name = "abstract"
    claimed_exponent: Fraction | None = None

    def generate(self, F: FieldSpec, n0: int, s: int | None = None) -> HittingSet:
        raise NotImplementedError


@dataclass
class GridBase(BaseGenerator):
    """The trivial grid of a given side; its exponent is n0, not n0 - epsilon."""

    side: int
    name: str = "grid"

    def generate(self, F, n0, s=None):
        if self.side > F.order:
            raise FieldTooSmallError(f"grid side {self.side} exceeds {F}", needed=self.side)
        pts = tuple(product(range(self.side), repeat=n0))
        return HittingSet(F, ClassDescriptor("formula", n0, self.side - 1, None), pts, "base-generator")


@dataclass
class ExhaustiveBase(BaseGenerator):
    """Greedy set cover hitting every nonzero polynomial of individual degree <= degree."""

    degree: int
    name: str = "exhaustive"

    def generate(self, F, n0, s=None):
        monos = monomials(n0, self.degree)
        q = F.order
        total = q ** len(monos) - 1
        if total > budget("enumeration"):
            raise ResourceError(f"{total} polynomials exceed the enumeration budget", projected=total)
        points = list(product(range(q), repeat=n0))
        mv = np.array([[_mono(F, p, e) for p in points] for e in monos], dtype=np.int64)
        idx = np.arange(1, total + 1, dtype=np.int64)
        digits = (idx[:, None] // (q ** np.arange(len(monos), dtype=np.int64))[None, :]) % q
        vals = np.zeros((total, len(points)), dtype=np.int64)
        for j in range(len(monos)):
            vals = F.vadd(vals, F.vmul(digits[:, j:j + 1], mv[j][None, :]))
        hits = vals != 0  # (poly, point)
        uncovered = np.ones(total, dtype=bool)
        chosen: list[int] = []
        while uncovered.any():
            gain = hits[uncovered].sum(axis=0)
            best = int(np.argmax(gain))  # first maximum: lowest point index wins ties
            if gain[best] == 0:
                raise AssertionError("polynomial vanishing on the whole field grid")
            chosen.append(best)
            uncovered &= ~hits[:, best]
        chosen.sort()
        return HittingSet(F, ClassDescriptor("formula", n0, self.degree, None),
                          tuple(points[c] for c in chosen), "base-generator")


def _mono(F, p, e):
    v = 1
    for x, k in zip(p, e):
        if k:
            v = F.mul(v, F.pow(x, k))
    return v


@dataclass
class ExternalBase(BaseGenerator):
    hitting_set: HittingSet
    name: str = "external"

    def generate(self, F, n0, s=None):
        if self.hitting_set.field != F:
            raise ParameterError("external base hitting set lives in another field")
        return self.hitting_set


def make_base(spec: dict) -> BaseGenerator:
    kind = spec.get("kind", "grid")
    if kind == "grid":
        return GridBase(int(spec.get("side", 2)))
    if kind == "exhaustive":
        return ExhaustiveBase(int(spec.get("degree", 1)))
    raise ParameterError(f"base.kind: unknown base generator {kind!r}")


# ------------------------------------------------------------------ toy mode


@dataclass(frozen=True)
class StageOverride:
    """Concrete parameters for one materialized stage."""

    k: int
    c: int
    r: int
    m: int | None = None  # output variables; defaults to the full design
    grid_side: int | None = None  # stages 1 and 2: side of the evaluation grid
    annihilator_degree: int | None = None  # defaults to the least d' with (d'+1)^k > |H|

    @classmethod
    def from_dict(cls, d: dict) -> "StageOverride":
        try:
            k, c, r = (int(v) for v in d["design"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"stages[].design: expected [k, c, r] ({exc})") from None
        return cls(k, c, r, d.get("m"), d.get("grid_side"), d.get("annihilator_degree"))


@dataclass
class StageRun:
    stage: int
    source: HittingSet  # the set the annihilator vanishes on
    q: MultiPoly
    annihilator_degree: int
    design: Design
    m: int
    evaluation_points: tuple[tuple[int, ...], ...]
    output: HittingSet
    checks: dict
    notes: list[str]


@dataclass
class ToyRun:
    field: FieldSpec
    base: HittingSet
    stages: list[StageRun]
    calls: list[tuple[int, str]]
    elapsed: float

    @property
    def final(self) -> HittingSet:
        return self.stages[-1].output if self.stages else self.base


def _least_degree(k: int, size: int) -> int:
    d = 0
    while (d + 1) ** k <= size:
        d += 1
    return d


def run_toy(F: FieldSpec, n0: int, base: BaseGenerator, overrides: Sequence[StageOverride],
            point_budget: int | None = None) -> ToyRun:
    """Materialize Hitting-Set(b) for ``b = len(overrides)`` with the given stage parameters."""
    start = time.perf_counter()
    limit = budget("points") if point_budget is None else point_budget
    calls: list[tuple[int, str]] = []
    memo: dict[int, StageRun | HittingSet] = {}
    runs: list[StageRun] = []

    def base_set() -> HittingSet:
        if 0 not in memo:
            memo[0] = base.generate(F, n0)
        return memo[0]

    def stage(i: int, role: str) -> HittingSet:
        calls.append((i, role))
        if i == 0:
            return base_set()
        if i in memo:
            return memo[i].output
        ov = overrides[i - 1]
        notes: list[str] = []
        source = stage(i - 1, "annihilate") if i >= 2 else stage(0, "annihilate")
        k = ov.k
        if k & (k - 1) or k < 2:
            k2 = round_down_pow2(k)
            notes.append(f"design k={k} rounded down to {k2}")
            log.info("stage %d: design k=%d rounded down to %d", i, k, k2)
            k = k2
        if k > source.claimed.n:
            raise ParameterError(f"stage {i}: design k={k} exceeds the {source.claimed.n} coordinates of the source set")
        distinct = len(set(source.restrict(k)))
        dq = ov.annihilator_degree if ov.annihilator_degree is not None else _least_degree(k, distinct)
        if dq >= F.order:
            raise FieldTooSmallError(f"stage {i}: annihilator degree {dq} needs a field of order > {dq}", needed=dq + 1)
        q = find_annihilator(source, k, dq)
        design = build_design(k, ov.c, ov.r)
        m = ov.m if ov.m is not None else design.m
        if m > design.m:
            raise ParameterError(f"stage {i}: m={m} exceeds the {design.m} sets of the design")
        sub = NWSubstitution(design, q)
        if i <= 2:
            side = ov.grid_side if ov.grid_side is not None else F.order
            if side > F.order:
                raise FieldTooSmallError(f"stage {i}: grid side {side} exceeds {F}", needed=side)
            size = side ** design.l
            if size > limit:
                raise ResourceError(f"stage {i}: evaluation grid of {size} points exceeds budget {limit}", projected=size)
            evals = tuple(product(range(side), repeat=design.l))
        else:
            ev = stage(i - 1, "evaluate")
            if ev.claimed.n != design.l:
                raise ParameterError(f"stage {i}: evaluation set has {ev.claimed.n} coordinates, design universe {design.l}")
            evals = ev.points
        images = image_points(sub, evals, m)
        out = HittingSet(F, ClassDescriptor("formula", m, 1, None), tuple(images), f"bootstrap-stage-{i}", dedupe=False)
        checks = {
            "annihilator_nonzero": not q.is_zero(),
            "annihilator_vanishes": all(q.evaluate(p) == 0 for p in source.restrict(k)),
            "design_valid": verify_design(design.truncated(max(m, 1)) if m else design).ok,
            "images_rederived": all(sub.image(a, m) == img for a, img in zip(evals, images)),
            "cardinality_preserved": len(out) == len(evals),
        }
        run = StageRun(i, source, q, dq, design, m, evals, out, checks, notes)
        memo[i] = run
        runs.append(run)
        return out

    if overrides:
        stage(len(overrides), "root")
    else:
        stage(0, "root")
    runs.sort(key=lambda r: r.stage)
    return ToyRun(F, base_set(), runs, calls, time.perf_counter() - start)


def micro_class_check(run: ToyRun, n: int | None = None, degree: int = 1):
    """Exhaustive hitting check of the final set against individual degree <= degree."""
    final = run.final
    n = final.claimed.n if n is None else n
    return verify_hitting_exhaustive(final, n, degree)


@dataclass
class HardPolynomial:
    poly: MultiPoly
    set_size: int
    elapsed: float
    work: int


def derive_hard_polynomial(run: ToyRun, n: int, d: int) -> HardPolynomial:
    """Annihilator of the final toy set: n variables, individual degree <= d.

    ``work`` counts the field cells of the elimination (rows * columns * rank
    bound), the quantity that must stay polynomial in the set size.
    """
    start = time.perf_counter()
    final = run.final
    if not run.stages and n <= final.claimed.n and len(final) == 0:
        q = MultiPoly.constant(run.field, n, 1)
    else:
        q = find_annihilator(final, n, d)
    rows = len(set(final.restrict(n)))
    cols = (d + 1) ** n
    return HardPolynomial(q, len(final), time.perf_counter() - start, rows * cols * min(rows, cols))
