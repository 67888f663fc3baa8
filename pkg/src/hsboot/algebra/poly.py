"""Univariate and sparse multivariate polynomials over a :class:`FieldSpec`.

Coefficients are canonical integer representatives of the field; every
object is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import DomainError, FormatError, SpecMismatchError
from .field import FieldElement, FieldSpec, odometer

Exponent = tuple[int, ...]


@dataclass(frozen=True)
class UniPoly:
    field: FieldSpec
    coeffs: tuple[int, ...]  # lowest degree first, trailing zeros trimmed

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(self.field.reduce(v) for v in c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def to_multi(self, num_vars: int = 1, var: int = 0) -> "MultiPoly":
        terms = {}
        for i, c in enumerate(self.coeffs):
            if c:
                e = [0] * num_vars
                e[var] = i
                terms[tuple(e)] = c
        return MultiPoly(self.field, num_vars, terms)


def interpolate(F: FieldSpec, xs: Sequence[int], ys: Sequence[int]) -> UniPoly:
    """Newton interpolation through ``(xs[i], ys[i])`` on representatives."""
    if len(xs) != len(ys):
        raise FormatError("abscissae and ordinates differ in length")
    if not xs:
        raise DomainError("interpolation needs at least one point")
    if len(set(xs)) != len(xs):
        raise DomainError("interpolation abscissae must be distinct")
    n = len(xs)
    dd = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            dd[i] = F.div(F.sub(dd[i], dd[i - 1]), F.sub(xs[i], xs[i - j]))
    # expand the Newton form from the inside out
    coeffs = [dd[n - 1]]
    for i in range(n - 2, -1, -1):
        # coeffs <- coeffs * (x - xs[i]) + dd[i]
        shifted = [0] + coeffs
        for j in range(len(coeffs)):
            shifted[j] = F.sub(shifted[j], F.mul(coeffs[j], xs[i]))
        shifted[0] = F.add(shifted[0], dd[i])
        coeffs = shifted
    return UniPoly(F, tuple(coeffs))


def uni_interpolate(points: Sequence[tuple[FieldElement, FieldElement]]) -> UniPoly:
    """The unique polynomial of degree < len(points) through ``points``."""
    if not points:
        raise DomainError("interpolation needs at least one point")
    F = points[0][0].field
    for x, y in points:
        if x.field != F or y.field != F:
            raise SpecMismatchError("interpolation points span several fields")
    if len(points) > F.order:
        raise DomainError(f"{len(points)} distinct abscissae do not exist in {F}")
    return interpolate(F, [x.value for x, _ in points], [y.value for _, y in points])


def _grlex_key(e: Exponent) -> tuple:
    return (sum(e), e)


class MultiPoly:
    """Sparse polynomial: map from exponent vector to nonzero coefficient."""

    __slots__ = ("field", "num_vars", "terms")

    def __init__(self, field: FieldSpec, num_vars: int, terms: Mapping[Exponent, int] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != num_vars or any(x < 0 for x in e):
                raise FormatError(f"exponent {e} does not fit {num_vars} variables")
            c = field.reduce(c)
            if c:
                clean[e] = c
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MultiPoly is immutable")

    # constructors ---------------------------------------------------

    @classmethod
    def _raw(cls, field: FieldSpec, num_vars: int, terms: dict) -> "MultiPoly":
        obj = object.__new__(cls)
        object.__setattr__(obj, "field", field)
        object.__setattr__(obj, "num_vars", num_vars)
        object.__setattr__(obj, "terms", terms)
        return obj

    @classmethod
    def zero(cls, field: FieldSpec, num_vars: int) -> "MultiPoly":
        return cls._raw(field, num_vars, {})

    @classmethod
    def constant(cls, field: FieldSpec, num_vars: int, c: int) -> "MultiPoly":
        return cls(field, num_vars, {(0,) * num_vars: c})

    @classmethod
    def var(cls, field: FieldSpec, num_vars: int, i: int) -> "MultiPoly":
        if not 0 <= i < num_vars:
            raise DomainError(f"variable {i} out of range for {num_vars} variables")
        e = [0] * num_vars
        e[i] = 1
        return cls._raw(field, num_vars, {tuple(e): 1})

    # queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def individual_degree(self, i: int) -> int:
        return max((e[i] for e in self.terms), default=0)

    def max_individual_degree(self) -> int:
        return max((max(e, default=0) for e in self.terms), default=0)

    @property
    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def coefficient(self, e: Exponent) -> FieldElement:
        return FieldElement(self.field, self.terms.get(tuple(e), 0))

    def sorted_terms(self) -> list[tuple[Exponent, int]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def leading_term(self) -> tuple[Exponent, int]:
        return max(self.terms.items(), key=lambda kv: _grlex_key(kv[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.field == other.field and self.num_vars == other.num_vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.field, self.num_vars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"MultiPoly(0 over {self.field})"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True):
            mono = "*".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        return f"MultiPoly({' + '.join(parts)} over {self.field})"

    # arithmetic -----------------------------------------------------

    def _check(self, other: "MultiPoly") -> None:
        if self.field != other.field:
            raise SpecMismatchError(f"polynomials over {self.field} and {other.field}")
        if self.num_vars != other.num_vars:
            raise DomainError(f"polynomials in {self.num_vars} and {other.num_vars} variables")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = F.add(out.get(e, 0), c)
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return MultiPoly._raw(F, self.num_vars, out)

    def __neg__(self) -> "MultiPoly":
        F = self.field
        return MultiPoly._raw(F, self.num_vars, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def scale(self, c: int) -> "MultiPoly":
        F = self.field
        if F.reduce(c) == 0:
            return MultiPoly.zero(F, self.num_vars)
        return MultiPoly._raw(F, self.num_vars, {e: F.mul(v, c) for e, v in self.terms.items()})

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        F = self.field
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = F.add(out.get(e, 0), F.mul(c1, c2))
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return MultiPoly._raw(F, self.num_vars, out)

    def __pow__(self, k: int) -> "MultiPoly":
        result = MultiPoly.constant(self.field, self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # evaluation and substitution -------------------------------------

    def evaluate(self, point: Sequence[int]) -> int:
        """Evaluate at a point of representatives (square-and-multiply powers)."""
        if len(point) != self.num_vars:
            raise DomainError(f"point has {len(point)} coordinates, polynomial has {self.num_vars} variables")
        F = self.field
        acc = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v = F.mul(v, F.pow(x, k))
            acc = F.add(acc, v)
        return acc

    def partial_evaluate(self, assignment: Mapping[int, int]) -> "MultiPoly":
        """Fix the variables in ``assignment``; the variable count is kept."""
        F = self.field
        out: dict = {}
        for e, c in self.terms.items():
            v = c
            e2 = list(e)
            for i, x in assignment.items():
                if e[i]:
                    v = F.mul(v, F.pow(x, e[i]))
                    e2[i] = 0
            if v:
                key = tuple(e2)
                s = F.add(out.get(key, 0), v)
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return MultiPoly._raw(F, self.num_vars, out)

    def substitute(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """Compose: variable i becomes ``polys[i]`` (all in a common ring)."""
        if len(polys) != self.num_vars:
            raise DomainError("substitution must cover every variable")
        if not polys:
            return self
        ring_vars = polys[0].num_vars
        F = self.field
        result = MultiPoly.zero(F, ring_vars)
        cache: dict = {}
        for e, c in self.terms.items():
            term = MultiPoly.constant(F, ring_vars, c)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = polys[i] ** k
                    term = term * cache[key]
            result = result + term
        return result

    def remap(self, num_vars: int, mapping: Sequence[int]) -> "MultiPoly":
        """Rename variable i to ``mapping[i]`` inside a ring of ``num_vars`` variables."""
        out: dict = {}
        for e, c in self.terms.items():
            e2 = [0] * num_vars
            for i, k in enumerate(e):
                if k:
                    e2[mapping[i]] += k
            out[tuple(e2)] = self.field.add(out.get(tuple(e2), 0), c)
        return MultiPoly(self.field, num_vars, out)

    def coefficients_in(self, var: int) -> dict[int, "MultiPoly"]:
        """Split as sum_i P_i * x_var^i; P_i keep the full variable count."""
        F = self.field
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            e2 = list(e)
            e2[var] = 0
            parts.setdefault(e[var], {})[tuple(e2)] = c
        return {i: MultiPoly._raw(F, self.num_vars, t) for i, t in parts.items()}


def multi_eval(f: MultiPoly, point: Sequence[FieldElement]) -> FieldElement:
    for x in point:
        if x.field != f.field:
            raise SpecMismatchError("point and polynomial live in different fields")
    return FieldElement(f.field, f.evaluate([x.value for x in point]))


def multi_divide_exact(f: MultiPoly, g: MultiPoly) -> MultiPoly | None:
    """Return ``h`` with ``f == g * h``, or None when ``g`` does not divide ``f``.

    Division runs in graded-lexicographic order, which makes the quotient
    canonical.
    """
    f._check(g)
    if g.is_zero():
        raise DomainError("division by the zero polynomial")
    F = f.field
    lead_e, lead_c = g.leading_term()
    lead_inv = F.inv(lead_c)
    rem = dict(f.terms)
    quot: dict = {}
    while rem:
        e, c = max(rem.items(), key=lambda kv: _grlex_key(kv[0]))
        shift = tuple(a - b for a, b in zip(e, lead_e))
        if any(s < 0 for s in shift):
            return None
        factor = F.mul(c, lead_inv)
        quot[shift] = factor
        for ge, gc in g.terms.items():
            key = tuple(a + b for a, b in zip(ge, shift))
            v = F.sub(rem.get(key, 0), F.mul(factor, gc))
            if v:
                rem[key] = v
            else:
                rem.pop(key, None)
    return MultiPoly._raw(F, f.num_vars, quot)


def monomials(num_vars: int, max_individual: int) -> list[Exponent]:
    """Exponent vectors in ``range(max_individual + 1)^num_vars``, variable 0 fastest."""
    return list(odometer(max_individual + 1, num_vars))

