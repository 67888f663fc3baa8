"""Finite fields: prime fields GF(p) and binary extensions GF(2^t).

Arithmetic works on canonical integer representatives so that the
polynomial, circuit and linear-algebra layers can stay on plain ``int``
values.  :class:`FieldElement` wraps a representative together with its
field for the public element-level API.

Binary-extension elements are encoded as integers whose bit ``j`` is the
coefficient of ``x^j`` (LSB = constant term).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np

from ..errors import DomainError, FormatError, ParameterError, SpecMismatchError

# Conway polynomials over GF(2) for t <= 16, as bitmasks including x^t.
# All are primitive, so x generates the multiplicative group.
CONWAY_BINARY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1011011,
    7: 0b10000011,
    8: 0b100011101,
    9: 0b1000010001,
    10: 0b10001101111,
    11: 0b100000000101,
    12: 0b1000011101011,
    13: 0b10000000011011,
    14: 0b100000010101001,
    15: 0b1000000000110101,
    16: 0b10000000000101101,
}

MAX_BINARY_DEGREE = 16

_SPEC_RE = re.compile(r"^\s*GF\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)\s*$")


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_polymod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def is_irreducible_gf2(poly: int) -> bool:
    """Irreducibility over GF(2) by trial division up to half the degree."""
    t = poly.bit_length() - 1
    if t < 1:
        return False
    if t == 1:
        return True
    if poly & 1 == 0:  # root at 0
        return False
    if bin(poly).count("1") % 2 == 0:  # root at 1
        return False
    for cand in range(2, 1 << (t // 2 + 1)):
        if gf2_polymod(poly, cand) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def _binary_tables(t: int, poly: int) -> tuple[np.ndarray, np.ndarray]:
    """Exp/log tables for GF(2^t) w.r.t. the smallest primitive element."""
    q = 1 << t
    order = q - 1
    for g in range(2 if t > 1 else 1, q):
        exp = np.zeros(2 * order + 1, dtype=np.int64)
        x = 1
        ok = True
        for i in range(order):
            exp[i] = x
            x = gf2_polymod(clmul(x, g), poly)
            if x == 1 and i < order - 1:
                ok = False
                break
        if ok:
            exp[order:2 * order] = exp[:order]
            exp[2 * order] = exp[0]
            log = np.zeros(q, dtype=np.int64)
            log[exp[:order]] = np.arange(order)
            return exp, log
    raise ParameterError(f"no primitive element found for polynomial {poly:#b}")


@dataclass(frozen=True)
class FieldSpec:
    """A concrete finite field.

    Use :meth:`prime`, :meth:`binary` or :meth:`parse` to build one; the
    constructors validate primality / irreducibility.
    """

    kind: str
    modulus: int
    degree: int = 1
    _tables: tuple | None = field(default=None, compare=False, repr=False, hash=False)

    # construction ---------------------------------------------------

    @classmethod
    def prime(cls, p: int) -> "FieldSpec":
        if not _is_prime(p):
            raise ParameterError(f"{p} is not prime")
        return cls("prime", p, 1)

    @classmethod
    def binary(cls, t: int, poly: int | None = None) -> "FieldSpec":
        if not 1 <= t <= MAX_BINARY_DEGREE:
            raise ParameterError(f"GF(2^{t}) unsupported: extension degree must be in 1..{MAX_BINARY_DEGREE}")
        if poly is None:
            poly = CONWAY_BINARY[t]
        if poly.bit_length() - 1 != t:
            raise ParameterError(f"polynomial {poly:#b} does not have degree {t}")
        if not is_irreducible_gf2(poly):
            raise ParameterError(f"polynomial {poly:#b} is reducible over GF(2)")
        return cls("binary", poly, t, _binary_tables(t, poly))

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        m = _SPEC_RE.match(text)
        if not m:
            raise FormatError(f"field: cannot parse {text!r}; expected 'GF(p)' or 'GF(2^t)'")
        base, exp = int(m.group(1)), m.group(2)
        if exp is None:
            return cls.prime(base)
        if base != 2:
            raise ParameterError("field: only characteristic-2 extensions are supported")
        return cls.binary(int(exp))

    def __str__(self) -> str:
        if self.kind == "prime":
            return f"GF({self.modulus})"
        return f"GF(2^{self.degree})"

    # basic facts ----------------------------------------------------

    @property
    def order(self) -> int:
        return self.modulus if self.kind == "prime" else 1 << self.degree

    @property
    def characteristic(self) -> int:
        return self.modulus if self.kind == "prime" else 2

    def elements(self) -> range:
        return range(self.order)

    def element(self, value: int) -> "FieldElement":
        return FieldElement(self, self.reduce(value))

    def reduce(self, value: int) -> int:
        if self.kind == "prime":
            return value % self.modulus
        if value < 0 or value >= self.order:
            raise DomainError(f"{value} is not an element encoding of {self}")
        return value

    # scalar arithmetic on representatives --------------------------

    def add(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a + b) % self.modulus
        return a ^ b

    def sub(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return (a - b) % self.modulus
        return a ^ b

    def neg(self, a: int) -> int:
        if self.kind == "prime":
            return -a % self.modulus
        return a

    def mul(self, a: int, b: int) -> int:
        if self.kind == "prime":
            return a * b % self.modulus
        if a == 0 or b == 0:
            return 0
        exp, log = self._tables
        return int(exp[log[a] + log[b]])

    def inv(self, a: int) -> int:
        if a == 0:
            raise DomainError(f"division by zero in {self}")
        if self.kind == "prime":
            return pow(a, -1, self.modulus)
        exp, log = self._tables
        return int(exp[(self.order - 1 - log[a]) % (self.order - 1)])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.kind == "prime":
            return pow(a, e, self.modulus)
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    # vectorised arithmetic on numpy int64 arrays ---------------------

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == "prime":
            return (a + b) % self.modulus
        return np.bitwise_xor(a, b)

    def vmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.kind == "prime":
            return (a * b) % self.modulus
        exp, log = self._tables
        a, b = np.broadcast_arrays(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def vneg(self, a: np.ndarray) -> np.ndarray:
        if self.kind == "prime":
            return (-a) % self.modulus
        return a


@dataclass(frozen=True)
class FieldElement:
    field: FieldSpec
    value: int

    def __post_init__(self):
        if self.field.reduce(self.value) != self.value:
            raise DomainError(f"{self.value} is not canonical in {self.field}")

    def _check(self, other: "FieldElement") -> None:
        if not isinstance(other, FieldElement):
            raise SpecMismatchError(f"cannot combine a field element with {type(other).__name__}")
        if other.field != self.field:
            raise SpecMismatchError(f"operands live in {self.field} and {other.field}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.sub(self.value, other.value))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.mul(self.value, other.value))

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return FieldElement(self.field, self.field.div(self.value, other.value))

    def __neg__(self) -> "FieldElement":
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e: int) -> "FieldElement":
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.field, self.field.inv(self.value))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value}@{self.field}"


def field_arith(a: FieldElement, b: FieldElement, op: str) -> FieldElement:
    """Apply ``op`` in {'add', 'sub', 'mul', 'div'} to two elements of one field."""
    ops = {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__, "div": a.__truediv__}
    if op not in ops:
        raise ParameterError(f"unknown field operation {op!r}")
    return ops[op](b)


def odometer(radix: int, length: int) -> Iterator[tuple[int, ...]]:
    """All tuples in ``range(radix)^length`` with position 0 varying fastest."""
    digits = [0] * length
    while True:
        yield tuple(digits)
        i = 0
        while i < length:
            digits[i] += 1
            if digits[i] < radix:
                break
            digits[i] = 0
            i += 1
        else:
            return
