"""Reference computations used as independent oracles in the tests.

None of these share code with the package: they work on plain integers
and lists with the most direct algorithm available.
"""

from __future__ import annotations

import random
from itertools import product

from hsboot.algebra import FieldSpec
from hsboot.circuits import Builder, Circuit


def egcd_inverse(a: int, p: int) -> int:
    old_r, r, old_s, s = a % p, p, 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    assert old_r == 1
    return old_s % p


def gf2_mul(a: int, b: int, poly: int) -> int:
    """Shift-and-add multiplication with reduction after every shift."""
    t = poly.bit_length() - 1
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        b >>= 1
        a <<= 1
        if a >> t & 1:
            a ^= poly
    return acc


def ref_mul(F: FieldSpec, a: int, b: int) -> int:
    if F.kind == "prime":
        return a * b % F.modulus
    return gf2_mul(a, b, F.modulus)


def ref_add(F: FieldSpec, a: int, b: int) -> int:
    return (a + b) % F.modulus if F.kind == "prime" else a ^ b


def ref_sub(F: FieldSpec, a: int, b: int) -> int:
    return (a - b) % F.modulus if F.kind == "prime" else a ^ b


def ref_inv(F: FieldSpec, a: int) -> int:
    if F.kind == "prime":
        return egcd_inverse(a, F.modulus)
    return next(x for x in range(1, F.order) if gf2_mul(a, x, F.modulus) == 1)


def ref_pow(F: FieldSpec, a: int, e: int) -> int:
    v = 1
    for _ in range(e):
        v = ref_mul(F, v, a)
    return v


def lagrange_eval(F: FieldSpec, pts: list[tuple[int, int]], x: int) -> int:
    total = 0
    for i, (xi, yi) in enumerate(pts):
        num, den = 1, 1
        for j, (xj, _) in enumerate(pts):
            if j != i:
                num = ref_mul(F, num, ref_sub(F, x, xj))
                den = ref_mul(F, den, ref_sub(F, xi, xj))
        total = ref_add(F, total, ref_mul(F, yi, ref_mul(F, num, ref_inv(F, den))))
    return total


def poly_eval_terms(F: FieldSpec, terms: dict, point) -> int:
    total = 0
    for e, c in terms.items():
        v = c
        for x, k in zip(point, e):
            v = ref_mul(F, v, ref_pow(F, x, k))
        total = ref_add(F, total, v)
    return total


def brute_kernel_nonzero(F: FieldSpec, rows, ncols: int) -> bool:
    for v in product(range(F.order), repeat=ncols):
        if any(v) and all(sum_row(F, r, v) == 0 for r in rows):
            return True
    return False


def sum_row(F: FieldSpec, row, v) -> int:
    acc = 0
    for a, b in zip(row, v):
        acc = ref_add(F, acc, ref_mul(F, a, b))
    return acc


def abp_path_sum(F: FieldSpec, abp, point) -> int:
    """Sum over every start-end path by explicit depth-first enumeration."""
    out: dict[int, list] = {}
    for e in abp.edges:
        out.setdefault(e.src, []).append(e)

    def label(e):
        v = e.const
        for c, x in zip(e.coeffs, point):
            v = ref_add(F, v, ref_mul(F, c, x))
        return v

    def walk(u):
        if u == abp.end:
            return 1
        total = 0
        for e in out.get(u, []):
            total = ref_add(F, total, ref_mul(F, label(e), walk(e.dst)))
        return total

    return walk(abp.start)


def random_formula(F: FieldSpec, num_vars: int, leaves: int, rng: random.Random) -> Circuit:
    """Random formula tree with exactly ``leaves`` leaves."""
    b = Builder(F)

    def grow(n: int) -> int:
        if n == 1:
            if rng.random() < 0.7:
                return b.var(rng.randrange(num_vars))
            return b.const(rng.randrange(F.order))
        split = rng.randrange(1, n)
        left, right = grow(split), grow(n - split)
        return b.add(left, right) if rng.random() < 0.5 else b.mul(left, right)

    return b.build(grow(leaves), num_vars=num_vars)


def formula_eval(c: Circuit, point) -> int:
    """Recursive evaluation straight from the node list."""
    F = c.field

    def ev(i):
        nd = c.nodes[i]
        if nd.op == "var":
            return point[nd.arg]
        if nd.op == "const":
            return nd.arg
        vals = [ev(j) for j in nd.arg]
        acc = 0 if nd.op == "add" else 1
        for v in vals:
            acc = ref_add(F, acc, v) if nd.op == "add" else ref_mul(F, acc, v)
        return acc

    return ev(c.output)


def all_points(F: FieldSpec, n: int):
    return list(product(range(F.order), repeat=n))
