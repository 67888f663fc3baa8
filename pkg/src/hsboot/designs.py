"""Reed-Solomon combinatorial designs.

For ``k = 2^t`` and ``c >= 2`` the universe is ``F_k x F_K`` with
``K = k^(c-1)``; the pair ``(i, y)`` is encoded as ``i*K + y``.  Every
polynomial ``p`` of degree ``< r`` over ``GF(K)`` yields the set
``{(i, p(i)) : i in F_k}``; two distinct such polynomials agree on fewer
than ``r`` of the ``k`` evaluation points, which is exactly the design
intersection bound.

The ``k`` evaluation points are the ``GF(K)`` elements with integer
encodings ``0..k-1``.  Any ``k`` distinct elements work, so no subfield
embedding is required.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .algebra import FieldSpec
from .algebra.field import MAX_BINARY_DEGREE
from .budgets import budget
from .errors import ParameterError, ResourceError


@dataclass(frozen=True)
class Design:
    l: int  # noqa: E741  (universe size, named as in the JSON format)
    k: int
    r: int
    sets: tuple[tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.sets)

    def to_json(self) -> str:
        return json.dumps({"l": self.l, "k": self.k, "r": self.r, "sets": [list(s) for s in self.sets]},
                          separators=(",", ":"))

    def truncated(self, m: int) -> "Design":
        if m > self.m:
            raise ParameterError(f"design has only {self.m} sets, {m} requested")
        return Design(self.l, self.k, self.r, self.sets[:m])


@dataclass(frozen=True)
class DesignCheck:
    ok: bool
    reason: str = ""
    i: int | None = None
    j: int | None = None
    intersection: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def _log2_exact(k: int) -> int | None:
    if k >= 2 and k & (k - 1) == 0:
        return k.bit_length() - 1
    return None


def round_down_pow2(k: int) -> int:
    if k < 2:
        raise ParameterError(f"cannot round {k} to a power of two >= 2")
    return 1 << (k.bit_length() - 1)


def design_size(k: int, c: int, r: int) -> int:
    return k ** ((c - 1) * r)


def build_design(k: int, c: int, r: int, *, universe_budget: int | None = None,
                 family_budget: int | None = None) -> Design:
    """All ``k^((c-1) r)`` sets of the Reed-Solomon ``(k^c, k, r)`` design.

    Polynomials are enumerated by coefficient tuple ``(a_0, ..., a_{r-1})``
    with ``a_0`` varying fastest, each coefficient in integer-encoding order.
    """
    t = _log2_exact(k)
    if t is None:
        raise ParameterError(f"k = {k} is not a power of two >= 2")
    if c < 2:
        raise ParameterError(f"c = {c} must be at least 2")
    if not 1 <= r <= k:
        raise ParameterError(f"r = {r} must satisfy 1 <= r <= k = {k}")
    ub = budget("design_universe") if universe_budget is None else universe_budget
    fb = budget("design_family") if family_budget is None else family_budget
    ell = k ** c
    if ell > ub:
        raise ResourceError(f"universe size {ell} exceeds budget {ub}", projected=ell)
    m = design_size(k, c, r)
    if m > fb:
        raise ResourceError(f"family size {m} exceeds budget {fb}", projected=m)
    big_t = t * (c - 1)
    if big_t > MAX_BINARY_DEGREE:
        raise ResourceError(f"GF(2^{big_t}) exceeds the built-in field table", projected=1 << big_t)
    F = FieldSpec.binary(big_t)
    K = F.order
    idx = np.arange(m, dtype=np.int64)
    coeffs = [(idx // K ** j) % K for j in range(r)]
    points = np.arange(k, dtype=np.int64)
    # Horner over GF(K) for every polynomial at every evaluation point
    val = np.broadcast_to(coeffs[r - 1][:, None], (m, k)).copy()
    for j in range(r - 2, -1, -1):
        val = F.vadd(F.vmul(val, points[None, :]), coeffs[j][:, None])
    sets = points[None, :] * K + val
    return Design(ell, k, r, tuple(map(tuple, sets.tolist())))


def verify_design(d: Design) -> DesignCheck:
    """Check set sizes, ranges, distinctness and every pairwise intersection.

    Two sets meet in at least ``r`` points exactly when they share an
    ``r``-subset, so all pairs are covered by hashing every ``r``-subset of
    every set; the first offending pair in ``(i, j)`` order is reported.
    """
    for i, s in enumerate(d.sets):
        if len(s) != d.k:
            return DesignCheck(False, f"set {i} has {len(s)} elements, expected {d.k}", i=i)
        if len(set(s)) != len(s) or list(s) != sorted(s):
            return DesignCheck(False, f"set {i} is not a sorted list of distinct elements", i=i)
        if s and (s[0] < 0 or s[-1] >= d.l):
            return DesignCheck(False, f"set {i} leaves the universe [0, {d.l})", i=i)
    if d.m < 2:
        return DesignCheck(True)
    arr = np.asarray(d.sets, dtype=np.int64).reshape(d.m, d.k)
    candidates: list[tuple[int, int]] = []

    # identical sets
    order = np.lexsort(arr.T[::-1])
    srt = arr[order]
    same = np.all(srt[1:] == srt[:-1], axis=1)
    for pos in np.nonzero(same)[0]:
        a, b = sorted((int(order[pos]), int(order[pos + 1])))
        candidates.append((a, b))

    if d.r <= 0:
        candidates.append((0, 1))
    elif d.r <= d.k:
        candidates.extend(_shared_subset_pairs(arr, d.l, d.r))

    if not candidates:
        return DesignCheck(True)
    i, j = min(candidates)
    inter = len(set(d.sets[i]) & set(d.sets[j]))
    if inter < d.r and d.sets[i] != d.sets[j]:
        # cannot happen; guards the subset argument
        raise AssertionError("subset collision without a large intersection")
    reason = "duplicate sets" if d.sets[i] == d.sets[j] and inter < d.r else f"intersection {inter} >= r = {d.r}"
    return DesignCheck(False, reason, i=i, j=j, intersection=inter)


def _shared_subset_pairs(arr: np.ndarray, ell: int, r: int) -> list[tuple[int, int]]:
    m, k = arr.shape
    bits = max(1, (ell - 1).bit_length())
    combos = list(combinations(range(k), r))
    if bits * r > 63:
        seen: dict[tuple, int] = {}
        pairs = []
        for i in range(m):
            row = arr[i]
            for cmb in combos:
                key = tuple(int(row[p]) for p in cmb)
                if key in seen:
                    pairs.append((seen[key], i))
                else:
                    seen[key] = i
        return _minimal_pairs(pairs)

    def keys_for(cmb):
        key = np.zeros(m, dtype=np.uint64)
        for slot, p in enumerate(cmb):
            key |= arr[:, p].astype(np.uint64) << np.uint64(bits * slot)
        return key

    keys = np.empty(m * len(combos), dtype=np.uint64)
    for n, cmb in enumerate(combos):
        keys[n * m:(n + 1) * m] = keys_for(cmb)
    keys.sort()
    dup = np.unique(keys[1:][keys[1:] == keys[:-1]])
    del keys
    if dup.size == 0:
        return []
    owners: dict[int, list[int]] = {}
    for cmb in combos:
        kk = keys_for(cmb)
        hit = np.nonzero(np.isin(kk, dup))[0]
        for i in hit:
            owners.setdefault(int(kk[i]), []).append(int(i))
    pairs = []
    for sets in owners.values():
        sets = sorted(set(sets))
        pairs.append((sets[0], sets[1]))
    return _minimal_pairs(pairs)


def _minimal_pairs(pairs):
    return [min(pairs)] if pairs else []
