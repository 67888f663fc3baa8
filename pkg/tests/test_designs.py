from __future__ import annotations

from itertools import combinations, product

import pytest

from hsboot.algebra import FieldSpec
from hsboot.designs import Design, build_design, round_down_pow2, verify_design
from hsboot.errors import ParameterError, ResourceError
from oracles import gf2_mul


def _reference_design(k: int, c: int, r: int) -> list[tuple[int, ...]]:
    """Direct enumeration of all degree < r polynomials over GF(k^(c-1))."""
    t = k.bit_length() - 1
    F = FieldSpec.binary(t * (c - 1))
    K = F.order
    sets = []
    for coeffs in product(range(K), repeat=r):
        coeffs = coeffs[::-1]  # product varies the last slot fastest; a_0 must be fastest
        row = []
        for i in range(k):
            v, xp = 0, 1
            for a in coeffs:
                v ^= gf2_mul(a, xp, F.modulus)
                xp = gf2_mul(xp, i, F.modulus)
            row.append(i * K + v)
        sets.append(tuple(row))
    return sets


def test_example_k2_c2_r2():
    d = build_design(2, 2, 2)
    assert (d.l, d.k, d.r, d.m) == (4, 2, 2, 4)
    assert d.sets == ((0, 2), (1, 3), (0, 3), (1, 2))
    assert all(len(set(a) & set(b)) <= 1 for a, b in combinations(d.sets, 2))
    assert verify_design(d).ok


def test_example_constant_polynomials_are_disjoint():
    d = build_design(4, 2, 1)
    assert d.m == 4
    assert all(not set(a) & set(b) for a, b in combinations(d.sets, 2))


def test_example_k2_c3_r2():
    d = build_design(2, 3, 2)
    assert (d.l, d.m) == (8, 16)
    assert verify_design(d).ok


@pytest.mark.parametrize("k,c,r", [(2, 2, 2), (2, 3, 2), (4, 2, 2), (4, 2, 3), (8, 2, 2), (4, 3, 2)])
def test_matches_reference_enumeration(k, c, r):
    assert list(build_design(k, c, r).sets) == _reference_design(k, c, r)


def test_brute_force_intersections():
    for k, c, r in [(4, 2, 2), (4, 2, 3), (8, 2, 2), (2, 3, 2)]:
        d = build_design(k, c, r)
        worst = max(len(set(a) & set(b)) for a, b in combinations(d.sets, 2))
        assert worst < r


def test_verify_reports_duplicates():
    res = verify_design(Design(4, 2, 2, ((0, 1), (0, 1))))
    assert not res.ok and (res.i, res.j, res.intersection) == (0, 1, 2)


def test_verify_single_set():
    assert verify_design(Design(4, 2, 2, ((0, 1),))).ok


def test_verify_first_pair_reported():
    sets = ((0, 1, 2), (3, 4, 5), (0, 4, 5), (0, 1, 6))
    res = verify_design(Design(8, 3, 2, sets))
    assert not res.ok and (res.i, res.j) == (0, 3)


def test_verify_structure_errors():
    assert not verify_design(Design(4, 2, 2, ((0,), (1, 2))))
    assert not verify_design(Design(4, 2, 2, ((2, 1), (0, 3))))
    assert not verify_design(Design(4, 2, 2, ((0, 9), (1, 2))))


def test_parameter_errors():
    with pytest.raises(ParameterError):
        build_design(6, 2, 2)
    with pytest.raises(ParameterError):
        build_design(4, 1, 2)
    with pytest.raises(ParameterError):
        build_design(4, 2, 5)
    with pytest.raises(ResourceError):
        build_design(16, 3, 4, family_budget=1000)
    with pytest.raises(ResourceError):
        build_design(16, 3, 1, universe_budget=100)


def test_round_down_pow2():
    assert [round_down_pow2(k) for k in (2, 3, 5, 8, 9, 1000)] == [2, 2, 4, 8, 8, 512]


def test_deterministic_serialisation():
    assert build_design(4, 2, 3).to_json() == build_design(4, 2, 3).to_json()
