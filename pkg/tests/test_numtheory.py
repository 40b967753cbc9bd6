from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permlike.errors import NotAUnitError
from permlike.numtheory import (
    INF,
    Residue,
    decompose_unit,
    geometric_sum,
    mu_orbits,
    mult_order,
    p_adic_valuation,
)

from conftest import brute_order, unit_list


def test_residue_reduces_and_rejects_bad_modulus():
    assert Residue(11, 9).value == 2
    assert Residue(-1, 9).value == 8
    with pytest.raises(ValueError):
        Residue(1, 0)


@pytest.mark.parametrize("r, expected", [(1, 1), (2, 6), (4, 3)])
def test_mult_order_examples(r, expected):
    assert mult_order(Residue(r, 9)) == expected == brute_order(r, 9)


def test_mult_order_rejects_non_unit():
    with pytest.raises(NotAUnitError, match="not a unit"):
        mult_order(Residue(3, 9))


def test_p_adic_valuation_examples():
    assert p_adic_valuation(3, 3) == 1
    assert p_adic_valuation(18, 3) == 2
    assert p_adic_valuation(7, 3) == 0
    assert p_adic_valuation(0, 3) is INF
    assert INF > 10**9


def test_mu_orbits_examples():
    part = mu_orbits(9, 4)
    assert [o.members for o in part] == [(0,), (1, 4, 7), (2, 8, 5), (3,), (6,)]
    assert part.reps == (0, 1, 2, 3, 6)
    assert [o.members for o in mu_orbits(9, 1)] == [(j,) for j in range(9)]
    assert [o.members for o in mu_orbits(3, 2)] == [(0,), (1, 2)]


def test_mu_orbits_rejects_non_unit():
    with pytest.raises(NotAUnitError):
        mu_orbits(9, 6)


def test_decompose_unit_examples():
    dec = decompose_unit(Residue(2, 9), 3)
    assert (dec.s, dec.a, dec.u.value, dec.v) == (2, 1, 8, -2)
    assert (8 + dec.v * 3) % 9 == 2
    dec = decompose_unit(Residue(1, 9), 3)
    assert (dec.s, dec.a, dec.u.value, dec.v) == (1, 0, 1, 0)
    dec = decompose_unit(Residue(4, 9), 3)
    assert (dec.s, dec.a, dec.u.value, dec.v) == (1, 1, 1, 1)


def test_decompose_unit_errors():
    with pytest.raises(ValueError):
        decompose_unit(Residue(3, 8), 2)
    with pytest.raises(NotAUnitError):
        decompose_unit(Residue(3, 9), 3)


def test_geometric_sum_examples():
    assert geometric_sum(Residue(4, 9), 3).value == 3  # = p^a with p=3, a=1
    assert geometric_sum(Residue(1, 9), 5).value == 5
    assert geometric_sum(Residue(2, 9), 6).value == 63 % 9


@pytest.mark.parametrize("p, n", [(p, n) for p in (3, 5, 7) for n in range(1, 5) if p**n <= 400])
def test_unit_group_properties(p, n):
    d = p**n
    group_order = p ** (n - 1) * (p - 1)
    for r in unit_list(d):
        res = Residue(r, d)
        t = mult_order(res)
        assert t == brute_order(r, d)
        assert group_order % t == 0
        part = mu_orbits(d, res)
        assert sum(o.length for o in part) == d
        assert sorted(j for o in part for j in o.members) == list(range(d))
        assert part.orbits[0].members == (0,)
        for o in part:
            assert t % o.length == 0
            assert o.rep == min(o.members)
            assert pow(r, o.length, d) * o.rep % d == o.rep
            assert all(pow(r, j, d) * o.rep % d != o.rep for j in range(1, o.length))
        dec = decompose_unit(res, p)
        assert dec.s * p**dec.a == t
        assert (p - 1) % dec.s == 0 and 0 <= dec.a < n
        assert brute_order(dec.u.value, d) == dec.s
        assert (dec.u.value + dec.v * p ** (n - dec.a)) % d == r
        if dec.a > 0:
            assert math.gcd(dec.v, p) == 1
        else:
            assert dec.v == 0


@pytest.mark.parametrize("p, n", [(3, 2), (3, 3), (5, 2), (7, 2), (3, 4)])
def test_geometric_sum_valuation(p, n):
    d = p**n
    for a in range(1, n):
        for v in range(1, p**a * p):
            if v % p == 0:
                continue
            r = Residue(1 + v * p ** (n - a), d)
            g = geometric_sum(r, p**a).value
            assert g == p**a  # congruent to p^a modulo p^n
            assert p_adic_valuation(g, p) == a


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 500), st.integers(0, 10**6), st.integers(1, 40))
def test_geometric_sum_identity(d, r, j):
    g = geometric_sum(Residue(r, d), j).value
    assert g * (r - 1) % d == (pow(r, j, d) - 1) % d
