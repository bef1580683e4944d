from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arborcert import INFINITY
from arborcert.ntheory import valuation
from arborcert.padic import (
    IterateIsPole,
    IterateIsZero,
    exact_orbit,
    homogeneous_lift,
    orbit_residues,
    raw_homogeneous_orbit,
    raw_homogeneous_valuation,
    valuation_of_iterate,
)
from conftest import M

PRIMES = [2, 3, 5, 7, 11, 13, 97]


@pytest.mark.parametrize("text", ["z^2+1", "z^3-3z+1", "(z^2-4z+1)/(2z)", "z^2 - 3/4", "(3z^2+1)/(z^2-5)"])
@pytest.mark.parametrize("gamma", [0, 1, -1, Fraction(1, 2), Fraction(-3, 5)])
def test_padic_route_matches_exact(text, gamma):
    f = M(text)
    orb = exact_orbit(f, gamma, 4)
    for n in range(1, 5):
        x = orb[n]
        for p in PRIMES:
            if x is INFINITY:
                with pytest.raises(IterateIsPole):
                    valuation_of_iterate(f, gamma, n, p)
            elif x == 0:
                with pytest.raises(IterateIsZero):
                    valuation_of_iterate(f, gamma, n, p)
            else:
                assert valuation_of_iterate(f, gamma, n, p) == valuation(x, p)


def test_high_power_needs_precision_doubling():
    # f(0) = 3^100 has valuation above the starting precision
    f = M(f"z^2 + {3**100}")
    assert valuation_of_iterate(f, 0, 1, 3) == 100


def test_raw_homogeneous_values():
    f = M("(z^2-4z+1)/(2z)")
    lift = homogeneous_lift(f)
    raw = raw_homogeneous_orbit(lift, -1, 2)
    assert raw[2] == (88, -24)
    assert raw_homogeneous_valuation(lift, -1, 2, 2) == 3
    assert raw_homogeneous_valuation(lift, -1, 2, 11) == 1
    assert raw_homogeneous_valuation(lift, -1, 2, 3, which=1) == 1


@given(st.integers(-50, 50), st.integers(1, 4), st.integers(2, 10**6))
def test_orbit_residues_reduce_exact_orbit(a, n, m):
    lift = homogeneous_lift(M("z^3-3z+1"))
    exact = raw_homogeneous_orbit(lift, a, n)
    res = orbit_residues(lift, a, n, m)
    assert [(x % m, y % m) for x, y in exact] == res
