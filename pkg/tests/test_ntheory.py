import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from arborcert.ntheory import (
    factor,
    factor_rational,
    height,
    hgcd,
    is_pm_square,
    is_probable_prime,
    odd_part,
    primes_up_to,
    rad,
    strip_common,
    valuation,
)


def test_primes_match_sympy():
    assert list(primes_up_to(5000)) == list(sympy.primerange(2, 5001))


@given(st.integers(-10**6, 10**12))
def test_miller_rabin_matches_sympy(n):
    assert is_probable_prime(n) == bool(sympy.isprime(n))


@pytest.mark.parametrize("n", [88, 677, 2**61 - 1, 1000003 * 1000033, 600851475143, -2 * 3 * 5**7 * 45833])
def test_factor_matches_sympy(n):
    prof = factor(n)
    assert prof.complete
    assert prof.factors == {int(p): e for p, e in sympy.factorint(abs(n)).items()}
    assert prof.reconstruct() == n


@given(st.integers(1, 10**18))
def test_factor_reconstructs(n):
    prof = factor(n)
    assert prof.reconstruct() == n
    if prof.complete:
        assert all(sympy.isprime(p) for p in prof.factors)


def test_factor_rational_and_valuation():
    prof = factor_rational(Fraction(-88, 45))
    assert prof.factors == {2: 3, 3: -2, 5: -1, 11: 1}
    assert valuation(Fraction(88, 9), 2) == 3
    assert valuation(Fraction(88, 9), 3) == -2
    assert valuation(0, 7) == math.inf


def test_odd_part_and_squares():
    assert odd_part(88) == (3, 11)
    assert odd_part(-24) == (3, -3)
    assert is_pm_square(-49) and is_pm_square(36) and not is_pm_square(11)


@given(st.integers(1, 10**15).map(lambda x: x * 1), st.integers(1, 10**6))
def test_strip_common_is_exact(x, f):
    rest, removed = strip_common(x, f)
    assert rest * removed == x
    assert math.gcd(rest, f) == 1
    # removed is supported only on primes of f
    assert strip_common(removed, f)[0] == 1


def test_heights():
    assert height([Fraction(3, 4)]).exact == 4
    assert height([2, 6, 4]).exact == 3
    h = rad([1, 8, 9])
    assert h.exact == 6 and abs(h.value - math.log(6)) < 1e-12
    assert hgcd(12, Fraction(18, 5)).exact == 6
