"""Valuations of iterate values by truncated p-adic iteration.

A map f = P/Q of degree d is lifted to the homogeneous pair
F(X, Y) = Y^d P(X/Y), G(X, Y) = Y^d Q(X/Y), scaled by one common integer
so both have integer coefficients. Starting from gamma = a/b as (a, b),
the pair (X_m, Y_m) = (F, G)(X_{m-1}, Y_{m-1}) satisfies f^m(gamma) = X_m / Y_m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from .exact import INFINITY, RatMap

DEFAULT_START_PRECISION = 32
DEFAULT_PRECISION_CEILING = 4096
# exact fallback is attempted only while orbit values stay below this many bits
_EXACT_FALLBACK_BITS = 1 << 20


class IterateIsZero(ArithmeticError):
    """f^n(gamma) is exactly 0, so its valuation is +infinity."""


class IterateIsPole(ArithmeticError):
    """f^n(gamma) is infinity."""


@dataclass(frozen=True)
class HomogeneousLift:
    F: tuple[int, ...]  # coefficient of X^i Y^(d-i) at index i
    G: tuple[int, ...]
    degree: int

    def step(self, X: int, Y: int, m: int | None = None) -> tuple[int, int]:
        """One homogeneous step, reduced mod m when m is given."""
        d = self.degree
        xs = [1] * (d + 1)
        ys = [1] * (d + 1)
        for i in range(1, d + 1):
            xs[i] = xs[i - 1] * X
            ys[i] = ys[i - 1] * Y
            if m is not None:
                xs[i] %= m
                ys[i] %= m
        A = sum(c * xs[i] * ys[d - i] for i, c in enumerate(self.F) if c)
        B = sum(c * xs[i] * ys[d - i] for i, c in enumerate(self.G) if c)
        if m is not None:
            return A % m, B % m
        return A, B


def homogeneous_lift(f: RatMap) -> HomogeneousLift:
    d = f.degree
    coeffs = list(f.num.coeffs) + list(f.den.coeffs)
    D = reduce(math.lcm, (c.denominator for c in coeffs), 1)

    def ints(p):
        out = [0] * (d + 1)
        for i, c in enumerate(p.coeffs):
            out[i] = c.numerator * (D // c.denominator)
        return out

    F, G = ints(f.num), ints(f.den)
    g = reduce(math.gcd, F + G, 0)
    return HomogeneousLift(tuple(c // g for c in F), tuple(c // g for c in G), d)


def start_pair(gamma) -> tuple[int, int]:
    gamma = Fraction(gamma)
    return gamma.numerator, gamma.denominator


def _val_mod(x: int, p: int, prec: int) -> int:
    """Valuation of a residue mod p**prec; prec when x == 0."""
    if x == 0:
        return prec
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _try_precision(lift: HomogeneousLift, gamma: Fraction, n: int, p: int, prec: int) -> int | None:
    """Projective iteration mod p**prec, stripping common powers of p each step."""
    X, Y = start_pair(gamma)
    mod = p ** prec
    X, Y = X % mod, Y % mod
    for _ in range(n):
        X, Y = lift.step(X, Y, mod)
        vx, vy = _val_mod(X, p, prec), _val_mod(Y, p, prec)
        e = min(vx, vy)
        if e >= prec:
            return None
        if e:
            pe = p ** e
            X, Y, prec = X // pe, Y // pe, prec - e
            mod = p ** prec
            X, Y = X % mod, Y % mod
    vx, vy = _val_mod(X, p, prec), _val_mod(Y, p, prec)
    if vx >= prec or vy >= prec:
        return None
    return vx - vy


def exact_orbit(f: RatMap, gamma, n: int, bit_limit: int | None = None) -> list:
    """[gamma, f(gamma), ..., f^n(gamma)] exactly; INFINITY propagates.

    Returns None when a value exceeds bit_limit bits.
    """
    out = [Fraction(gamma)]
    x = out[0]
    for _ in range(n):
        x = f(x)
        out.append(x)
        if bit_limit is not None and x is not INFINITY:
            if x.numerator.bit_length() + x.denominator.bit_length() > bit_limit:
                return None
    return out


def valuation_of_iterate(
    f: RatMap,
    gamma,
    n: int,
    p: int,
    start_precision: int = DEFAULT_START_PRECISION,
    ceiling: int = DEFAULT_PRECISION_CEILING,
) -> int | None:
    """v_p(f^n(gamma)) without building f^n(gamma); None means Unknown.

    Precision starts at p**start_precision and doubles up to p**ceiling.
    Reaching the ceiling returns None unless the orbit is small enough to
    evaluate exactly, in which case the exact value decides (raising
    IterateIsZero or IterateIsPole where appropriate).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    gamma = Fraction(gamma)
    lift = homogeneous_lift(f)
    prec = start_precision
    while True:
        v = _try_precision(lift, gamma, n, p, prec)
        if v is not None:
            return v
        if prec >= ceiling:
            break
        prec = min(prec * 2, ceiling)
    orbit = exact_orbit(f, gamma, n, _EXACT_FALLBACK_BITS)
    if orbit is None:
        return None
    if orbit[-1] is INFINITY:
        raise IterateIsPole(f"f^{n}({gamma}) is infinity")
    if orbit[-1] == 0:
        raise IterateIsZero(f"f^{n}({gamma}) = 0")
    # a nonzero value needing more than the ceiling is a huge power of p
    from .ntheory import valuation
    return valuation(orbit[-1], p)


def raw_homogeneous_valuation(
    lift: HomogeneousLift,
    gamma,
    n: int,
    p: int,
    which: int = 0,
    start_precision: int = DEFAULT_START_PRECISION,
    ceiling: int = DEFAULT_PRECISION_CEILING,
) -> int | None:
    """v_p of X_n (which=0) or Y_n (which=1) without stripping; None = Unknown.

    For a canonical integer map, P_n(a/b) = X_n / b^(d^n) and likewise for Q_n.
    """
    gamma = Fraction(gamma)
    prec = start_precision
    while True:
        mod = p ** prec
        X, Y = start_pair(gamma)
        X, Y = X % mod, Y % mod
        for _ in range(n):
            X, Y = lift.step(X, Y, mod)
        r = (X, Y)[which]
        if r:
            return _val_mod(r, p, prec)
        if prec >= ceiling:
            return None
        prec = min(prec * 2, ceiling)


def raw_homogeneous_orbit(lift: HomogeneousLift, gamma, n: int) -> list[tuple[int, int]]:
    """Exact raw pairs (X_m, Y_m) for m = 0..n."""
    X, Y = start_pair(gamma)
    out = [(X, Y)]
    for _ in range(n):
        X, Y = lift.step(X, Y)
        out.append((X, Y))
    return out


def orbit_residues(lift: HomogeneousLift, gamma, n: int, modulus: int) -> list[tuple[int, int]]:
    """Raw pairs (X_m, Y_m) mod modulus for m = 0..n."""
    X, Y = start_pair(gamma)
    X, Y = X % modulus, Y % modulus
    out = [(X, Y)]
    for _ in range(n):
        X, Y = lift.step(X, Y, modulus)
        out.append((X, Y))
    return out


def denominator_primes_product(f: RatMap, *points) -> int:
    """Product of the denominators of f's coefficients and of the given points."""
    out = 1
    for c in list(f.num.coeffs) + list(f.den.coeffs):
        out = math.lcm(out, c.denominator)
    for x in points:
        out = math.lcm(out, Fraction(x).denominator)
    return out
