"""Integer factorisation, p-adic valuations, square tests and heights over Q."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterator, Sequence

DEFAULT_TRIAL_BOUND = 10**6
DEFAULT_RHO_EFFORT = 2**20


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def primes_up_to(n: int) -> tuple[int, ...]:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i::i] = bytearray(len(range(i * i, n + 1, i)))
    return tuple(i for i, v in enumerate(sieve) if v)


def primes_between(lo: int, hi: int) -> Iterator[int]:
    """Primes p with lo <= p <= hi."""
    for p in primes_up_to(hi):
        if p >= lo:
            yield p


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin; deterministic below 3.3e24, probabilistic above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < 3317044064679887385961981 else _MR_BASES + (43, 47, 53, 59, 61, 67, 71)
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def pollard_rho(n: int, effort: int, seed: int = 1) -> int | None:
    """Brent's variant; returns a nontrivial factor of composite n or None."""
    if n % 2 == 0:
        return 2
    rng = random.Random(seed)
    spent = 0
    while spent < effort:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1 and spent < effort:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            spent += r
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


# ---------------------------------------------------------------------------
# valuations
# ---------------------------------------------------------------------------

def int_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    n = abs(n)
    v = 0
    # strip large powers first so huge values stay cheap
    pk, k = p, 1
    while n % pk == 0:
        n //= pk
        v += k
        if pk.bit_length() < 4096:
            pk, k = pk * pk, k * 2
    while n % p == 0:
        n //= p
        v += 1
    return v


def valuation(x, p: int) -> int | float:
    """v_p(x) for rational x; math.inf for x == 0."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    return _split_valuation(x.numerator, p) - _split_valuation(x.denominator, p)


def _split_valuation(n: int, p: int) -> int:
    return 0 if n % p else int_valuation(n, p)


def odd_part(n: int) -> tuple[int, int]:
    """Return (v, u) with n = 2**v * u and u odd (n != 0)."""
    if n == 0:
        raise ValueError("odd part of zero")
    v = (n & -n).bit_length() - 1
    return v, n >> v


def strip_common(x: int, forbidden: int) -> tuple[int, int]:
    """Remove from x every prime dividing ``forbidden``; return (rest, removed).

    rest is coprime to forbidden and x == rest * removed. No factoring needed.
    """
    if x == 0:
        raise ValueError("strip of zero")
    removed = 1
    g = math.gcd(x, forbidden)
    while g > 1:
        while x % g == 0:
            x //= g
            removed *= g
        g = math.gcd(x, g)
        if g == 1:
            g = math.gcd(x, forbidden)
    return x, removed


# ---------------------------------------------------------------------------
# factorisation
# ---------------------------------------------------------------------------

@dataclass
class ValuationProfile:
    """value == prod(p**e) * cofactor_num / cofactor_den, exactly."""

    value: Fraction
    factors: dict[int, int] = field(default_factory=dict)
    cofactor_num: int = 1
    cofactor_den: int = 1
    cofactor_status: str = "unit"  # unit | composite

    def reconstruct(self) -> Fraction:
        out = Fraction(self.cofactor_num, self.cofactor_den)
        for p, e in self.factors.items():
            out *= Fraction(p) ** e
        return out

    @property
    def complete(self) -> bool:
        return abs(self.cofactor_num) == 1 and self.cofactor_den == 1

    def to_json(self) -> dict:
        return {
            "value": str(self.value),
            "factors": {str(p): e for p, e in sorted(self.factors.items())},
            "cofactor": f"{self.cofactor_num}/{self.cofactor_den}" if self.cofactor_den != 1 else str(self.cofactor_num),
            "cofactor_status": self.cofactor_status,
        }


_BLOCK = 512


@lru_cache(maxsize=8)
def _prime_blocks(bound: int) -> tuple[tuple[int, tuple[int, ...]], ...]:
    ps = primes_up_to(bound)
    return tuple((math.prod(ps[i:i + _BLOCK]), ps[i:i + _BLOCK]) for i in range(0, len(ps), _BLOCK))


def _trial_divide(n: int, bound: int, out: dict[int, int]) -> int:
    """Strip every prime <= bound from n (n > 0); gcd against block products."""
    for prod, block in _prime_blocks(bound):
        if n == 1:
            break
        g = math.gcd(n, prod)
        if g == 1:
            continue
        for p in block:
            if g % p == 0:
                e = int_valuation(n, p)
                out[p] = out.get(p, 0) + e
                n //= p ** e
    return n


def _split_cofactor(n: int, effort: int, out: dict[int, int]) -> tuple[int, str]:
    """Factor n > 1 (no small primes) with Miller-Rabin and rho; return the unsplit rest."""
    stack = [n]
    rest = 1
    statuses = []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack.extend((r, r))
            continue
        d = pollard_rho(m, effort)
        if d is None:
            rest *= m
            statuses.append("composite")
        else:
            stack.extend((d, m // d))
    return rest, ("composite" if statuses else "unit")


def factor(n: int, trial_bound: int = DEFAULT_TRIAL_BOUND, effort: int = DEFAULT_RHO_EFFORT) -> ValuationProfile:
    """Factor a nonzero integer as far as the effort budget allows.

    Factors above 3.3e24 are Miller-Rabin probable primes; they are
    recorded in ``factors`` all the same. Whatever rho cannot split is left
    in the cofactor with status "composite".
    """
    if n == 0:
        raise ValueError("cannot factor zero")
    out: dict[int, int] = {}
    sign = -1 if n < 0 else 1
    m = _trial_divide(abs(n), trial_bound, out)
    status = "unit"
    rest = 1
    if m > 1:
        rest, status = _split_cofactor(m, effort, out)
    return ValuationProfile(Fraction(n), dict(sorted(out.items())), sign * rest, 1, status)


def factor_rational(x, trial_bound: int = DEFAULT_TRIAL_BOUND, effort: int = DEFAULT_RHO_EFFORT) -> ValuationProfile:
    x = Fraction(x)
    num = factor(x.numerator, trial_bound, effort)
    den = factor(x.denominator, trial_bound, effort)
    fs = dict(num.factors)
    for p, e in den.factors.items():
        fs[p] = fs.get(p, 0) - e
    statuses = {num.cofactor_status, den.cofactor_status}
    status = "composite" if "composite" in statuses else "unit"
    return ValuationProfile(x, dict(sorted(fs.items())), num.cofactor_num, den.cofactor_num, status)


# ---------------------------------------------------------------------------
# squares
# ---------------------------------------------------------------------------

def is_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def is_pm_square(n: int) -> bool:
    """True iff n == y**2 or n == -y**2 for an integer y."""
    return is_square(abs(n))


def is_rational_square(x) -> bool:
    x = Fraction(x)
    return is_square(x.numerator) and is_square(x.denominator)


# ---------------------------------------------------------------------------
# heights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightValue:
    """A logarithmic height. ``value`` is a float; ``exact`` is the integer N with value == log N."""

    value: float
    provenance: str  # "exact-log-of-integer" | "sum-of-logs"
    exact: int

    def to_json(self) -> dict:
        return {"value": self.value, "provenance": self.provenance, "exp_value": str(self.exact)}


def _log(n: int) -> float:
    # math.log accepts arbitrarily large ints
    return math.log(n) if n > 1 else 0.0


def height(values: Sequence) -> HeightValue:
    """Height of a tuple over Q; a single value z is read as the point (1, z).

    For integers a_i with gcd g after clearing denominators this is
    log(max |a_i| / g).
    """
    vals = [Fraction(v) for v in values]
    if not vals:
        raise ValueError("height of an empty tuple")
    if len(vals) == 1:
        vals = [Fraction(1)] + vals
    if all(v == 0 for v in vals):
        raise ValueError("height of the zero tuple")
    den = reduce(math.lcm, (v.denominator for v in vals), 1)
    ints = [v.numerator * (den // v.denominator) for v in vals]
    g = reduce(math.gcd, ints, 0)
    top = max(abs(a) for a in ints) // g
    return HeightValue(_log(top), "exact-log-of-integer", top)


def rad(values: Sequence, trial_bound: int = DEFAULT_TRIAL_BOUND, effort: int = DEFAULT_RHO_EFFORT) -> HeightValue:
    """Sum of log p over primes p at which the valuations of the values are not all equal."""
    vals = [Fraction(v) for v in values]
    if len(vals) < 2:
        raise ValueError("rad needs at least two values")
    if any(v == 0 for v in vals):
        raise ValueError("rad of a tuple containing zero")
    # p is in the set iff p divides the numerator or denominator of some v_j / v_0
    support = 1
    for v in vals[1:]:
        r = v / vals[0]
        support *= abs(r.numerator) * r.denominator
    if support == 1:
        return HeightValue(0.0, "sum-of-logs", 1)
    prof = factor(support, trial_bound, effort)
    if not prof.complete:
        raise ArithmeticError("could not factor the support of rad completely")
    primes = list(prof.factors)
    return HeightValue(math.fsum(_log(p) for p in primes), "sum-of-logs", math.prod(primes))


def hgcd(a, b) -> HeightValue:
    """Generalised gcd height: sum_p min(v_p(a)^+, v_p(b)^+) log p == log gcd(num a, num b)."""
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("hgcd of zero")
    g = math.gcd(a.numerator, b.numerator)
    return HeightValue(_log(g), "exact-log-of-integer", g)
