"""Exact univariate polynomials and rational maps over the rationals.

Scalars are :class:`fractions.Fraction`, which is already canonical
(reduced, positive denominator, zero stored as 0/1).

Resultant convention used everywhere in the package::

    Res(p, q) = lc(p)**deg(q) * prod(q(r) for r in roots(p))

so Res(z - 2, z - 3) == -1 and Res(q, p) == (-1)**(deg p * deg q) * Res(p, q).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]

DEFAULT_DEGREE_CAP = 4096

# below this length schoolbook beats packing into one big integer
_KRONECKER_MIN = 24


class DegreeCapExceeded(ValueError):
    """An iterate would exceed the configured degree cap."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


# ---------------------------------------------------------------------------
# integer polynomial multiplication (Kronecker substitution)
# ---------------------------------------------------------------------------

def _pack(coeffs: Sequence[int], width: int) -> int:
    nbytes = width // 8
    return int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in coeffs), "little")


def int_poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Product of two integer coefficient lists (low to high)."""
    if not a or not b:
        return []
    if min(len(a), len(b)) < _KRONECKER_MIN:
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return out
    ma = max(abs(x) for x in a)
    mb = max(abs(y) for y in b)
    if ma == 0 or mb == 0:
        return [0] * (len(a) + len(b) - 1)
    bits = ma.bit_length() + mb.bit_length() + min(len(a), len(b)).bit_length() + 2
    width = (bits + 7) // 8 * 8
    A = _pack([max(x, 0) for x in a], width) - _pack([max(-x, 0) for x in a], width)
    B = _pack([max(y, 0) for y in b], width) - _pack([max(-y, 0) for y in b], width)
    n = len(a) + len(b) - 1
    nbytes = width // 8
    bias = int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * n, "little")
    raw = (A * B + bias).to_bytes(n * nbytes, "little")
    half = 1 << (width - 1)
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(n)]


# ---------------------------------------------------------------------------
# Poly
# ---------------------------------------------------------------------------

class Poly:
    """Dense polynomial in z with rational coefficients, stored low to high.

    The zero polynomial has an empty coefficient tuple and degree -1.
    Instances are immutable and hashable.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # construction helpers
    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @classmethod
    def z(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable[Scalar], lead: Scalar = 1) -> "Poly":
        p = cls.const(lead)
        for r in roots:
            p = p * cls((-_frac(r), 1))
        return p

    # basic properties
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({format_poly(self)!r})"

    def __str__(self) -> str:
        return format_poly(self)

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + (b[i] if i < len(b) else 0) for i, x in enumerate(a)])

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([c * other for c in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        if not self.coeffs or not other.coeffs:
            return Poly()
        da, ia = self.integer_form()
        db, ib = other.integer_form()
        den = da * db
        return Poly([Fraction(c, den) for c in int_poly_mul(ia, ib)])

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative exponent")
        result, base = Poly.const(1), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other: "Poly"):
        if not other.coeffs:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        lc = other.leading
        if len(rem) - 1 < dq:
            return Poly(), self
        quot = [Fraction(0)] * (len(rem) - dq)
        oc = other.coeffs
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i]
            if c:
                c = c / lc
                quot[i - dq] = c
                for j in range(dq + 1):
                    rem[i - dq + j] -= c * oc[j]
        return Poly(quot), Poly(rem[:dq])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def __call__(self, x):
        """Horner evaluation; works for any ring element supporting * and +."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return _frac(acc) if isinstance(acc, int) else acc

    # normal forms
    def monic(self) -> "Poly":
        if not self.coeffs:
            return self
        return self * (1 / self.leading)

    def integer_form(self) -> tuple[int, list[int]]:
        """Return (D, ints) with self == Poly(ints) / D and D > 0 minimal."""
        d = reduce(lcm, (c.denominator for c in self.coeffs), 1)
        return d, [c.numerator * (d // c.denominator) for c in self.coeffs]

    def primitive(self) -> tuple[Fraction, list[int]]:
        """Return (content, ints): self == content * Poly(ints), ints primitive, lc > 0."""
        if not self.coeffs:
            return Fraction(0), []
        d, ints = self.integer_form()
        g = reduce(gcd, ints, 0)
        if ints[-1] < 0:
            g = -g
        return Fraction(g, d), [c // g for c in ints]

    def to_json(self) -> list[str]:
        return [fraction_str(c) for c in self.coeffs]


def fraction_str(x: Fraction) -> str:
    x = _frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_poly(p: Poly, var: str = "z") -> str:
    if not p.coeffs:
        return "0"
    terms = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if i == 0:
            body = fraction_str(a)
        else:
            mono = var if i == 1 else f"{var}^{i}"
            if a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a.numerator}{mono}"
            else:
                body = f"({fraction_str(a)}){mono}"
        terms.append((sign, body))
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def poly_eval(p: Poly, x: Scalar) -> Fraction:
    return _frac(p(_frac(x)))


def derivative(p: Poly) -> Poly:
    return Poly([i * c for i, c in enumerate(p.coeffs)][1:])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over Q (zero if both inputs are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()


# ---------------------------------------------------------------------------
# resultant and discriminant
# ---------------------------------------------------------------------------

def resultant(p: Poly, q: Poly) -> Fraction:
    """Res(p, q) = lc(p)**deg(q) * prod q(roots of p), by Euclid over Q."""
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of the zero polynomial")
    acc = Fraction(1)
    while True:
        m, k = p.degree, q.degree
        if m == 0:
            return acc * p.leading ** k
        if k == 0:
            return acc * q.leading ** m
        if k < m:
            if (m * k) % 2:
                acc = -acc
            p, q = q, p
            continue
        # k >= m: q = s*p + r  =>  Res(p, q) = lc(p)**(k - deg r) * Res(p, r)
        r = q % p
        if r.is_zero():
            return Fraction(0)
        acc *= p.leading ** (k - r.degree)
        q = r


def discriminant(p: Poly) -> Fraction:
    """(-1)**(d(d-1)/2) * Res(p, p') / lc(p)."""
    d = p.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return Fraction(1)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * resultant(p, derivative(p)) / p.leading


# ---------------------------------------------------------------------------
# rational maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RatMap:
    """A rational map num/den in lowest terms.

    Canonical form: a polynomial map has den == 1; otherwise num and den have
    coprime integer coefficients with a positive leading coefficient on num.
    """

    num: Poly
    den: Poly

    @classmethod
    def make(cls, num: Poly, den: Poly) -> "RatMap":
        if den.is_zero():
            raise ValueError("rational map with zero denominator")
        if num.is_zero():
            return cls(Poly(), Poly.const(1))
        g = poly_gcd(num, den)
        if g.degree > 0:
            num, den = num // g, den // g
        if den.is_constant():
            return cls(num * (1 / den.leading), Poly.const(1))
        cn, n_ints = num.primitive()
        cd, d_ints = den.primitive()
        ratio = cn / cd
        # num/den == ratio * n_ints/d_ints; fold ratio into integer coprime pair
        n_out = [c * ratio.numerator for c in n_ints]
        d_out = [c * ratio.denominator for c in d_ints]
        g = reduce(gcd, n_out + d_out, 0)
        if n_out[-1] < 0:
            g = -g
        return cls(Poly([c // g for c in n_out]), Poly([c // g for c in d_out]))

    @classmethod
    def polynomial(cls, p: Poly) -> "RatMap":
        return cls(p, Poly.const(1))

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    @property
    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def __call__(self, x):
        """Evaluate at a rational or at INFINITY; poles return INFINITY."""
        if x is INFINITY:
            if self.num.degree > self.den.degree:
                return INFINITY
            if self.num.degree < self.den.degree:
                return Fraction(0)
            return self.num.leading / self.den.leading
        x = _frac(x)
        d = self.den(x)
        if d == 0:
            return INFINITY
        return self.num(x) / d

    def __str__(self) -> str:
        if self.is_polynomial:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json(), "text": str(self)}


class _Infinity:
    """The point at infinity of P^1(Q)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()


@dataclass(frozen=True)
class IteratePair:
    level: int
    P: Poly
    Q: Poly


def compose(outer: Poly, inner_num: Poly, inner_den: Poly, hom_degree: int | None = None) -> tuple[Poly, Poly]:
    """Homogeneous composition of ``outer`` with inner_num/inner_den.

    Returns (A, B) with A = sum a_i num**i den**(e - i) and B = den**e, where
    e = hom_degree (default deg outer). Then A/B == outer(num/den).
    """
    e = outer.degree if hom_degree is None else hom_degree
    if e < outer.degree:
        raise ValueError("homogenising degree below the polynomial degree")
    if outer.is_zero():
        return Poly(), inner_den ** max(e, 0)
    den_pows = [Poly.const(1)]
    for _ in range(e):
        den_pows.append(den_pows[-1] * inner_den)
    # Horner in homogeneous form: acc_k = acc_{k+1} * num + a_k * den**(e-k)
    acc = Poly.const(outer.coeffs[e]) if e <= outer.degree else Poly()
    for k in range(e - 1, -1, -1):
        a = outer.coeffs[k] if k <= outer.degree else 0
        acc = acc * inner_num
        if a:
            acc = acc + den_pows[e - k] * a
    return acc, den_pows[e]


def _coprime_fast(a: Poly, b: Poly) -> bool:
    """Cheap sufficient test for gcd(a, b) == 1 via reduction modulo a large prime."""
    p = 2305843009213693951  # 2**61 - 1
    def red(poly: Poly):
        d, ints = poly.integer_form()
        if d % p == 0:
            return None
        return [c % p for c in ints]
    ra, rb = red(a), red(b)
    if ra is None or rb is None or ra[-1] == 0 or rb[-1] == 0:
        return False
    from .modp import gcd_mod_list
    return len(gcd_mod_list(ra, rb, p)) == 1


def iterate(f: RatMap, n: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> IteratePair:
    """f^n = P_n/Q_n by repeated homogeneous composition, without rescaling.

    P_n = P_1^h(P_{n-1}, Q_{n-1}) and Q_n = Q_1^h(P_{n-1}, Q_{n-1}), where the
    homogenising degree is deg f. This keeps the recursions' normalisation
    (for the f_b family, Q_n = 2(b-1) P_{n-1} Q_{n-1}).
    """
    if n < 1:
        raise ValueError("iterate needs n >= 1")
    d = f.degree
    if d >= 2 and d ** n > degree_cap:
        raise DegreeCapExceeded(f"degree {d}^{n} exceeds cap {degree_cap}")
    P, Q = f.num, f.den
    for level in range(2, n + 1):
        if f.is_polynomial:
            P = compose(f.num, P, Q)[0]
        else:
            P, Q = (compose(f.num, P, Q, d)[0], compose(f.den, P, Q, d)[0])
            if not _coprime_fast(P, Q):
                g = poly_gcd(P, Q)
                if g.degree > 0:
                    P, Q = P // g, Q // g
    return IteratePair(n, P, Q)


def wronskian(f: RatMap) -> Poly:
    """c = Q_1 P_1' - P_1 Q_1'; its roots are the finite critical points."""
    return f.den * derivative(f.num) - f.num * derivative(f.den)


def normalize_pair(P: Poly, Q: Poly) -> tuple[Poly, Poly]:
    """Scale (P, Q) so that Q is monic; used to compare pairs up to a scalar."""
    s = 1 / Q.leading
    return P * s, Q * s
