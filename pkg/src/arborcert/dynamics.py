"""Critical points, orbits, post-critical finiteness, collisions, stability and iterate discriminants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .exact import INFINITY, Poly, RatMap, derivative, discriminant, fraction_str, iterate, wronskian
from .padic import homogeneous_lift
from .polyfactor import (
    DEFAULT_DEGREE_CAP,
    FactorizationCapExceeded,
    composition_witness,
    factor_over_q,
    _compose_poly,
)

DEFAULT_MAX_STEPS = 64
DEFAULT_ORBIT_BITS = 1 << 22


class IrrationalCriticalPoints(ValueError):
    pass


class DegreeError(ValueError):
    pass


def require_degree(f: RatMap, allowed=(2, 3)) -> None:
    if f.degree not in allowed:
        raise DegreeError(f"map of degree {f.degree}; need degree in {sorted(allowed)}")


def value_str(x) -> str:
    return "inf" if x is INFINITY else fraction_str(Fraction(x))


# ---------------------------------------------------------------------------
# critical points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CriticalData:
    points: tuple[Fraction, ...]
    multiplicities: tuple[int, ...]
    infinity_critical: bool = False  # only meaningful for non-polynomial maps

    def to_json(self) -> dict:
        return {
            "points": [fraction_str(x) for x in self.points],
            "multiplicities": list(self.multiplicities),
            "infinity_critical": self.infinity_critical,
        }


def rational_roots(p: Poly) -> tuple[list[tuple[Fraction, int]], bool]:
    """Rational roots with multiplicities, and whether every root is rational."""
    if p.degree <= 0:
        return [], True
    fac = factor_over_q(p)
    roots = []
    all_rational = fac.complete
    for g, e in fac.factors:
        if g.degree == 1:
            roots.append((-g.coeffs[0] / g.coeffs[1], e))
        else:
            all_rational = False
    return sorted(roots), all_rational


def critical_points(f: RatMap) -> CriticalData:
    """Finite critical points: roots of f' (polynomials) or of the wronskian (rational maps)."""
    require_degree(f)
    c = derivative(f.num) if f.is_polynomial else wronskian(f)
    roots, ok = rational_roots(c)
    if not ok:
        raise IrrationalCriticalPoints(f"critical points of {f} are not all rational")
    inf_crit = False
    if not f.is_polynomial:
        # 2d - 2 critical points in total; the shortfall sits at infinity
        inf_crit = c.degree < 2 * f.degree - 2
    return CriticalData(tuple(r for r, _ in roots), tuple(e for _, e in roots), inf_crit)


# ---------------------------------------------------------------------------
# escape criteria
# ---------------------------------------------------------------------------

def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over Q for a square nonsingular system."""
    n = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular system")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                m = a[r][col]
                a[r] = [x - m * y for x, y in zip(a[r], a[col])]
    return [a[r][n] for r in range(n)]


@dataclass(frozen=True)
class EscapeTest:
    """Sound tests that an orbit point has infinite forward orbit.

    ``poly_bound``: for a polynomial map, |x| > bound forces |f(x)| > |x|.
    ``height_constant``: for any map, H(x)^(d-1) > height_constant forces
    H(f(x)) > H(x), where H(a/b) = max(|a|, |b|) in lowest terms.
    """

    degree: int
    poly_bound: Fraction | None
    height_constant: Fraction

    def escapes(self, x) -> bool:
        if x is INFINITY:
            return False
        x = Fraction(x)
        if self.poly_bound is not None and abs(x) > self.poly_bound:
            return True
        H = max(abs(x.numerator), x.denominator)
        return H ** (self.degree - 1) > self.height_constant


def escape_test(f: RatMap) -> EscapeTest:
    d = f.degree
    bound = None
    if f.is_polynomial:
        a = f.num.coeffs
        bound = max(Fraction(1), (1 + sum(abs(c) for c in a[:-1])) / abs(a[-1]))
    lift = homogeneous_lift(f)
    F, G = Poly(lift.F), Poly(lift.G)
    # A0*F + A1*G = z^(2d-1) and B0*F + B1*G = 1 in dehomogenised form, deg A_i, B_i <= d-1
    size = 2 * d
    cols = []
    for shift in range(d):
        cols.append([F.coeffs[k - shift] if 0 <= k - shift <= F.degree else Fraction(0) for k in range(size)])
    for shift in range(d):
        cols.append([G.coeffs[k - shift] if 0 <= k - shift <= G.degree else Fraction(0) for k in range(size)])
    matrix = [[cols[j][i] for j in range(size)] for i in range(size)]
    kappa = Fraction(0)
    den = 1
    for target in (size - 1, 0):
        rhs = [Fraction(1 if i == target else 0) for i in range(size)]
        sol = _solve(matrix, rhs)
        kappa = max(kappa, sum(abs(c) for c in sol))
        den = reduce(math.lcm, (c.denominator for c in sol), den)
    return EscapeTest(d, bound, kappa * den)


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

@dataclass
class OrbitRecord:
    start: Fraction
    values: list  # Fraction or INFINITY, values[k] = f^k(start)
    status: str  # preperiodic | escaping | truncated
    tail: int | None = None
    cycle: int | None = None
    escape_step: int | None = None

    @property
    def is_periodic(self) -> bool:
        return self.status == "preperiodic" and self.tail == 0

    def to_json(self) -> dict:
        out = {"start": value_str(self.start), "values": [value_str(v) for v in self.values], "status": self.status}
        if self.status == "preperiodic":
            out["tail"] = self.tail
            out["cycle"] = self.cycle
        if self.status == "escaping":
            out["escape_step"] = self.escape_step
        return out


def orbit(f: RatMap, x0, max_steps: int = DEFAULT_MAX_STEPS, bit_limit: int = DEFAULT_ORBIT_BITS) -> OrbitRecord:
    """Forward orbit until a repeat, a proven escape, or max_steps."""
    test = escape_test(f)
    x = x0 if x0 is INFINITY else Fraction(x0)
    values = [x]
    seen = {x: 0}
    for step in range(max_steps + 1):
        if test.escapes(x):
            return OrbitRecord(values[0], values, "escaping", escape_step=step)
        if step == max_steps:
            break
        x = f(x)
        if x in seen:
            t = seen[x]
            values.append(x)
            return OrbitRecord(values[0], values, "preperiodic", tail=t, cycle=step + 1 - t)
        seen[x] = step + 1
        values.append(x)
        if x is not INFINITY and x.numerator.bit_length() + x.denominator.bit_length() > bit_limit:
            break
    return OrbitRecord(values[0], values, "truncated")


def critical_orbits(f: RatMap, max_steps: int = DEFAULT_MAX_STEPS) -> list[OrbitRecord]:
    crit = critical_points(f)
    starts = list(crit.points)
    if crit.infinity_critical:
        starts.append(INFINITY)
    return [orbit(f, g, max_steps) for g in starts]


def is_pcf(f: RatMap, max_steps: int = DEFAULT_MAX_STEPS) -> str:
    """'PCF', 'NotPCF' or 'Unknown'."""
    orbits = critical_orbits(f, max_steps)
    if any(o.status == "escaping" for o in orbits):
        return "NotPCF"
    if all(o.status == "preperiodic" for o in orbits):
        return "PCF"
    return "Unknown"


# ---------------------------------------------------------------------------
# collisions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CollisionReport:
    gamma1: Fraction
    gamma2: Fraction
    aligned: int | None  # smallest r >= 1 with f^r(g1) == f^r(g2)
    offset: tuple[int, int] | None  # smallest (i, j), i != j, with f^i(g1) == f^j(g2)
    checked_to: int

    def to_json(self) -> dict:
        return {
            "gamma1": fraction_str(self.gamma1),
            "gamma2": fraction_str(self.gamma2),
            "aligned_r": self.aligned,
            "offset": list(self.offset) if self.offset else None,
            "checked_to": self.checked_to,
        }


def collision(f: RatMap, r_max: int = 10, bit_limit: int = DEFAULT_ORBIT_BITS) -> CollisionReport:
    """Aligned and offset relations between the two finite critical orbits."""
    crit = critical_points(f)
    if len(crit.points) != 2:
        raise ValueError("collision needs exactly two distinct finite critical points")
    g1, g2 = crit.points
    o1, o2 = [g1], [g2]
    checked = 0
    for _ in range(r_max):
        a, b = f(o1[-1]), f(o2[-1])
        o1.append(a)
        o2.append(b)
        checked += 1
        if any(v is not INFINITY and v.numerator.bit_length() > bit_limit for v in (a, b)):
            break
    aligned = next((r for r in range(1, len(o1)) if o1[r] == o2[r]), None)
    offset = None
    for s in range(len(o1) + len(o2)):
        for i in range(0, s + 1):
            j = s - i
            if i != j and i < len(o1) and j < len(o2) and o1[i] == o2[j]:
                offset = (i, j)
                break
        if offset:
            break
    return CollisionReport(g1, g2, aligned, offset, checked)


# ---------------------------------------------------------------------------
# eventual stability
# ---------------------------------------------------------------------------

@dataclass
class StabilityLevel:
    n: int
    factor_count: int | None
    factor_degrees: list[int] | None
    method: str  # witness | factorization | inconclusive

    def to_json(self) -> dict:
        return {"n": self.n, "factor_count": self.factor_count, "factor_degrees": self.factor_degrees, "method": self.method}


@dataclass
class StabilityReport:
    levels: list[StabilityLevel]
    verdict: str  # StableBy | GrowingCounts | Inconclusive
    stable_from: int | None = None
    factors: dict[int, list[tuple[Poly, int]]] = field(default_factory=dict, repr=False)

    def count(self, n: int) -> int | None:
        for lv in self.levels:
            if lv.n == n:
                return lv.factor_count
        return None

    def to_json(self) -> dict:
        return {
            "levels": [lv.to_json() for lv in self.levels],
            "verdict": self.verdict,
            "stable_from": self.stable_from,
        }


def _stability_verdict(counts: list[int]) -> tuple[str, int | None]:
    if len(counts) >= 3 and counts[-3] < counts[-2] < counts[-1]:
        return "GrowingCounts", None
    if len(counts) >= 3:
        start = len(counts) - 1
        while start > 0 and counts[start - 1] == counts[-1]:
            start -= 1
        if len(counts) - start >= 3:
            return "StableBy", start + 1
    return "Inconclusive", None


def stability_report(f, n_max: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> StabilityReport:
    """Factor f^n over Q for n = 1..n_max, refining level by level.

    Each irreducible factor g of f^(n-1) gives the factor g(f(x)) of f^n;
    it is shown irreducible by a local witness when possible and factored
    outright otherwise.
    """
    if isinstance(f, RatMap):
        if not f.is_polynomial:
            raise ValueError("stability_report needs a polynomial map")
        p = f.num
    else:
        p = f
    if p.degree < 2:
        raise DegreeError("stability_report needs degree >= 2")
    witness_ok = p.leading == 1 and p.degree in (2, 3)
    levels: list[StabilityLevel] = []
    factors: dict[int, list[tuple[Poly, int]]] = {}
    prev: list[tuple[Poly, int]] | None = [(Poly.z(), 1)]
    for n in range(1, n_max + 1):
        deg = p.degree ** n
        if deg > degree_cap or prev is None:
            levels.append(StabilityLevel(n, None, None, "inconclusive"))
            prev = None
            continue
        current: list[tuple[Poly, int]] = []
        method = "witness"
        ok = True
        for g, e in prev:
            comp = _compose_poly(g, p)
            if witness_ok and composition_witness(g, p) is not None:
                current.append((comp, e))
                continue
            method = "factorization"
            try:
                fac = factor_over_q(comp, degree_cap)
            except FactorizationCapExceeded:
                ok = False
                break
            if not fac.complete:
                ok = False
                break
            for h, k in fac.factors:
                current.append((h.monic(), e * k))
        if not ok:
            levels.append(StabilityLevel(n, None, None, "inconclusive"))
            prev = None
            continue
        merged: dict[Poly, int] = {}
        for h, e in current:
            merged[h] = merged.get(h, 0) + e
        current = sorted(merged.items(), key=lambda t: (t[0].degree, t[0].coeffs))
        factors[n] = current
        degrees = sorted(h.degree for h, e in current for _ in range(e))
        levels.append(StabilityLevel(n, len(degrees), degrees, method))
        prev = current
    counts = []
    for lv in levels:
        if lv.factor_count is None:
            break
        counts.append(lv.factor_count)
    verdict, start = _stability_verdict(counts)
    return StabilityReport(levels, verdict, start, factors)


# ---------------------------------------------------------------------------
# discriminants of iterates
# ---------------------------------------------------------------------------

def disc_iterate_formula(f: Poly, n: int, t) -> Fraction:
    """Disc(f^n - t) from the critical orbit of f.

    With d = deg f, D = d^n and alpha the leading coefficient of f:
    Disc(f^n - t) = (-1)^((D-1)(D-2)/2) D^D alpha^((D-1)^2/(d-1))
                    * prod_b prod_{i=1..n} (t - f^i(b))^(e(b) d^(n-i)),
    b running over the critical points with multiplicity e(b).
    """
    if isinstance(f, RatMap):
        if not f.is_polynomial:
            raise ValueError("disc_iterate needs a polynomial")
        f = f.num
    d = f.degree
    if d < 2:
        raise DegreeError("disc_iterate needs degree >= 2")
    roots, ok = rational_roots(derivative(f))
    if not ok:
        raise IrrationalCriticalPoints("the formula route needs rational critical points")
    t = Fraction(t)
    D = d ** n
    sign = -1 if ((D - 1) * (D - 2) // 2) % 2 else 1
    out = Fraction(sign) * Fraction(D) ** D * f.leading ** ((D - 1) ** 2 // (d - 1))
    for b, e in roots:
        x = b
        for i in range(1, n + 1):
            x = f(x)
            out *= (t - x) ** (e * d ** (n - i))
    return out


def disc_iterate_unweighted(f: Poly, n: int, t) -> Fraction:
    """The same product without the d^(n-i) weights and with alpha^((D-1)/(d-1)); kept for comparison."""
    d = f.degree
    roots, ok = rational_roots(derivative(f))
    if not ok:
        raise IrrationalCriticalPoints("needs rational critical points")
    t = Fraction(t)
    D = d ** n
    sign = -1 if ((D - 1) * (D - 2) // 2) % 2 else 1
    out = Fraction(sign) * Fraction(d) ** (n * D) * f.leading ** ((D - 1) // (d - 1))
    for b, e in roots:
        x = b
        for _ in range(n):
            x = f(x)
            out *= (t - x) ** e
    return out


ORACLE_DEGREE_CAP = 256


def disc_iterate_oracle(f: Poly, n: int, t) -> Fraction:
    """Disc(f^n - t) by building f^n and taking a resultant."""
    if isinstance(f, RatMap):
        f = f.num
    if f.degree ** n > ORACLE_DEGREE_CAP:
        raise FactorizationCapExceeded(f"degree {f.degree}^{n} exceeds oracle cap {ORACLE_DEGREE_CAP}")
    fn = iterate(RatMap.polynomial(f), n).P
    return discriminant(fn - Fraction(t))


def cubic_disc_identity(f: Poly, n: int) -> bool:
    """|Disc f^n| == |3^(3^n) Disc(f^(n-1))^3 f^n(g1) f^n(g2)| for a monic cubic, n >= 2."""
    if isinstance(f, RatMap):
        f = f.num
    if f.degree != 3 or f.leading != 1:
        raise ValueError("needs a monic cubic")
    if n < 2:
        raise ValueError("identity is stated for n >= 2")
    roots, ok = rational_roots(derivative(f))
    if not ok or len(roots) != 2:
        raise IrrationalCriticalPoints("needs two distinct rational critical points")
    fm = RatMap.polynomial(f)
    lhs = disc_iterate_oracle(f, n, 0)
    prev = disc_iterate_oracle(f, n - 1, 0)
    rhs = Fraction(3) ** (3 ** n) * prev ** 3
    for b, _ in roots:
        x = b
        for _ in range(n):
            x = fm(x)
        rhs *= x
    return abs(lhs) == abs(rhs)
