"""Prime-valuation certificates of level maximality, obstructions and verdicts.

Three certificate families are supported:

* quadratic polynomials: a prime p != 2 with v_p(f_{N,j}(f^n(g))) = 1 for
  every factor f_{N,j} of f^N and v_p(f^m(g)) = 0 for 1 <= m < N + n;
* cubic polynomials with two rational critical points: v_p(f^n(g1)) odd,
  v_p(f^n(g2)) = 0, p != 3, and v_p(f^i(g1)) = v_p(f^i(g2)) = 0 for i < n,
  together with irreducibility of f^n;
* quadratic rational maps: v_p(P_n(g1) P_n(g2)) odd and p coprime to
  2, l(P_1), l(c), Res(Q_1, P_1), Disc(P_1) and P_j(g_i) for 2 <= j < n.

Level 1 is handled separately: for degree 2 it is maximal iff the numerator
is irreducible, for cubics iff f is irreducible with non-square discriminant.

Primes dividing a denominator of f or of a critical point are never used.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import INFINITY, Poly, RatMap, discriminant, fraction_str, iterate, resultant, wronskian
from .dynamics import (
    DegreeError,
    IrrationalCriticalPoints,
    collision,
    critical_points,
    is_pcf,
    orbit,
    stability_report,
    StabilityReport,
    critical_orbits,
)
from .ntheory import _prime_blocks, is_pm_square, is_rational_square, strip_common, valuation
from .padic import (
    homogeneous_lift,
    orbit_residues,
    raw_homogeneous_orbit,
    raw_homogeneous_valuation,
    valuation_of_iterate,
    exact_orbit,
)
from .polyfactor import DEFAULT_DEGREE_CAP, factor_over_q

DEFAULT_PRIME_BOUND = 10**6
DEFAULT_LEVELS = 6
DEFAULT_ORBIT_STEPS = 64
EXACT_BIT_LIMIT = 1 << 22
REVERIFY_DEGREE_CAP = 256

QUAD_POLY = "quad-poly"
CUBIC_POLY = "cubic-poly"
QUAD_RATMAP = "quad-ratmap"

EXPLICIT = "ExplicitPrime"
COFACTOR = "NonSquareCofactor"
BASE = "IrreducibleBase"


class HypothesisError(ValueError):
    """The map does not meet the hypotheses of the requested certificate."""


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

def _jsonable(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return v if abs(v) < 2 ** 53 else str(v)
    if isinstance(v, Fraction):
        return fraction_str(v)
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


@dataclass(frozen=True)
class Condition:
    name: str
    required: str
    observed: object
    holds: bool

    def to_json(self) -> dict:
        return {"name": self.name, "required": self.required, "value": _jsonable(self.observed), "holds": self.holds}


@dataclass
class Certificate:
    level: int
    conclusion: str
    mode: str
    conditions: list[Condition]
    prime: int | None = None
    critical_point: int | None = None  # index into the sorted critical points
    factor_index: int | None = None
    cofactor: int | None = None
    removed: int | None = None
    info: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(c.holds for c in self.conditions)

    def to_json(self) -> dict:
        out = {
            "level": self.level,
            "mode": self.mode,
            "conclusion": self.conclusion,
            "prime": _jsonable(self.prime),
            "critical_point": self.critical_point,
            "conditions": [c.to_json() for c in self.conditions],
        }
        if self.factor_index is not None:
            out["factor_index"] = self.factor_index
        if self.cofactor is not None:
            out["cofactor"] = str(self.cofactor)
            out["removed"] = str(self.removed)
        if self.info:
            out["info"] = {k: _jsonable(v) for k, v in sorted(self.info.items())}
        return out


@dataclass
class LevelResult:
    n: int
    status: str  # certified | gap | conditional
    certificates: list[Certificate] = field(default_factory=list)
    note: str | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "status": self.status}
        if self.certificates:
            first = self.certificates[0]
            out["prime"] = _jsonable(first.prime)
            out["mode"] = first.mode
            out["conditions"] = [c.to_json() for c in first.conditions]
            out["certificates"] = [c.to_json() for c in self.certificates]
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class Obstruction:
    kind: str  # UnicriticalHighDegree | PCF | Collision | DiscSquareCubic | RootPeriodic | GrowingCounts
    evidence: dict
    proven: bool  # False: finite-level evidence only

    def to_json(self) -> dict:
        return {"kind": self.kind, "proven": self.proven, "evidence": self.evidence}


OBSTRUCTION_PRIORITY = ["UnicriticalHighDegree", "PCF", "Collision", "DiscSquareCubic", "RootPeriodic", "GrowingCounts"]


@dataclass
class AnalysisReport:
    map_text: str
    degree: int
    kind: str | None
    n_max: int
    obstructions: list[Obstruction] = field(default_factory=list)
    levels: list[LevelResult] = field(default_factory=list)
    verdict: str = "Inconclusive"
    reason: str | None = None
    conditionality: str = ""
    unknowns: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def gaps(self) -> list[int]:
        return [lv.n for lv in self.levels if lv.status == "gap"]

    @property
    def certified_levels(self) -> list[int]:
        return [lv.n for lv in self.levels if lv.status == "certified"]

    def level(self, n: int) -> LevelResult | None:
        return next((lv for lv in self.levels if lv.n == n), None)

    def to_json(self) -> dict:
        out = {
            "map": self.map_text,
            "degree": self.degree,
            "kind": self.kind,
            "n_max": self.n_max,
            "obstructions": [o.to_json() for o in self.obstructions],
            "levels": [lv.to_json() for lv in self.levels],
            "gaps": self.gaps,
            "verdict": self.verdict,
            "reason": self.reason,
            "levels_certified": self.certified_levels,
            "conditionality": self.conditionality,
            "unknowns": self.unknowns,
        }
        out.update(self.extra)
        return out


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _den_product(f: RatMap, points) -> int:
    out = 1
    for c in list(f.num.coeffs) + list(f.den.coeffs):
        out *= c.denominator
    for x in points:
        out *= Fraction(x).denominator
    return out


def _int_parts(x: Fraction) -> int:
    x = Fraction(x)
    return abs(x.numerator) * x.denominator


def scan_blocks(prime_bound: int, forbidden: int):
    """Yield (M, primes) for primes <= prime_bound not dividing forbidden; M is their product."""
    if prime_bound < 2:
        return
    for M, block in _prime_blocks(prime_bound):
        if block[0] > prime_bound:
            break
        if block[-1] > prime_bound:
            block = tuple(p for p in block if p <= prime_bound)
            M = math.prod(block)
        g = math.gcd(M, forbidden) if forbidden else M
        if g > 1:
            block = tuple(p for p in block if g % p)
            M //= g
        if block:
            yield M, block


def _iterate_mod(lift, gamma, n: int, modulus: int) -> int:
    """f^n(gamma) mod modulus when every denominator is a unit mod modulus."""
    X, Y = orbit_residues(lift, gamma, n, modulus)[-1]
    return X * pow(Y, -1, modulus) % modulus


def _poly_mod(h: Poly, x: int, modulus: int) -> int:
    d, ints = h.integer_form()
    acc = 0
    for c in reversed(ints):
        acc = (acc * x + c) % modulus
    return acc * pow(d, -1, modulus) % modulus


def _valuation_of_poly_at_iterate(h: Poly, f: RatMap, gamma, n: int, p: int, ceiling: int = 4096) -> int | None:
    """v_p(h(f^n(gamma))) for p-integral data, by doubling p-adic precision."""
    lift = homogeneous_lift(f)
    prec = 32
    while True:
        mod = p ** prec
        r = _poly_mod(h, _iterate_mod(lift, gamma, n, mod), mod)
        if r:
            v = 0
            while r % p == 0:
                r //= p
                v += 1
            return v
        if prec >= ceiling:
            return None
        prec *= 2


def _vstr(v) -> object:
    return "unknown" if v is None else v


# ---------------------------------------------------------------------------
# quadratic polynomials
# ---------------------------------------------------------------------------

def _level_one_quadratic(num: Poly) -> LevelResult:
    disc = discriminant(num)
    ok = not is_rational_square(disc)
    cond = Condition("Disc(P_1) non-square", "not a square in Q", disc, ok)
    if ok:
        cert = Certificate(1, "[K_1:K_0]=2", BASE, [cond])
        return LevelResult(1, "certified", [cert])
    return LevelResult(1, "gap", note=f"numerator discriminant {fraction_str(disc)} is a square")


def _require_monic_poly(f: RatMap, degree: int) -> None:
    if not f.is_polynomial or f.degree != degree:
        raise HypothesisError(f"needs a polynomial of degree {degree}")
    if f.num.leading != 1:
        raise HypothesisError("needs a monic polynomial")


def certify_quadratic_poly(
    f: RatMap,
    n_max: int,
    prime_bound: int = DEFAULT_PRIME_BOUND,
    stability: StabilityReport | None = None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> list[LevelResult]:
    """Per-level certificates for a monic quadratic polynomial."""
    _require_monic_poly(f, 2)
    crit = critical_points(f)
    gamma = crit.points[0]
    if is_pcf(f) == "PCF":
        raise HypothesisError("map is post-critically finite")
    if stability is None:
        stability = stability_report(f, min(n_max, _levels_within(2, degree_cap)) or 1, degree_cap)
    if stability.verdict == "GrowingCounts":
        raise HypothesisError("factor counts of f^n are growing")
    known = sorted(stability.factors)
    N = stability.stable_from or (known[-1] if known else 1)
    lift = homogeneous_lift(f)
    forbidden = 2 * _den_product(f, [gamma]) * abs(lift.G[0]) * abs(lift.F[-1])
    results = [_level_one_quadratic(f.num)]
    for L in range(2, n_max + 1):
        NL = min(N, L)
        if NL not in stability.factors:
            results.append(LevelResult(L, "gap", note="factorisation of f^N unavailable"))
            continue
        n = L - NL
        factors = [g for g, _ in stability.factors[NL]]
        certs = []
        for j, h in enumerate(factors):
            cert = _scan_quadratic(f, lift, gamma, L, NL, n, j, h, len(factors), prime_bound, forbidden)
            if cert is None:
                break
            certs.append(cert)
        if len(certs) == len(factors):
            results.append(LevelResult(L, "certified", certs))
        else:
            results.append(LevelResult(L, "gap", note=f"no prime <= {prime_bound} satisfies the conditions"))
    return results[:n_max]


def _levels_within(d: int, cap: int) -> int:
    n = 0
    while d ** (n + 1) <= cap:
        n += 1
    return n


def _scan_quadratic(f, lift, gamma, L, NL, n, j, h, r, prime_bound, forbidden):
    hden = h.integer_form()[0]
    forb = forbidden * hden
    for M, block in scan_blocks(prime_bound, forb):
        res = orbit_residues(lift, gamma, L, M)
        if r == 1:
            target = res[L][0]
        else:
            X, Y = res[n]
            target = _poly_mod(h, X * pow(Y, -1, M) % M, M)
        g = math.gcd(target, M)
        if g == 1:
            continue
        for p in block:
            if g % p:
                continue
            if any(res[m][0] % p == 0 for m in range(1, L)):
                continue
            if r == 1:
                v = valuation_of_iterate(f, gamma, L, p)
            else:
                v = _valuation_of_poly_at_iterate(h, f, gamma, n, p)
            if v != 1:
                continue
            conds = [
                Condition(f"v_p(f_{{N,{j + 1}}}(f^{n}(gamma)))" if r > 1 else f"v_p(f^{L}(gamma))", "= 1", v, True),
                Condition(f"v_p(f^m(gamma)), 1<=m<{L}", "= 0", 0, True),
                Condition("v_p(2)", "= 0", 0, True),
            ]
            return Certificate(L, f"[K_{L}:K_{L - 1}]=2^(2^{L - 1})", EXPLICIT, conds, prime=p,
                               critical_point=0, factor_index=j if r > 1 else None,
                               info={"N": NL})
    return None


# ---------------------------------------------------------------------------
# cubic polynomials
# ---------------------------------------------------------------------------

def _level_one_cubic(f: RatMap) -> LevelResult:
    fac = factor_over_q(f.num)
    irreducible = fac.complete and fac.count == 1
    disc = discriminant(f.num)
    nonsq = not is_rational_square(disc)
    conds = [
        Condition("f irreducible over Q", "true", irreducible, irreducible),
        Condition("Disc(f) non-square", "not a square in Q", disc, nonsq),
    ]
    if irreducible and nonsq:
        return LevelResult(1, "certified", [Certificate(1, "[K_1:K_0]=6", BASE, conds)])
    why = "f is reducible" if not irreducible else f"Disc(f) = {fraction_str(disc)} is a square"
    return LevelResult(1, "gap", note=why)


def certify_cubic_poly(
    f: RatMap,
    n_max: int,
    prime_bound: int = DEFAULT_PRIME_BOUND,
    stability: StabilityReport | None = None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> list[LevelResult]:
    """Per-level certificates for a monic cubic with two distinct rational critical points."""
    _require_monic_poly(f, 3)
    crit = critical_points(f)
    if len(crit.points) != 2:
        raise HypothesisError("needs two distinct finite critical points")
    if stability is None:
        stability = stability_report(f, min(n_max, _levels_within(3, degree_cap)) or 1, degree_cap)
    lift = homogeneous_lift(f)
    gammas = list(crit.points)
    forbidden = 3 * _den_product(f, gammas) * abs(lift.G[0])
    results = [_level_one_cubic(f)]
    for L in range(2, n_max + 1):
        count = stability.count(L)
        if count is not None and count > 1:
            results.append(LevelResult(L, "gap", note=f"f^{L} is reducible ({count} factors)"))
            continue
        cert = None
        for role in (0, 1):
            g1, g2 = gammas[role], gammas[1 - role]
            cert = _scan_cubic(f, lift, g1, g2, role, L, prime_bound, forbidden)
            if cert is None:
                cert = _cofactor_cubic(f, g1, g2, role, L, forbidden)
            if cert is not None:
                break
        if cert is None:
            results.append(LevelResult(L, "gap", note=f"no prime <= {prime_bound} and no usable cofactor"))
        elif count == 1:
            cert.conditions.insert(0, Condition(f"f^{L} irreducible over Q", "true", True, True))
            results.append(LevelResult(L, "certified", [cert]))
        else:
            results.append(LevelResult(L, "conditional", [cert], note=f"irreducibility of f^{L} not established"))
    return results[:n_max]


def _cubic_conditions(L, v1, v2):
    return [
        Condition(f"v_p(f^{L}(gamma_1))", "odd", v1, v1 is not None and v1 % 2 == 1),
        Condition(f"v_p(f^{L}(gamma_2))", "= 0", v2, v2 == 0),
        Condition("v_p(3)", "= 0", 0, True),
        Condition(f"v_p(f^i(gamma_1)), v_p(f^i(gamma_2)), 1<=i<{L}", "= 0", 0, True),
    ]


def _scan_cubic(f, lift, g1, g2, role, L, prime_bound, forbidden):
    for M, block in scan_blocks(prime_bound, forbidden):
        r1 = orbit_residues(lift, g1, L, M)
        r2 = orbit_residues(lift, g2, L, M)
        g = math.gcd(r1[L][0], M)
        if g == 1:
            continue
        for p in block:
            if g % p or r2[L][0] % p == 0:
                continue
            if any(r1[i][0] % p == 0 or r2[i][0] % p == 0 for i in range(1, L)):
                continue
            v1 = valuation_of_iterate(f, g1, L, p)
            if v1 is None or v1 % 2 == 0:
                continue
            conds = _cubic_conditions(L, v1, 0)
            return Certificate(L, f"[K_{L}:K_{L - 1}]=6^(3^{L - 1})", EXPLICIT, conds, prime=p, critical_point=role)
    return None


def _cofactor_cubic(f, g1, g2, role, L, forbidden):
    o1 = exact_orbit(f, g1, L, EXACT_BIT_LIMIT)
    o2 = exact_orbit(f, g2, L, EXACT_BIT_LIMIT)
    if o1 is None or o2 is None:
        return None
    F = forbidden * abs(o2[L].numerator) * o1[L].denominator
    for i in range(1, L):
        F *= abs(o1[i].numerator) * abs(o2[i].numerator)
    if F == 0 or o1[L] == 0:
        return None
    u, removed = strip_common(o1[L].numerator, F)
    if is_pm_square(u):
        return None
    conds = [
        Condition(f"num f^{L}(gamma_1) with forbidden primes removed", "not +-square", u, True),
        Condition("v_p(3)", "= 0", 0, True),
    ]
    return Certificate(L, f"[K_{L}:K_{L - 1}]=6^(3^{L - 1})", COFACTOR, conds, critical_point=role,
                       cofactor=u, removed=removed)


# ---------------------------------------------------------------------------
# quadratic rational maps
# ---------------------------------------------------------------------------

@dataclass
class RatmapData:
    gammas: list[Fraction]
    lead_P1: Fraction
    lead_c: Fraction
    res_Q1_P1: Fraction
    disc_P1: Fraction

    def constant_forbidden(self) -> int:
        out = 2
        for x in (self.lead_P1, self.lead_c, self.res_Q1_P1, self.disc_P1):
            out *= _int_parts(x)
        for g in self.gammas:
            out *= g.denominator
        return out


def ratmap_hypotheses(f: RatMap, n_max: int) -> RatmapData:
    """Check the hypotheses for the quadratic rational map criterion; raise HypothesisError."""
    if f.degree != 2:
        raise HypothesisError("needs a degree-2 map")
    crit = critical_points(f)
    if len(crit.points) != 2:
        raise HypothesisError("needs two distinct finite critical points")
    for g in crit.points:
        if f(g) is INFINITY:
            raise HypothesisError(f"f({fraction_str(g)}) is infinity")
    x = INFINITY
    for n in range(1, n_max + 1):
        x = f(x)
        if x is not INFINITY and x == 0:
            raise HypothesisError(f"f^{n}(infinity) = 0")
    if f.num.degree < 1:
        raise HypothesisError("numerator is constant")
    data = RatmapData(
        list(crit.points),
        f.num.leading,
        wronskian(f).leading,
        resultant(f.den, f.num),
        discriminant(f.num) if f.num.degree >= 1 else Fraction(0),
    )
    if 0 in (data.lead_c, data.res_Q1_P1, data.disc_P1):
        raise HypothesisError("a forbidden constant vanishes")
    return data


def certify_quadratic_ratmap(f: RatMap, n_max: int, prime_bound: int = DEFAULT_PRIME_BOUND) -> list[LevelResult]:
    """Per-level certificates for a quadratic rational map with two rational critical points."""
    data = ratmap_hypotheses(f, n_max)
    lift = homogeneous_lift(f)
    results = [_level_one_quadratic(f.num)]
    base = data.constant_forbidden()
    for L in range(2, n_max + 1):
        cert = _scan_ratmap(f, lift, data, L, prime_bound, base)
        if cert is None:
            cert = _cofactor_ratmap(f, lift, data, L, base)
        if cert is None:
            results.append(LevelResult(L, "gap", note=f"no prime <= {prime_bound} and no usable cofactor"))
        else:
            results.append(LevelResult(L, "certified", [cert]))
    return results[:n_max]


def _ratmap_conditions(L, v):
    return [
        Condition(f"v_p(P_{L}(gamma_1) P_{L}(gamma_2))", "odd", v, v % 2 == 1),
        Condition("v_p(2 l(P_1) l(c) Res(Q_1,P_1) Disc(P_1))", "= 0", 0, True),
        Condition(f"v_p(P_j(gamma_i)), 2<=j<{L}", "= 0", 0, True),
    ]


def _scan_ratmap(f, lift, data, L, prime_bound, forbidden):
    g1, g2 = data.gammas
    for M, block in scan_blocks(prime_bound, forbidden):
        r1 = orbit_residues(lift, g1, L, M)
        r2 = orbit_residues(lift, g2, L, M)
        g = math.gcd(r1[L][0] * r2[L][0] % M, M)
        if g == 1:
            continue
        for p in block:
            if g % p:
                continue
            assert forbidden % p, "forbidden prime reached the explicit scan"
            if any(r1[j][0] % p == 0 or r2[j][0] % p == 0 for j in range(2, L)):
                continue
            v1 = raw_homogeneous_valuation(lift, g1, L, p)
            v2 = raw_homogeneous_valuation(lift, g2, L, p)
            if v1 is None or v2 is None or (v1 + v2) % 2 == 0:
                continue
            info = {
                "v_p(P_1(gamma_1))": raw_homogeneous_valuation(lift, g1, 1, p),
                "v_p(P_1(gamma_2))": raw_homogeneous_valuation(lift, g2, 1, p),
            }
            return Certificate(L, f"[K_{L}:K_{L - 1}]=2^(2^{L - 1})", EXPLICIT, _ratmap_conditions(L, v1 + v2),
                               prime=p, info=info)
    return None


def _cofactor_ratmap(f, lift, data, L, base):
    g1, g2 = data.gammas
    o1 = raw_homogeneous_orbit(lift, g1, L)
    o2 = raw_homogeneous_orbit(lift, g2, L)
    if max(abs(o1[L][0]), abs(o2[L][0])).bit_length() > EXACT_BIT_LIMIT:
        return None
    X = o1[L][0] * o2[L][0]
    F = base
    for j in range(2, L):
        F *= abs(o1[j][0]) * abs(o2[j][0])
    if X == 0 or F == 0:
        return None
    u, removed = strip_common(X, F)
    if is_pm_square(u):
        return None
    conds = [
        Condition(f"P_{L}(gamma_1) P_{L}(gamma_2) with forbidden primes removed", "not +-square", u, True),
        Condition("forbidden primes", "removed", removed, True),
    ]
    return Certificate(L, f"[K_{L}:K_{L - 1}]=2^(2^{L - 1})", COFACTOR, conds, cofactor=u, removed=removed)


# ---------------------------------------------------------------------------
# independent re-verification
# ---------------------------------------------------------------------------

def reverify(f: RatMap, cert: Certificate, kind: str, stability: StabilityReport | None = None) -> bool:
    """Re-check a certificate by building the iterate polynomials and evaluating exactly.

    Only available when d^level <= 256; otherwise raises ValueError.
    """
    L = cert.level
    if cert.mode == BASE:
        if kind == CUBIC_POLY:
            fac = factor_over_q(f.num)
            return fac.complete and fac.count == 1 and not is_rational_square(discriminant(f.num))
        return not is_rational_square(discriminant(f.num))
    if f.degree ** L > REVERIFY_DEGREE_CAP:
        raise ValueError("level too deep for the exact route")
    crit = critical_points(f)
    pairs = {m: iterate(f, m) for m in range(1, L + 1)}

    def value(m, x):
        pq = pairs[m]
        return pq.P(x) / pq.Q(x)

    if kind == QUAD_POLY:
        g = crit.points[0]
        p = cert.prime
        if p is None or p == 2 or _den_product(f, [g]) % p == 0:
            return False
        N = cert.info.get("N", L)
        if cert.factor_index is None:
            ok = valuation(value(L, g), p) == 1
        else:
            fac = stability.factors[N] if stability else factor_over_q(pairs[N].P).factors
            h = fac[cert.factor_index][0].monic()
            x = value(L - N, g) if L > N else g
            ok = valuation(h(x), p) == 1
        return ok and all(valuation(value(m, g), p) == 0 for m in range(1, L))
    if kind == CUBIC_POLY:
        g1, g2 = crit.points[cert.critical_point], crit.points[1 - cert.critical_point]
        a, b = value(L, g1), value(L, g2)
        earlier = [value(i, g) for i in range(1, L) for g in (g1, g2)]
        if cert.mode == EXPLICIT:
            p = cert.prime
            if p == 3 or _den_product(f, [g1, g2]) % p == 0:
                return False
            v = valuation(a, p)
            return v % 2 == 1 and valuation(b, p) == 0 and all(valuation(x, p) == 0 for x in earlier)
        F = 3 * _den_product(f, [g1, g2]) * abs(b.numerator) * a.denominator
        for x in earlier:
            F *= abs(x.numerator)
        u, removed = strip_common(a.numerator, F)
        return u == cert.cofactor and removed == cert.removed and not is_pm_square(u)
    if kind == QUAD_RATMAP:
        data = ratmap_hypotheses(f, L)
        g1, g2 = data.gammas
        # P_m(a/b) * b^(2^m) is the raw integer value
        def raw(m, g):
            return pairs[m].P(g) * Fraction(g.denominator) ** (2 ** m)
        X = raw(L, g1) * raw(L, g2)
        if cert.mode == EXPLICIT:
            p = cert.prime
            if data.constant_forbidden() % p == 0:
                return False
            if any(valuation(raw(j, g), p) != 0 for j in range(2, L) for g in (g1, g2)):
                return False
            return valuation(X, p) % 2 == 1
        F = data.constant_forbidden()
        for j in range(2, L):
            F *= abs(int(raw(j, g1))) * abs(int(raw(j, g2)))
        u, removed = strip_common(int(X), F)
        return u == cert.cofactor and removed == cert.removed and not is_pm_square(u)
    raise ValueError(f"unknown kind {kind}")


# ---------------------------------------------------------------------------
# obstructions
# ---------------------------------------------------------------------------

def _square_class_small(x: Fraction) -> bool:
    """x in {+-1, +-3} * (Q^*)^2."""
    if x == 0:
        return True
    return any(is_rational_square(abs(x) / k) for k in (1, 3))


def detect_obstructions(
    f: RatMap,
    max_steps: int = DEFAULT_ORBIT_STEPS,
    r_max: int = 10,
    stability_levels: int = 4,
    degree_cap: int = DEFAULT_DEGREE_CAP,
) -> tuple[list[Obstruction], list[str], StabilityReport | None]:
    """All detectable obstructions, sorted by priority, plus unresolved checks."""
    if f.degree not in (2, 3):
        raise DegreeError("obstruction detection needs degree 2 or 3")
    found: list[Obstruction] = []
    unknowns: list[str] = []
    crit = None
    try:
        crit = critical_points(f)
    except IrrationalCriticalPoints:
        unknowns.append("critical points are not all rational")
    if crit is not None:
        if f.is_polynomial and f.degree >= 3 and len(crit.points) == 1:
            found.append(Obstruction("UnicriticalHighDegree", {
                "critical_point": fraction_str(crit.points[0]), "multiplicity": crit.multiplicities[0]}, True))
        orbits = critical_orbits(f, max_steps)
        status = is_pcf(f, max_steps)
        if status == "PCF":
            found.append(Obstruction("PCF", {"critical_orbits": [o.to_json() for o in orbits]}, True))
        elif status == "Unknown":
            unknowns.append("post-critical finiteness undecided within the step bound")
        if len(crit.points) == 2 and (f.degree == 3 or not f.is_polynomial):
            col = collision(f, r_max)
            if col.aligned is not None:
                found.append(Obstruction("Collision", col.to_json(), f.is_polynomial))
            if f.is_polynomial and f.num.leading == 1:
                ds = _disc_square_levels(f, crit.points, r_max)
                if ds is not None:
                    found.append(Obstruction("DiscSquareCubic", ds, col.aligned is not None))
    root = orbit(f, 0, max_steps)
    if root.is_periodic:
        found.append(Obstruction("RootPeriodic", {"root_orbit": root.to_json()}, True))
    stab = None
    if f.is_polynomial:
        levels = min(stability_levels, max(1, _levels_within(f.degree, degree_cap)))
        stab = stability_report(f, levels, degree_cap)
        if stab.verdict == "GrowingCounts":
            found.append(Obstruction("GrowingCounts", stab.to_json(), False))
    found.sort(key=lambda o: OBSTRUCTION_PRIORITY.index(o.kind))
    return found, unknowns, stab


def _disc_square_levels(f, gammas, r_max):
    """Levels n where f^n(g1) f^n(g2) lies in {+-1, +-3} * Q^2, when they run to the end."""
    o1 = exact_orbit(f, gammas[0], r_max, EXACT_BIT_LIMIT)
    o2 = exact_orbit(f, gammas[1], r_max, EXACT_BIT_LIMIT)
    if o1 is None or o2 is None:
        return None
    flags = [_square_class_small(o1[n] * o2[n]) for n in range(1, r_max + 1)]
    start = len(flags)
    while start > 0 and flags[start - 1]:
        start -= 1
    if len(flags) - start < 3:
        return None
    return {"from_level": start + 1, "to_level": r_max}


def reverify_obstruction(f: RatMap, obs: Obstruction) -> bool:
    """Reproduce an obstruction from its evidence through the dynamics routines."""
    if obs.kind == "UnicriticalHighDegree":
        crit = critical_points(f)
        return len(crit.points) == 1 and fraction_str(crit.points[0]) == obs.evidence["critical_point"]
    if obs.kind == "PCF":
        return is_pcf(f) == "PCF"
    if obs.kind == "Collision":
        col = collision(f, obs.evidence["aligned_r"])
        return col.aligned == obs.evidence["aligned_r"]
    if obs.kind == "RootPeriodic":
        o = orbit(f, 0)
        return o.is_periodic and o.cycle == obs.evidence["root_orbit"]["cycle"]
    if obs.kind == "GrowingCounts":
        n = len(obs.evidence["levels"])
        return stability_report(f, n).verdict == "GrowingCounts"
    if obs.kind == "DiscSquareCubic":
        crit = critical_points(f)
        return _disc_square_levels(f, crit.points, obs.evidence["to_level"]) == obs.evidence
    return False


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

CONDITIONALITY = {
    QUAD_POLY: "Finite index for general quadratic polynomials is conditional on the abc-Conjecture; "
               "the per-level prime certificates are unconditional.",
    CUBIC_POLY: "Finite index for general cubic polynomials is conditional on the abc-Conjecture and "
                "Vojta's Conjecture; the per-level prime certificates are unconditional.",
    QUAD_RATMAP: "The per-level certificates for quadratic rational maps are unconditional; finite index "
                 "for general quadratic rational maps is open.",
    "family": "Unconditional for b = 2 mod 4 with b > 0 and for b = 4 mod 8; other b are best effort "
              "with no index conclusion.",
}
OVER_Q = " All computations are over Q; levels are checked up to n_max only."


def verdict(
    obstructions: list[Obstruction],
    levels: list[LevelResult],
    n_max: int,
    kind: str | None,
) -> tuple[str, str | None, str]:
    """(verdict, reason, conditionality note)."""
    if obstructions:
        top = obstructions[0]
        proven = any(o.proven for o in obstructions)
        if proven:
            top = next(o for o in obstructions if o.proven)
            note = f"{top.kind} is an unconditional obstruction to finite index."
        else:
            note = f"{top.kind} is finite-level evidence only, not a proof of infinite index."
        return f"InfiniteIndex({top.kind})", top.kind, note + OVER_Q
    note = CONDITIONALITY.get(kind, "") + OVER_Q
    if not levels:
        return "Inconclusive", None, note
    certified = {lv.n for lv in levels if lv.status == "certified"}
    if all(n in certified for n in range(1, n_max + 1)):
        return "IndexOne", "every level certified maximal", note
    if certified:
        return "FiniteIndexEvidence", f"levels {sorted(certified)} certified maximal", note
    return "Inconclusive", None, note


def map_kind(f: RatMap) -> str:
    if f.is_polynomial and f.degree == 2:
        return QUAD_POLY
    if f.is_polynomial and f.degree == 3:
        return CUBIC_POLY
    if not f.is_polynomial and f.degree == 2:
        return QUAD_RATMAP
    raise DegreeError(f"no certificate family for {f}")


def analyze(
    f: RatMap,
    n_max: int = DEFAULT_LEVELS,
    prime_bound: int = DEFAULT_PRIME_BOUND,
    kind: str | None = None,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    max_steps: int = DEFAULT_ORBIT_STEPS,
    strict: bool = False,
) -> AnalysisReport:
    """Obstructions, then certificates when no proven obstruction exists, then the verdict.

    With strict=True a failed certificate hypothesis is raised instead of
    being recorded under unknowns.
    """
    kind = kind or map_kind(f)
    report = AnalysisReport(str(f), f.degree, kind, n_max)
    obs, unknowns, stab = detect_obstructions(f, max_steps, degree_cap=degree_cap)
    report.obstructions = obs
    report.unknowns = unknowns
    if stab is not None:
        report.extra["stability"] = stab.to_json()
    if not any(o.proven for o in obs):
        try:
            if kind == QUAD_POLY:
                report.levels = certify_quadratic_poly(f, n_max, prime_bound, None, degree_cap)
            elif kind == CUBIC_POLY:
                report.levels = certify_cubic_poly(f, n_max, prime_bound, None, degree_cap)
            else:
                report.levels = certify_quadratic_ratmap(f, n_max, prime_bound)
        except (HypothesisError, IrrationalCriticalPoints) as exc:
            if strict:
                raise
            report.unknowns.append(f"certificates not attempted: {exc}")
    report.verdict, report.reason, report.conditionality = verdict(obs, report.levels, n_max, kind)
    return report


def thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("ARBOR_CERT_THREADS", "1")))
    except ValueError:
        return 1
