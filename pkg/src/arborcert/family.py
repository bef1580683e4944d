"""The family f_b(z) = (z^2 - 2bz + 1) / ((2b - 2) z).

Its critical points are +-1 and f_b(1) = -1, so everything reduces to the
integer sequences P_n(-1), Q_n(-1) given by

    P_n = P_{n-1}^2 - 2b P_{n-1} Q_{n-1} + Q_{n-1}^2,   Q_n = (2b - 2) P_{n-1} Q_{n-1},

starting from (P_1, Q_1) = (2 + 2b, 2 - 2b). For even b both terms are
2^(2^n - 1) times an odd number, with odd parts u_n, w_n satisfying

    2 u_n = u_{n-1}^2 - 2b u_{n-1} w_{n-1} + w_{n-1}^2,   w_n = (b - 1) u_{n-1} w_{n-1}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .certificates import (
    BASE,
    COFACTOR,
    CONDITIONALITY,
    OVER_Q,
    AnalysisReport,
    Certificate,
    Condition,
    LevelResult,
    QUAD_RATMAP,
)
from .exact import Poly, RatMap
from .ntheory import is_pm_square, is_rational_square, odd_part, strip_common

MAX_FAMILY_LEVEL = 20


class FamilyError(ValueError):
    """Excluded parameter."""


class FamilyCapExceeded(RuntimeError):
    """Requested level above MAX_FAMILY_LEVEL."""


def fb_map(b: int) -> RatMap:
    if b == 1:
        raise FamilyError("b = 1 collapses the degree")
    z = Poly.z()
    return RatMap.make(z * z - Poly.const(2 * b) * z + Poly.const(1), Poly.const(2 * b - 2) * z)


def proven_class(b: int) -> bool:
    """b = 2 mod 4 with b > 0, or b = 4 mod 8."""
    return (b % 4 == 2 and b > 0) or b % 8 == 4


@dataclass(frozen=True)
class FamilyLevel:
    n: int
    P: int  # P_n(-1)
    Q: int  # Q_n(-1)
    v2_P: int
    v2_Q: int
    u: int
    w: int

    @property
    def u_mod8(self) -> int:
        return self.u % 8

    @property
    def w_mod8(self) -> int:
        return self.w % 8

    @property
    def u_is_pm_square(self) -> bool:
        return is_pm_square(self.u)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "Pn_at_minus1": str(self.P),
            "Qn_at_minus1": str(self.Q),
            "v2_P": self.v2_P,
            "v2_Q": self.v2_Q,
            "u_n": str(self.u),
            "w_n": str(self.w),
            "u_mod8": self.u_mod8,
            "w_mod8": self.w_mod8,
            "u_is_pm_square": self.u_is_pm_square,
        }


@dataclass
class FamilyPoint:
    b: int
    levels: list[FamilyLevel] = field(default_factory=list)

    def level(self, n: int) -> FamilyLevel:
        return self.levels[n - 1]

    def to_json(self) -> dict:
        return {"b": self.b, "levels": [lv.to_json() for lv in self.levels]}


def _check_b(b: int, n_max: int) -> None:
    if b in (1, -1):
        raise FamilyError(f"b = {b} is excluded (degree collapse or P_1(-1) = 0)")
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if n_max > MAX_FAMILY_LEVEL:
        raise FamilyCapExceeded(f"n_max above {MAX_FAMILY_LEVEL}")


def raw_sequence(b: int, n_max: int) -> list[tuple[int, int]]:
    """[(P_n(-1), Q_n(-1)) for n = 1..n_max] from the unfactored recursion."""
    _check_b(b, n_max)
    P, Q = 2 + 2 * b, 2 - 2 * b
    out = [(P, Q)]
    for _ in range(n_max - 1):
        P, Q = P * P - 2 * b * P * Q + Q * Q, (2 * b - 2) * P * Q
        out.append((P, Q))
    return out


def fb_sequences(b: int, n_max: int) -> FamilyPoint:
    """Exact values at -1 with their 2-adic splits.

    For even b the odd parts come from the factored recursion and are
    checked against the direct values; for odd b they are extracted directly.
    """
    raw = raw_sequence(b, n_max)
    point = FamilyPoint(b)
    if b % 2 == 0:
        u, w = 1 + b, 1 - b
        for n, (P, Q) in enumerate(raw, start=1):
            if n > 1:
                two_u = u * u - 2 * b * u * w + w * w
                u, w = two_u // 2, (b - 1) * u * w
            e = 2 ** n - 1
            if P != u << e:
                raise ArithmeticError("factored recursion disagrees with P_n(-1)")
            if Q != w << e:
                raise ArithmeticError("factored recursion disagrees with Q_n(-1)")
            point.levels.append(FamilyLevel(n, P, Q, odd_part(P)[0], odd_part(Q)[0], u, w))
    else:
        for n, (P, Q) in enumerate(raw, start=1):
            vp, u = odd_part(P)
            vq, w = odd_part(Q)
            point.levels.append(FamilyLevel(n, P, Q, vp, vq, u, w))
    return point


def values_at_one(b: int, n_max: int) -> list[tuple[int, int]]:
    """[(P_n(1), Q_n(1))]; (1, 1) maps to (2b - 2) * (-1, 1)."""
    raw = raw_sequence(b, n_max)
    out = [(2 - 2 * b, 2 * b - 2)]
    for n in range(2, n_max + 1):
        scale = (2 * b - 2) ** (2 ** (n - 1))
        P, Q = raw[n - 2]
        out.append((scale * P, scale * Q))
    return out


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------

def _record(status: str, detail: str = "", levels=None) -> dict:
    out = {"status": status}
    if detail:
        out["detail"] = detail
    if levels is not None:
        out["failed_levels"] = levels
    return out


def fb_verify_lemmas(b: int, n_max: int) -> dict[str, dict]:
    """Per-lemma pass/fail/skipped records up to level n_max.

    Keys: persistence, coprime_odd_parts, primitive_divisors, two_adic,
    class_2_mod_4, class_4_mod_8. Prime statements are checked with gcds,
    so no factoring is needed and nothing is left Unknown.
    """
    pt = fb_sequences(b, n_max)
    lv = pt.levels
    out: dict[str, dict] = {}
    bad = [n for n in range(2, n_max + 1) if lv[n - 1].Q % lv[n - 2].Q]
    out["persistence"] = _record("fail" if bad else "pass", "Q_{n-1}(-1) divides Q_n(-1)", bad)

    bad = [x.n for x in lv if math.gcd(x.u, x.w) != 1]
    out["coprime_odd_parts"] = _record("fail" if bad else "pass", "gcd(u_n, w_n) = 1", bad)

    allowed = 2 * (b - 1) * (b + 1)
    bad = []
    acc = 1
    for x in lv:
        shared = math.gcd(x.u, acc)
        if shared > 1 and strip_common(shared, allowed)[0] != 1:
            bad.append(x.n)
        acc *= x.u
    out["primitive_divisors"] = _record(
        "fail" if bad else "pass", "primes of u_n outside 2(b-1)(b+1) divide no earlier u_m", bad)

    if b % 2:
        out["two_adic"] = _record("skipped", "b is odd")
    else:
        bad = [x.n for x in lv if not (x.v2_P == x.v2_Q == 2 ** x.n - 1)]
        out["two_adic"] = _record("fail" if bad else "pass", "v_2(P_n(-1)) = v_2(Q_n(-1)) = 2^n - 1", bad)

    if b % 4 == 2 and b > 0:
        bad = [x.n for x in lv if not (x.u > 0 and x.u % 8 in (3, 7) and x.P > 0 and x.Q < 0 and not x.u_is_pm_square)]
        out["class_2_mod_4"] = _record("fail" if bad else "pass", "u_n > 0, u_n mod 8 in {3, 7}, not +-square", bad)
    else:
        out["class_2_mod_4"] = _record("skipped", "b is not 2 mod 4 with b > 0")

    if b % 8 == 4:
        bad = [x.n for x in lv if not (x.u % 8 in (3, 5) and x.w % 8 in (3, 5) and (2 * x.u) % 16 == 10)]
        out["class_4_mod_8"] = _record("fail" if bad else "pass", "u_n, w_n = +-3 mod 8 and 2u_n = 10 mod 16", bad)
    else:
        out["class_4_mod_8"] = _record("skipped", "b is not 4 mod 8")
    return out


# ---------------------------------------------------------------------------
# certification
# ---------------------------------------------------------------------------

def family_constants(b: int) -> dict[str, Fraction]:
    """l(P_1), l(c), Res(Q_1, P_1), Disc(P_1) in closed form."""
    return {
        "lead_P1": Fraction(1),
        "lead_c": Fraction(2 * (b - 1)),
        "res_Q1_P1": Fraction(4 * (b - 1) ** 2),
        "disc_P1": Fraction(4 * (b * b - 1)),
    }


def fb_certify(b: int, n_max: int) -> AnalysisReport:
    """Level certificates for f_b up to n_max and the resulting verdict.

    Level n >= 2 removes from P_n(1) P_n(-1) every prime dividing
    2 l(P_1) l(c) Res(Q_1, P_1) Disc(P_1) prod_{2<=j<n} P_j(1) P_j(-1) and
    checks the rest is not +-square. The lemma route (u_n not +-square) is
    recorded next to it.
    """
    _check_b(b, n_max)
    f = fb_map(b)
    pt = fb_sequences(b, n_max)
    at_one = values_at_one(b, n_max)
    lemmas = fb_verify_lemmas(b, n_max)
    report = AnalysisReport(str(f), 2, QUAD_RATMAP, n_max)

    disc = Fraction(4 * (b * b - 1))
    cond = Condition("Disc(P_1) = 4(b^2-1) non-square", "not a square in Q", disc, not is_rational_square(disc))
    if cond.holds:
        report.levels.append(LevelResult(1, "certified", [Certificate(1, "[K_1:K_0]=2", BASE, [cond])]))
    else:
        report.levels.append(LevelResult(1, "gap", note="numerator of f_b is reducible"))

    base = 2
    for c in family_constants(b).values():
        base *= abs(c.numerator) * c.denominator
    forbidden = base
    for n in range(2, n_max + 1):
        X = at_one[n - 1][0] * pt.level(n).P
        u, removed = strip_common(X, forbidden)
        lemma_route = not pt.level(n).u_is_pm_square
        if X != 0 and not is_pm_square(u):
            conds = [
                Condition(f"P_{n}(1) P_{n}(-1) with forbidden primes removed", "not +-square", u, True),
                Condition("forbidden primes", "removed", removed, True),
            ]
            cert = Certificate(n, f"[K_{n}:K_{n - 1}]=2^(2^{n - 1})", COFACTOR, conds, cofactor=u,
                               removed=removed, info={"u_n_not_pm_square": lemma_route})
            report.levels.append(LevelResult(n, "certified", [cert]))
        else:
            report.levels.append(LevelResult(n, "gap", note="cofactor is +-square"))
        forbidden *= abs(at_one[n - 1][0] * pt.level(n).P)

    certified = [lv.n for lv in report.levels if lv.status == "certified"]
    note = CONDITIONALITY["family"] + OVER_Q
    if len(certified) == n_max:
        if proven_class(b):
            report.verdict, report.reason = "IndexOne", "every level certified maximal"
        else:
            report.verdict = "FiniteIndexEvidence"
            report.reason = "every level certified, but b is outside the proven classes; no index conclusion"
    elif certified:
        report.verdict, report.reason = "FiniteIndexEvidence", f"levels {certified} certified maximal"
    report.conditionality = note
    report.extra["b"] = b
    report.extra["proven_class"] = proven_class(b)
    report.extra["lemmas"] = lemmas
    return report
