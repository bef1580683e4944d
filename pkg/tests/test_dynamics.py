from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arborcert import Poly
from arborcert.dynamics import (
    DegreeError,
    IrrationalCriticalPoints,
    collision,
    critical_points,
    cubic_disc_identity,
    disc_iterate_formula,
    disc_iterate_oracle,
    disc_iterate_unweighted,
    escape_test,
    is_pcf,
    orbit,
    stability_report,
)
from conftest import M


def test_critical_points():
    assert list(critical_points(M("(z^2-4z+1)/(2z)")).points) == [-1, 1]
    assert list(critical_points(M("z^3+7z^2-7")).points) == [Fraction(-14, 3), 0]
    crit = critical_points(M("z^3+5"))
    assert list(crit.points) == [0] and list(crit.multiplicities) == [2]
    with pytest.raises(IrrationalCriticalPoints):
        critical_points(M("z^3-2z"))


def test_orbits():
    o = orbit(M("z^2-2"), 0)
    assert (o.status, o.tail, o.cycle) == ("preperiodic", 2, 1)
    o = orbit(M("z^2+1"), 0, 10)
    assert o.status == "escaping"
    o = orbit(M("z^2"), 1)
    assert o.is_periodic and o.cycle == 1


@given(st.fractions(min_value=-50, max_value=50, max_denominator=30))
def test_escape_test_is_sound(x):
    # once the test fires, the height keeps growing for the next steps
    f = M("(z^2-4z+1)/(2z)")
    test = escape_test(f)
    if test.escapes(x):
        seen = {x}
        for _ in range(4):
            x = f(x)
            assert x not in seen
            seen.add(x)


def test_pcf():
    assert is_pcf(M("z^2-2")) == "PCF"
    assert is_pcf(M("z^3-3z")) == "PCF"
    assert is_pcf(M("z^2+1")) == "NotPCF"
    assert is_pcf(M("(z^2-4z+1)/(2z)")) == "NotPCF"


def test_collision():
    c = collision(M("(z^2-4z+1)/(2z)"), 6)
    assert c.aligned is None and c.offset == (0, 1)
    # crit -2, 2 map to 16, -16, then to 16^3 -/+ 192: no collision
    assert collision(M("z^3-12z"), 4).aligned is None
    # crit 0, 2 map to 0, -4; 0 is fixed and -4 escapes
    assert collision(M("z^3-3z^2"), 3).aligned is None


def test_stability():
    rep = stability_report(M("z^2-z"), 5)
    assert [lv.factor_count for lv in rep.levels] == [2, 3, 4, 5, 6]
    assert rep.verdict == "GrowingCounts"
    rep = stability_report(M("z^2+1"), 6)
    assert rep.verdict == "StableBy" and rep.stable_from == 1
    rep = stability_report(M("z^2"), 4)
    assert rep.verdict == "GrowingCounts"
    with pytest.raises(DegreeError):
        stability_report(M("z+1"), 2)


def test_stability_inconclusive_above_cap():
    rep = stability_report(M("z^2+1"), 9, degree_cap=64)
    assert rep.levels[-1].method == "inconclusive"


def test_disc_formula_known_values():
    f = M("z^2-2").num
    assert disc_iterate_formula(f, 1, 0) == disc_iterate_oracle(f, 1, 0) == 8
    assert disc_iterate_formula(f, 2, 0) == disc_iterate_oracle(f, 2, 0) == 2048
    assert disc_iterate_unweighted(f, 2, 0) == 1024


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(1, 3), st.integers(-9, 9))
def test_disc_formula_quadratics(b, c, n, t):
    f = Poly([c, b, 1])
    if b % 2:
        f = Poly([c, 2 * b, 1])
    assert disc_iterate_formula(f, n, t) == disc_iterate_oracle(f, n, t)


def test_cubic_identity():
    assert cubic_disc_identity(M("z^3-3z+1").num, 2)
    assert cubic_disc_identity(M("z^3+7z^2-7").num, 2)
