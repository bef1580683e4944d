import json

import pytest
from hypothesis import given, settings, strategies as st

from arborcert.certificates import (
    BASE,
    COFACTOR,
    CUBIC_POLY,
    EXPLICIT,
    QUAD_POLY,
    QUAD_RATMAP,
    HypothesisError,
    analyze,
    certify_cubic_poly,
    certify_quadratic_poly,
    certify_quadratic_ratmap,
    detect_obstructions,
    ratmap_hypotheses,
    reverify,
    reverify_obstruction,
    verdict,
)
from arborcert.dynamics import stability_report
from conftest import M, run_cli


def primes_by_level(levels):
    return {lv.n: [c.prime for c in lv.certificates] for lv in levels}


def test_quadratic_poly_regression():
    levels = certify_quadratic_poly(M("z^2+1"), 6)
    assert [lv.status for lv in levels] == ["certified", "gap", "certified", "certified", "certified", "certified"]
    assert levels[0].certificates[0].mode == BASE
    got = primes_by_level(levels)
    assert got[3] == [5] and got[4] == [13] and got[5] == [677] and got[6] == [45833]
    for lv in levels:
        for c in lv.certificates:
            assert c.valid and reverify(M("z^2+1"), c, QUAD_POLY)


def test_quadratic_poly_preconditions():
    with pytest.raises(HypothesisError):
        certify_quadratic_poly(M("z^2-2"), 3)  # PCF
    with pytest.raises(HypothesisError):
        certify_quadratic_poly(M("2z^2+1"), 3)  # not monic
    with pytest.raises(HypothesisError):
        certify_quadratic_poly(M("z^2+z"), 3)  # counts grow (z divides every iterate)


def test_quadratic_poly_gap_when_orbit_value_is_one():
    # f(0) = 1 for z^2 + 1: nothing divides 1 -> level 1 handled by the base case only
    levels = certify_quadratic_poly(M("z^2+1"), 2)
    assert levels[1].status == "gap" and not levels[1].certificates


def test_quadratic_poly_with_reducible_base_uses_factors():
    # every iterate of z^2 - 4 has exactly two irreducible factors
    f = M("z^2 - 4")
    rep = stability_report(f, 5)
    assert rep.stable_from == 1
    levels = certify_quadratic_poly(f, 5, stability=rep)
    assert [lv.status for lv in levels] == ["gap", "gap", "certified", "certified", "certified"]
    for lv in levels[2:]:
        assert [c.factor_index for c in lv.certificates] == [0, 1]
        for c in lv.certificates:
            assert reverify(f, c, QUAD_POLY, rep)


def test_cubic_regression():
    f = M("z^3-3z+1")
    levels = certify_cubic_poly(f, 3)
    assert levels[0].status == "gap"
    assert levels[1].status == "certified" and levels[1].certificates[0].prime == 19
    assert levels[1].certificates[0].critical_point == 0  # gamma_1 = -1
    for lv in levels:
        for c in lv.certificates:
            assert reverify(f, c, CUBIC_POLY)


@pytest.mark.parametrize("text", ["z^3 - 6012/2755 z^2 + 12636/13775 z + 54/95", "z^3+7z^2-7"])
def test_cubic_examples_reverify(text):
    f = M(text)
    levels = certify_cubic_poly(f, 4)
    assert any(lv.status == "certified" for lv in levels)
    for lv in levels:
        assert not (lv.status == "gap" and lv.certificates)
        for c in lv.certificates:
            assert c.valid and reverify(f, c, CUBIC_POLY)


def test_ratmap_certificates_and_forbidden_set():
    f = M("(z^2-4z+1)/(2z)")
    data = ratmap_hypotheses(f, 8)
    forbidden = data.constant_forbidden()
    levels = certify_quadratic_ratmap(f, 8)
    assert all(lv.status == "certified" for lv in levels)
    assert levels[1].certificates[0].prime == 11
    for lv in levels:
        for c in lv.certificates:
            if c.mode == EXPLICIT:
                assert forbidden % c.prime != 0
                assert "v_p(P_1(gamma_1))" in c.info
            assert reverify(f, c, QUAD_RATMAP)


def test_ratmap_cofactor_mode_records_removed_part():
    f = M("(z^2-4z+1)/(2z)")
    levels = certify_quadratic_ratmap(f, 5, prime_bound=10)
    cofactors = [c for lv in levels for c in lv.certificates if c.mode == COFACTOR]
    assert cofactors
    for c in cofactors:
        assert c.cofactor is not None and c.removed is not None
        assert reverify(f, c, QUAD_RATMAP)


def test_ratmap_hypotheses():
    with pytest.raises(HypothesisError):
        ratmap_hypotheses(M("z^2+1"), 3)  # one finite critical point
    with pytest.raises(HypothesisError):
        ratmap_hypotheses(M("(z^2+1)/(z^2-1)"), 3)  # infinity is critical
    with pytest.raises(HypothesisError):
        ratmap_hypotheses(M("(z^2-1)/(z^2+1)"), 3)  # f(inf) = 1, f(1) = 0


def test_obstructions():
    obs, _, _ = detect_obstructions(M("z^2-2"))
    assert obs[0].kind == "PCF"
    obs, _, _ = detect_obstructions(M("z^3+2"))
    assert obs[0].kind == "UnicriticalHighDegree"
    obs, _, _ = detect_obstructions(M("z^2-z"))
    assert {o.kind for o in obs} == {"RootPeriodic", "GrowingCounts"}
    obs, _, _ = detect_obstructions(M("(-3z^2+10z-3)/(8z)"))
    assert obs[0].kind == "Collision" and obs[0].evidence["aligned_r"] == 2


@pytest.mark.parametrize("text", ["z^2-2", "z^3+2", "z^2-z", "(-3z^2+10z-3)/(8z)", "z^3-3z"])
def test_obstruction_evidence_reverifies(text):
    f = M(text)
    obs, _, _ = detect_obstructions(f)
    assert obs
    for o in obs:
        assert reverify_obstruction(f, o)
        json.dumps(o.to_json())


def test_verdict_rules():
    assert verdict([], [], 3, QUAD_POLY)[0] == "Inconclusive"
    rep = analyze(M("z^2-2"), 3)
    assert rep.verdict == "InfiniteIndex(PCF)" and not rep.levels
    rep = analyze(M("z^2+1"), 5)
    assert rep.verdict == "FiniteIndexEvidence" and rep.gaps == [2]
    assert "abc" in rep.conditionality
    rep = analyze(M("z^3-3z+1"), 3)
    assert "Vojta" in rep.conditionality
    rep = analyze(M("(z^2-4z+1)/(2z)"), 6)
    assert rep.verdict == "IndexOne"


def test_gap_never_coexists_with_certificate():
    for text in ["z^2+1", "z^2+3", "z^3+7z^2-7", "(z^2-12z+1)/(10z)"]:
        rep = analyze(M(text), 4)
        for lv in rep.levels:
            assert (lv.status == "gap") == (not lv.certificates)


@settings(max_examples=15)
@given(st.integers(-12, 12).filter(lambda c: c not in (0, -1, -2)))
def test_quadratic_certificates_reverify_on_random_maps(c):
    f = M(f"z^2 + {c}")
    rep = analyze(f, 4, prime_bound=10**4)
    for lv in rep.levels:
        for cert in lv.certificates:
            assert cert.valid and reverify(f, cert, QUAD_POLY, None)


@pytest.mark.parametrize("args", [
    ["certify", "quad-poly", "--map", "z^2+1", "--levels", "6"],
    ["certify", "cubic-poly", "--map", "z^3-3z+1", "--levels", "3"],
    ["certify", "quad-ratmap", "--map", "(z^2-4z+1)/(2z)", "--levels", "8"],
])
def test_certify_goldens(args, tmp_path, capsys):
    code, produced, golden = run_cli(args, tmp_path)
    assert code == 0
    assert produced.read_text() == golden.read_text()
