from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from arborcert import iterate
from arborcert.certificates import QUAD_RATMAP, certify_quadratic_ratmap, reverify
from arborcert.family import (
    FamilyCapExceeded,
    FamilyError,
    fb_certify,
    fb_map,
    fb_sequences,
    fb_verify_lemmas,
    raw_sequence,
    values_at_one,
)
from conftest import run_cli

bs = st.integers(-60, 60).filter(lambda b: b not in (1, -1))


def test_fb_map():
    assert str(fb_map(2)) == "(z^2 - 4z + 1)/(2z)"
    assert str(fb_map(0)) == "(z^2 + 1)/(-2z)"
    with pytest.raises(FamilyError):
        fb_map(1)


def test_sequences_known_values():
    pt = fb_sequences(2, 2)
    assert (pt.level(1).P, pt.level(1).Q) == (6, -2)
    assert (pt.level(2).P, pt.level(2).Q) == (88, -24)
    assert (pt.level(2).u, pt.level(2).w) == (11, -3)
    pt = fb_sequences(0, 1)
    assert (pt.level(1).P, pt.level(1).Q) == (2, 2)


@pytest.mark.parametrize("b", [2, 3, 4, -4, 8, 0, 7])
def test_sequences_match_polynomial_iterates(b):
    f = fb_map(b)
    pt = fb_sequences(b, 8)
    # the canonical map may be scaled by -1 relative to the family's normalisation
    sign = 1 if f.den.coeffs[1] == 2 * b - 2 else -1
    for n in range(1, 9):
        it = iterate(f, n)
        assert it.P(-1) == pt.level(n).P * sign ** (2 ** n - 1)
        assert it.Q(-1) == pt.level(n).Q * sign ** (2 ** n - 1)


@given(bs, st.integers(1, 7))
def test_recursion_and_splits(b, n):
    pt = fb_sequences(b, n)
    prev = None
    for lv in pt.levels:
        assert lv.P == lv.u * 2 ** lv.v2_P and lv.u % 2 == 1
        assert lv.Q == lv.w * 2 ** lv.v2_Q and lv.w % 2 == 1
        if prev is not None:
            assert lv.P == prev.P ** 2 - 2 * b * prev.P * prev.Q + prev.Q ** 2
            assert lv.Q == 2 * (b - 1) * prev.P * prev.Q
        prev = lv


@given(st.integers(1, 30).map(lambda k: 4 * k - 2))
def test_sign_pattern(b):
    for lv in fb_sequences(b, 8).levels:
        assert lv.P > 0 and lv.Q < 0


@given(bs)
def test_collision_identity(b):
    raw = raw_sequence(b, 10)
    one = values_at_one(b, 10)
    for n in range(2, 11):
        assert Fraction(*one[n - 1]) == Fraction(*raw[n - 2])


def test_lemma_records():
    rec = fb_verify_lemmas(2, 10)
    assert all(r["status"] in ("pass", "skipped") for r in rec.values())
    assert rec["class_2_mod_4"]["status"] == "pass"
    rec = fb_verify_lemmas(4, 10)
    assert rec["class_4_mod_8"]["status"] == "pass"
    rec = fb_verify_lemmas(3, 6)
    assert rec["two_adic"]["status"] == "skipped"


def test_certify_matches_generic_ratmap_route():
    rep = fb_certify(2, 8)
    generic = certify_quadratic_ratmap(fb_map(2), 8)
    assert rep.verdict == "IndexOne"
    assert [lv.status for lv in rep.levels] == [lv.status for lv in generic]
    for lv in rep.levels:
        for c in lv.certificates:
            assert c.info.get("u_n_not_pm_square", True)
            assert reverify(fb_map(2), c, QUAD_RATMAP)


def test_best_effort_classes():
    rep = fb_certify(8, 10)
    assert rep.verdict != "IndexOne" and not rep.extra["proven_class"]
    # b = 0 makes both critical points a 2-cycle: every level from 2 on is a gap
    rep = fb_certify(0, 5)
    assert rep.gaps == [2, 3, 4, 5]


def test_errors():
    with pytest.raises(FamilyError):
        fb_sequences(1, 3)
    with pytest.raises(FamilyError):
        fb_sequences(-1, 3)
    with pytest.raises(FamilyCapExceeded):
        fb_sequences(2, 40)


def test_family_golden(tmp_path):
    code, produced, golden = run_cli(["family", "--b", "2", "--levels", "10"], tmp_path)
    assert code == 0 and produced.read_text() == golden.read_text()
