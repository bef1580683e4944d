from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from arborcert import INFINITY, Poly, RatMap, compose, derivative, discriminant, iterate, resultant, wronskian
from arborcert.exact import DegreeCapExceeded, poly_gcd
from conftest import Z, M, from_sympy, to_sympy

small = st.integers(-20, 20)
fracs = st.fractions(min_value=-10, max_value=10, max_denominator=12)
polys = st.lists(fracs, min_size=1, max_size=6).map(Poly)


def sylvester_resultant(p: Poly, q: Poly) -> Fraction:
    m, n = p.degree, q.degree
    size = m + n
    rows = []
    for i in range(n):
        rows.append([0] * i + list(reversed(p.coeffs)) + [0] * (size - m - 1 - i))
    for i in range(m):
        rows.append([0] * i + list(reversed(q.coeffs)) + [0] * (size - n - 1 - i))
    det = sympy.Matrix(rows).det()
    return Fraction(int(sympy.fraction(det)[0]), int(sympy.fraction(det)[1]))


def test_parse_and_canonical_forms():
    assert str(M("z^2-2")) == "z^2 - 2"
    assert str(M("(z^2-4z+1)/(2z)")) == "(z^2 - 4z + 1)/(2z)"
    assert str(M("(z^2+1)/(-2z)")) == "(z^2 + 1)/(-2z)"
    f = M("(2z^2+2)/(4z)")
    assert f.num == Poly([1, 0, 1]) and f.den == Poly([0, 2])
    assert M("(z^2-1)/(z-1)").is_polynomial


def test_eval_at_infinity_and_poles():
    f = M("(z^2-4z+1)/(2z)")
    assert f(INFINITY) is INFINITY
    assert f(0) is INFINITY
    assert M("1/(z^2+1)")(INFINITY) == 0


@given(polys, polys)
def test_ring_operations_match_sympy(a, b):
    assert to_sympy(a * b).expand() == (to_sympy(a) * to_sympy(b)).expand()
    assert to_sympy(a + b).expand() == (to_sympy(a) + to_sympy(b)).expand()
    if not b.is_zero():
        q, r = divmod(a, b)
        assert q * b + r == a
        assert r.is_zero() or r.degree < b.degree


@given(polys, polys)
def test_gcd_matches_sympy(a, b):
    if a.is_zero() and b.is_zero():
        return
    g = poly_gcd(a, b)
    expected = sympy.gcd(to_sympy(a), to_sympy(b))
    assert g.monic() == from_sympy(expected).monic()


@given(st.lists(small, min_size=2, max_size=5), st.lists(small, min_size=2, max_size=5))
def test_resultant_matches_sylvester_determinant(pa, qa):
    p, q = Poly(pa), Poly(qa)
    if p.degree < 1 or q.degree < 1:
        return
    assert resultant(p, q) == sylvester_resultant(p, q)


@given(st.lists(small, min_size=2, max_size=6))
def test_discriminant_matches_sympy(cs):
    p = Poly(cs)
    if p.degree < 1:
        return
    assert discriminant(p) == Fraction(int(sympy.discriminant(to_sympy(p), Z)))


def test_resultant_and_discriminant_known_values():
    z2p1, z = Poly([1, 0, 1]), Poly.z()
    assert resultant(z, z2p1) == 1
    assert discriminant(Poly([1, -3, 0, 1])) == 81
    assert discriminant(Poly([-2, 0, 1])) == 8


@pytest.mark.parametrize("text,n", [("z^2+1", 3), ("z^3-3z+1", 2), ("(z^2-4z+1)/(2z)", 3), ("(3z^2+1)/(z^2-5)", 2)])
def test_iterate_matches_symbolic_composition(text, n):
    f = M(text)
    it = iterate(f, n)
    expr = Z
    fz = to_sympy(f.num) / to_sympy(f.den)
    for _ in range(n):
        expr = fz.subs(Z, expr)
    assert sympy.simplify(expr - to_sympy(it.P) / to_sympy(it.Q)) == 0
    assert it.P.degree <= f.degree ** n and it.Q.degree <= f.degree ** n


def test_iterate_uses_raw_recursion():
    it = iterate(M("(z^2-4z+1)/(2z)"), 2)
    assert it.P(-1) == 88 and it.Q(-1) == -24


def test_iterate_degree_cap():
    with pytest.raises(DegreeCapExceeded):
        iterate(M("z^2+1"), 13, degree_cap=4096)


def test_compose_and_derivative():
    f = Poly([1, 0, 1])
    num, den = compose(f, Poly([1, 1]), Poly.const(1))
    assert num == Poly([2, 2, 1]) and den == Poly.const(1)
    assert derivative(Poly([5, 3, 0, 2])) == Poly([3, 0, 6])


@given(st.integers(-30, 30).filter(lambda b: b != 1))
def test_family_symbolic_data(b):
    f = RatMap.make(Poly([1, -2 * b, 1]), Poly([0, 2 * b - 2]))
    assert wronskian(f) == Poly([-1, 0, 1]) * Poly.const(2 * b - 2)
    assert discriminant(f.num) == 4 * (b * b - 1)
    assert resultant(f.den, f.num) == 4 * (b - 1) ** 2
