import pytest
import sympy
from hypothesis import given, settings, strategies as st

from arborcert import Poly, iterate
from arborcert.polyfactor import (
    composition_witness,
    degree_pattern,
    factor_mod_p,
    factor_over_q,
    irreducible_by_witness_chain,
    squarefree_decomposition,
)
from conftest import M, Z, to_sympy


def sympy_degrees(p: Poly):
    _, fl = sympy.factor_list(to_sympy(p), Z)
    return sorted(sympy.degree(g, Z) for g, e in fl for _ in range(e) if sympy.degree(g, Z) > 0)


def our_degrees(p: Poly):
    fac = factor_over_q(p)
    assert fac.complete
    return sorted(fac.degrees)


@pytest.mark.parametrize("text,levels", [("z^2-z", 5), ("z^2+1", 5), ("z^3-3z+1", 3), ("z^2-2", 4), ("z^3+7z^2-7", 3), ("z^2", 4)])
def test_iterates_match_sympy(text, levels):
    f = M(text)
    for n in range(1, levels + 1):
        P = iterate(f, n).P
        assert our_degrees(P) == sympy_degrees(P)


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=2, max_size=4), min_size=1, max_size=4))
def test_random_products_match_sympy(parts):
    p = Poly([1])
    for cs in parts:
        q = Poly(cs)
        if q.degree >= 1:
            p = p * q
    if p.degree < 1:
        return
    fac = factor_over_q(p)
    prod = Poly.const(fac.content)
    for g, e in fac.factors:
        prod = prod * g ** e
    assert prod == p
    assert sorted(fac.degrees) == sympy_degrees(p)


def test_factor_mod_p_reconstructs():
    ints = [1, 0, -3, 0, 0, 1, 4]
    target = sympy.Poly(list(reversed(ints)), Z, modulus=None)
    for p in (5, 7, 101):
        fs = factor_mod_p(ints, p)
        prod = sympy.Poly(1, Z, modulus=p)
        for g in fs:
            assert g[-1] == 1
            prod *= sympy.Poly(list(reversed(g)), Z, modulus=p)
        assert prod == sympy.Poly(list(reversed(ints)), Z, modulus=p).monic()
        assert sorted(len(g) - 1 for g in fs) == sorted(
            sympy.degree(h.as_expr(), Z) for h, _ in sympy.Poly(target.as_expr(), Z, modulus=p).factor_list()[1])


def test_degree_pattern_of_irreducible_quadratic():
    assert sorted(degree_pattern([1, 0, 1], 3)) == [2]
    assert sorted(degree_pattern([1, 0, 1], 5)) == [1, 1]


def test_squarefree_decomposition():
    p = Poly.from_roots([1, 1, 2, 3, 3, 3])
    parts = squarefree_decomposition(p)
    assert {e: g.degree for g, e in parts} == {2: 1, 1: 1, 3: 1}


def test_witness_chain():
    assert irreducible_by_witness_chain(M("z^2+1").num, 6)
    assert irreducible_by_witness_chain(M("z^3-3z+1").num, 3)
    # z^2 - z has the factor z at every level
    assert not irreducible_by_witness_chain(M("z^2-z").num, 2)


def test_witness_is_sound_on_reducible_composition():
    # g(f(z)) = z^2 - 4 factors, so no witness may be produced
    g, f = Poly([-4, 1]), Poly([0, 0, 1])
    assert composition_witness(g, f) is None
