"""Factorisation of polynomials over Q.

Pipeline for a squarefree primitive integer polynomial g:

1. distinct-degree factorisation modulo several good primes; the subset
   sums of each degree pattern are intersected, and if only 0 and deg g
   survive, g is irreducible;
2. otherwise a full factorisation modulo the best prime (Cantor-Zassenhaus),
   a multifactor Hensel lift past the Mignotte bound, and Zassenhaus
   recombination pruned by the surviving degree sums.

Recombination has a subset budget; exhausting it leaves the result
incomplete rather than guessing.

``composition_witness`` certifies that g(f(x)) is irreducible when g is
irreducible and deg f <= 3, from local data at a single prime.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np

from . import modp
from .exact import Poly, derivative, poly_gcd
from .ntheory import primes_up_to

DEFAULT_DEGREE_CAP = 128
DEFAULT_PATTERN_PRIMES = 5
MAX_PATTERN_PRIMES = 40
DEFAULT_SUBSET_BUDGET = 20000
_PRIME_POOL = primes_up_to(1 << 15)[1:]  # odd primes below 2**15


class FactorizationCapExceeded(ValueError):
    pass


@dataclass
class Factorization:
    """f == content * prod(factor ** e); factors primitive in Z[z] with positive leading coefficient."""

    content: Fraction
    factors: list[tuple[Poly, int]] = field(default_factory=list)
    complete: bool = True

    @property
    def count(self) -> int:
        """Number of irreducible factors counted with multiplicity (constants excluded)."""
        return sum(e for _, e in self.factors)

    @property
    def degrees(self) -> list[int]:
        return sorted(g.degree for g, e in self.factors for _ in range(e))


# ---------------------------------------------------------------------------
# integer polynomial helpers (lists low to high)
# ---------------------------------------------------------------------------

def _content(a: list[int]) -> int:
    return reduce(math.gcd, a, 0)


def _primitive(a: list[int]) -> list[int]:
    g = _content(a)
    if a[-1] < 0:
        g = -g
    return [c // g for c in a]


def _exact_divide(a: list[int], b: list[int]) -> list[int] | None:
    """a / b over Z if b divides a exactly, else None."""
    if len(b) > len(a):
        return None
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    q = [0] * (len(a) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c:
            if c % lb:
                return None
            c //= lb
            q[i - db] = c
            for j in range(db + 1):
                r[i - db + j] -= c * b[j]
    if any(r[:db]):
        return None
    return q


def _to_poly(a: list[int]) -> Poly:
    return Poly(a)


def _is_squarefree_mod(a: list[int], p: int) -> bool:
    ar = modp.np_from_ints(a, p)
    if ar.size != len(a):
        return False  # leading coefficient vanished mod p
    g = modp.np_gcd(ar, modp.np_derivative(ar, p), p)
    return g.size == 1


def _good_primes(a: list[int], avoid: int = 1):
    for p in _PRIME_POOL:
        if a[-1] % p == 0 or avoid % p == 0:
            continue
        if _is_squarefree_mod(a, p):
            yield p


# ---------------------------------------------------------------------------
# finite-field factorisation
# ---------------------------------------------------------------------------

def distinct_degree(g: np.ndarray, p: int) -> list[tuple[int, np.ndarray]]:
    """DDF of a monic squarefree g over F_p: [(k, product of all degree-k factors)]."""
    out = []
    n = g.size - 1
    if n <= 0:
        return out
    mat = modp.frobenius_matrix(g, p)
    x = np.array([0, 1], dtype=np.int64)
    h = x.copy()
    rest = g.copy()
    k = 0
    while rest.size - 1 >= 2 * (k + 1):
        k += 1
        h = modp.apply_frobenius(mat, h, p)
        comp = modp.np_gcd(rest, modp.np_sub(h, x, p), p)
        if comp.size > 1:
            out.append((k, comp))
            rest = modp.np_divmod(rest, comp, p)[0]
            rest = modp.np_monic(rest, p)
            h = modp.np_rem(h, rest, p) if rest.size > 1 else h
    if rest.size > 1:
        out.append((rest.size - 1, rest))
    return out


def degree_pattern(a: list[int], p: int) -> list[int]:
    """Degrees of the irreducible factors of a mod p (a squarefree mod p)."""
    g = modp.np_monic(modp.np_from_ints(a, p), p)
    pattern = []
    for k, comp in distinct_degree(g, p):
        pattern.extend([k] * ((comp.size - 1) // k))
    return sorted(pattern)


def _subset_sum_mask(pattern: list[int]) -> int:
    mask = 1
    for k in pattern:
        mask |= mask << k
    return mask


def _equal_degree(comp: np.ndarray, k: int, p: int, rng: random.Random) -> list[np.ndarray]:
    """Split a product of degree-k irreducibles over F_p (p odd)."""
    n = comp.size - 1
    if n == k:
        return [comp]
    mat = modp.frobenius_matrix(comp, p)
    while True:
        a = np.array([rng.randrange(p) for _ in range(n)], dtype=np.int64)
        a = modp.np_trim(a)
        if a.size <= 1:
            continue
        # norm-like product a * a^p * ... * a^(p^(k-1)), then power (p-1)/2
        b = a.copy()
        ai = a.copy()
        for _ in range(k - 1):
            ai = modp.apply_frobenius(mat, ai, p)
            b = modp.np_rem(modp.np_mul(b, ai, p), comp, p)
        c = modp.np_powmod(b, (p - 1) // 2, comp, p)
        c = modp.np_sub(c, np.array([1], dtype=np.int64), p)
        d = modp.np_gcd(comp, c, p)
        if 1 < d.size < comp.size:
            e = modp.np_monic(modp.np_divmod(comp, d, p)[0], p)
            return _equal_degree(d, k, p, rng) + _equal_degree(e, k, p, rng)


def factor_mod_p(a: list[int], p: int, seed: int = 0) -> list[list[int]]:
    """Monic irreducible factors of a squarefree a over F_p as int lists."""
    rng = random.Random(seed * 1000003 + p)
    g = modp.np_monic(modp.np_from_ints(a, p), p)
    out = []
    for k, comp in distinct_degree(g, p):
        for h in _equal_degree(comp, k, p, rng):
            out.append([int(c) for c in h])
    return out


# ---------------------------------------------------------------------------
# Hensel lifting
# ---------------------------------------------------------------------------

def _hensel_step(f, g, h, s, t, m):
    """One quadratic Hensel step from m to m*m (von zur Gathen-Gerhard 15.10)."""
    m2 = m * m
    ml = modp.mul_list
    e = modp.sub_list(f, ml(g, h, m2), m2)
    q, r = modp.divmod_list(ml(s, e, m2), h, m2)
    g2 = modp.add_list(g, modp.add_list(ml(t, e, m2), ml(q, g, m2), m2), m2)
    h2 = modp.add_list(h, r, m2)
    b = modp.sub_list(modp.add_list(ml(s, g2, m2), ml(t, h2, m2), m2), [1], m2)
    c, d = modp.divmod_list(ml(s, b, m2), h2, m2)
    s2 = modp.sub_list(s, d, m2)
    t2 = modp.sub_list(t, modp.add_list(ml(t, b, m2), ml(c, g2, m2), m2), m2)
    return g2, h2, s2, t2


def hensel_lift(f: list[int], factors: list[list[int]], p: int, rounds: int) -> list[list[int]]:
    """Lift monic factors of f mod p to monic factors mod p**(2**rounds)."""
    if len(factors) == 1:
        M = p ** (1 << rounds)
        inv = pow(f[-1], -1, M)
        return [modp.reduce_list([c * inv for c in f], M)]
    half = len(factors) // 2
    left, right = factors[:half], factors[half:]
    lc = f[-1] % p
    g = modp.reduce_list([c * lc for c in reduce(lambda x, y: modp.mul_list(x, y, p), left)], p)
    h = reduce(lambda x, y: modp.mul_list(x, y, p), right)
    one, s, t = modp.ext_gcd_list(g, h, p)
    if one != [1]:
        raise ArithmeticError("factors not coprime mod p")
    m = p
    for _ in range(rounds):
        g, h, s, t = _hensel_step(f, g, h, s, t, m)
        m *= m
    return hensel_lift(g, left, p, rounds) + hensel_lift(h, right, p, rounds)


# ---------------------------------------------------------------------------
# factorisation over Z
# ---------------------------------------------------------------------------

def _mignotte(a: list[int]) -> int:
    norm2 = math.isqrt(sum(c * c for c in a)) + 1
    return 2 * abs(a[-1]) * (1 << (len(a) - 1)) * norm2


def factor_squarefree(
    a: list[int],
    pattern_primes: int = DEFAULT_PATTERN_PRIMES,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
    seed: int = 0,
) -> tuple[list[list[int]], bool]:
    """Irreducible factors of a primitive squarefree integer polynomial; (factors, complete)."""
    n = len(a) - 1
    if n <= 1:
        return [a], True
    full = (1 << (n + 1)) - 1
    mask = full
    best: tuple[int, int] | None = None  # (factor count, prime)
    used = 0
    stale = 0
    for p in _good_primes(a):
        pat = degree_pattern(a, p)
        used += 1
        new_mask = mask & _subset_sum_mask(pat)
        stale = stale + 1 if new_mask == mask else 0
        mask = new_mask
        if best is None or len(pat) < best[0]:
            best = (len(pat), p)
        if mask == (1 | (1 << n)):
            return [a], True
        if used >= pattern_primes and (stale >= 3 or used >= MAX_PATTERN_PRIMES):
            break
    if best is None:
        raise ArithmeticError("no good prime found")
    p = best[1]
    mods = factor_mod_p(a, p, seed)
    bound = _mignotte(a)
    rounds = 0
    while p ** (1 << rounds) <= bound:
        rounds += 1
    M = p ** (1 << rounds)
    lifted = hensel_lift(a, mods, p, rounds)
    return _recombine(a, lifted, M, mask, subset_budget)


def _recombine(a, lifted, M, mask, budget):
    factors = []
    G = list(a)
    U = list(lifted)
    s = 1
    tried = 0
    while 2 * s <= len(U):
        hit = False
        for S in combinations(range(len(U)), s):
            deg = sum(len(U[i]) - 1 for i in S)
            if not (mask >> deg) & 1:
                continue
            tried += 1
            if tried > budget:
                return factors + [G], False
            lc = G[-1]
            prod = [lc % M]
            for i in S:
                prod = modp.mul_list(prod, U[i], M)
            v = modp.symmetric(prod, M)
            if not v or len(v) - 1 != deg:
                continue
            pv = _primitive(v)
            if G[0] != 0 and pv[0] != 0 and G[0] % pv[0]:
                continue
            q = _exact_divide(G, pv)
            if q is None:
                continue
            factors.append(pv)
            G = q
            U = [U[i] for i in range(len(U)) if i not in S]
            hit = True
            break
        if not hit:
            s += 1
    if len(G) > 1:
        factors.append(_primitive(G))
    return factors, True


def squarefree_decomposition(f: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm over Q; returns monic squarefree parts with multiplicities."""
    f = f.monic()
    out = []
    df = derivative(f)
    a = poly_gcd(f, df)
    b = f // a
    c = df // a
    d = c - derivative(b)
    i = 1
    while b.degree > 0:
        g = poly_gcd(b, d)
        if g.degree > 0:
            out.append((g.monic(), i))
        b = b // g
        c = d // g
        d = c - derivative(b)
        i += 1
    return out


def factor_over_q(
    f: Poly,
    degree_cap: int = DEFAULT_DEGREE_CAP,
    pattern_primes: int = DEFAULT_PATTERN_PRIMES,
    subset_budget: int = DEFAULT_SUBSET_BUDGET,
    seed: int = 0,
) -> Factorization:
    """Complete factorisation of a nonzero polynomial over Q."""
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    if f.degree > degree_cap:
        raise FactorizationCapExceeded(f"degree {f.degree} exceeds cap {degree_cap}")
    content, ints = f.primitive()
    if f.degree == 0:
        return Factorization(f.leading, [], True)
    parts: list[tuple[list[int], int]]
    if any(_is_squarefree_mod(ints, p) for p in _PRIME_POOL[:20]):
        parts = [(ints, 1)]
    else:
        parts = [(g.primitive()[1], e) for g, e in squarefree_decomposition(f)]
    out: list[tuple[Poly, int]] = []
    complete = True
    for g, e in parts:
        # strip the factor z first: it is common for iterates with a fixed root
        while g[0] == 0:
            out.append((Poly.z(), e))
            g = g[1:]
        if len(g) == 1:
            continue
        fs, ok = factor_squarefree(g, pattern_primes, subset_budget, seed)
        complete = complete and ok
        out.extend((_to_poly(_primitive(h)), e) for h in fs)
    merged: dict[Poly, int] = {}
    for g, e in out:
        merged[g] = merged.get(g, 0) + e
    factors = sorted(merged.items(), key=lambda t: (t[0].degree, t[0].coeffs))
    prod = Poly.const(1)
    for g, e in factors:
        prod = prod * g ** e
    c = f.leading / prod.leading if complete else content
    return Factorization(c, factors, complete)


# ---------------------------------------------------------------------------
# irreducibility of compositions
# ---------------------------------------------------------------------------

def _np_compose(g: np.ndarray, f: np.ndarray, p: int) -> np.ndarray:
    out = np.array([int(g[-1])], dtype=np.int64)
    for c in g[-2::-1]:
        out = modp.np_mul(out, f, p)
        out = modp.np_sub(out, np.array([-int(c) % p], dtype=np.int64), p)
    return out


def _reduce_rational(poly: Poly, p: int) -> list[int] | None:
    d, ints = poly.integer_form()
    if d % p == 0:
        return None
    inv = pow(d, -1, p)
    return [c * inv % p for c in ints]


def composition_witness(g: Poly, f: Poly, max_primes: int = 30, skip: int = 1) -> int | None:
    """A prime p proving g(f(x)) irreducible over Q, or None.

    Requires g monic irreducible over Q and f monic of degree 2 or 3. For a
    prime p not dividing any denominator and with g squarefree mod p, each
    irreducible factor h of g mod p (degree k) is a prime of Q(beta), beta a
    root of g. If h(f(x)) has no factor of degree k over F_p then f(x) - beta
    has no root in Q(beta), hence is irreducible, and Capelli's lemma gives
    irreducibility of g(f(x)). ``skip`` is an extra integer whose primes are
    avoided.
    """
    if f.degree not in (2, 3) or f.leading != 1 or g.leading != 1:
        raise ValueError("composition witness needs monic g and monic f of degree 2 or 3")
    tried = 0
    for p in _PRIME_POOL:
        if skip % p == 0:
            continue
        gr = _reduce_rational(g, p)
        fr = _reduce_rational(f, p)
        if gr is None or fr is None:
            continue
        gn = modp.np_trim(np.array(gr, dtype=np.int64))
        if modp.np_gcd(gn, modp.np_derivative(gn, p), p).size != 1:
            continue
        tried += 1
        fn = modp.np_trim(np.array(fr, dtype=np.int64))
        x = np.array([0, 1], dtype=np.int64)
        for k, comp in distinct_degree(gn, p):
            H = _np_compose(comp, fn, p)
            mat = modp.frobenius_matrix(H, p)
            h = x.copy()
            for _ in range(k):
                h = modp.apply_frobenius(mat, h, p)
            if modp.np_gcd(H, modp.np_sub(h, x, p), p).size == 1:
                return p
        if tried >= max_primes:
            return None
    return None


def irreducible_by_witness_chain(f: Poly, n: int, max_primes: int = 30) -> list[int] | None:
    """Witness primes proving f, f^2, ..., f^n irreducible (f monic, degree 2 or 3)."""
    witnesses = []
    g = Poly.z()
    for _ in range(n):
        p = composition_witness(g, f, max_primes)
        if p is None:
            return None
        witnesses.append(p)
        g = _compose_poly(g, f)
    return witnesses


def _compose_poly(g: Poly, f: Poly) -> Poly:
    out = Poly()
    for c in reversed(g.coeffs):
        out = out * f + c
    return out
