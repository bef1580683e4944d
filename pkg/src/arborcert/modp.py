"""Polynomial arithmetic over Z/m.

Two layers: plain lists of Python ints for arbitrary moduli (Hensel lifting,
the large-prime coprimality test), and int64 numpy arrays for small primes
(p < 2**20), which is what the finite-field factorisation uses.
Coefficients are stored low to high in both layers.
"""

from __future__ import annotations

import numpy as np

SMALL_PRIME_LIMIT = 1 << 20


# ---------------------------------------------------------------------------
# list layer, arbitrary modulus
# ---------------------------------------------------------------------------

def trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def reduce_list(a, m: int) -> list[int]:
    return trim([c % m for c in a])


def divmod_list(a: list[int], b: list[int], m: int) -> tuple[list[int], list[int]]:
    """Division with remainder; the leading coefficient of b must be a unit mod m."""
    r = [c % m for c in a]
    trim(r)
    db = len(b) - 1
    if db < 0:
        raise ZeroDivisionError
    inv = pow(b[-1], -1, m)
    if len(r) - 1 < db:
        return [], r
    q = [0] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i] * inv % m
        if c:
            q[i - db] = c
            for j in range(db + 1):
                r[i - db + j] = (r[i - db + j] - c * b[j]) % m
    return trim(q), trim(r[:db])


def mul_list(a: list[int], b: list[int], m: int) -> list[int]:
    from .exact import int_poly_mul
    return reduce_list(int_poly_mul(a, b), m)


def gcd_mod_list(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd over F_p (p prime)."""
    a, b = reduce_list(a, p), reduce_list(b, p)
    while b:
        a, b = b, divmod_list(a, b, p)[1]
    if not a:
        return a
    inv = pow(a[-1], -1, p)
    return [c * inv % p for c in a]


def ext_gcd_list(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int], list[int]]:
    """(g, s, t) with s*a + t*b = g monic over F_p."""
    r0, r1 = reduce_list(a, p), reduce_list(b, p)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = divmod_list(r0, r1, p)
        r0, r1 = r1, r
        s0, s1 = s1, sub_list(s0, mul_list(q, s1, p), p)
        t0, t1 = t1, sub_list(t0, mul_list(q, t1, p), p)
    inv = pow(r0[-1], -1, p)
    return ([c * inv % p for c in r0], [c * inv % p for c in s0], [c * inv % p for c in t0])


def add_list(a: list[int], b: list[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % m for i in range(n)])


def sub_list(a: list[int], b: list[int], m: int) -> list[int]:
    n = max(len(a), len(b))
    return trim([((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % m for i in range(n)])


def symmetric(a: list[int], m: int) -> list[int]:
    half = m // 2
    return trim([c - m if c > half else c for c in (x % m for x in a)])


# ---------------------------------------------------------------------------
# numpy layer, small primes
# ---------------------------------------------------------------------------

def np_trim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    return a[: nz[-1] + 1] if nz.size else a[:0]


def np_from_ints(coeffs, p: int) -> np.ndarray:
    return np_trim(np.array([c % p for c in coeffs], dtype=np.int64))


def np_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.size == 0 or b.size == 0:
        return a[:0]
    if min(a.size, b.size) * (p - 1) * (p - 1) >= (1 << 62):
        raise OverflowError("prime too large for int64 convolution")
    return np_trim(np.convolve(a, b) % p)


def np_rem(a: np.ndarray, g: np.ndarray, p: int) -> np.ndarray:
    dg = g.size - 1
    if a.size - 1 < dg:
        return a.copy()
    r = a.copy()
    inv = pow(int(g[-1]), -1, p)
    gm = g if inv == 1 else (g * inv) % p
    for i in range(r.size - 1, dg - 1, -1):
        c = r[i]
        if c:
            r[i - dg:i + 1] = (r[i - dg:i + 1] - c * gm) % p
    return np_trim(r[:dg])


def np_divmod(a: np.ndarray, g: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    dg = g.size - 1
    if a.size - 1 < dg:
        return a[:0], a.copy()
    r = a.copy()
    q = np.zeros(a.size - dg, dtype=np.int64)
    inv = pow(int(g[-1]), -1, p)
    for i in range(r.size - 1, dg - 1, -1):
        c = int(r[i]) * inv % p
        if c:
            q[i - dg] = c
            r[i - dg:i + 1] = (r[i - dg:i + 1] - c * g) % p
    return np_trim(q), np_trim(r[:dg])


def np_monic(a: np.ndarray, p: int) -> np.ndarray:
    if a.size == 0:
        return a
    inv = pow(int(a[-1]), -1, p)
    return (a * inv) % p


def np_gcd(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    a, b = np_trim(a % p), np_trim(b % p)
    while b.size:
        a, b = b, np_rem(a, b, p)
    return np_monic(a, p)


def np_sub(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = max(a.size, b.size)
    out = np.zeros(n, dtype=np.int64)
    out[: a.size] += a
    out[: b.size] -= b
    return np_trim(out % p)


def np_derivative(a: np.ndarray, p: int) -> np.ndarray:
    if a.size <= 1:
        return a[:0]
    return np_trim((a[1:] * np.arange(1, a.size, dtype=np.int64)) % p)


def np_powmod(base: np.ndarray, e: int, g: np.ndarray, p: int) -> np.ndarray:
    result = np.array([1], dtype=np.int64)
    base = np_rem(base, g, p)
    while e:
        if e & 1:
            result = np_rem(np_mul(result, base, p), g, p)
        e >>= 1
        if e:
            base = np_rem(np_mul(base, base, p), g, p)
    return result


def frobenius_matrix(g: np.ndarray, p: int) -> np.ndarray:
    """Matrix of h -> h**p mod g on coefficient vectors (column i = x**(i*p) mod g)."""
    n = g.size - 1
    xp = np_powmod(np.array([0, 1], dtype=np.int64), p, g, p)
    mat = np.zeros((n, n), dtype=np.int64)
    row = np.array([1], dtype=np.int64)
    for i in range(n):
        mat[: row.size, i] = row
        row = np_rem(np_mul(row, xp, p), g, p)
    return mat


def apply_frobenius(mat: np.ndarray, h: np.ndarray, p: int) -> np.ndarray:
    n = mat.shape[0]
    v = np.zeros(n, dtype=np.int64)
    v[: h.size] = h
    # entries < 2**20 so each product < 2**40 and n <= 4096 terms stay below 2**52
    return np_trim(mat.dot(v) % p)
