"""Exact arithmetic with roots of unity.

A value is a length-e integer (or Fraction) vector c representing
sum_t c[t] * w^t, where w is a fixed primitive e-th root of unity.
Addition and multiplication happen in Z[x]/(x^e - 1); the representation
is not unique there, so equality tests and rational extraction reduce
modulo the e-th cyclotomic polynomial first.  Keeping raw vectors integral
makes bulk character-table work pure numpy; reduction happens only at
comparison boundaries.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np


def _poly_divexact(num, den):
    # exact division of integer polynomials, coefficients low-to-high
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        assert c % den[-1] == 0
        q[i] = c // den[-1]
        for j, d in enumerate(den):
            num[i + j] -= q[i] * d
    assert all(c == 0 for c in num)
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(e):
    """Coefficients (low to high) of the e-th cyclotomic polynomial."""
    if e == 1:
        return (-1, 1)
    poly = [-1] + [0] * (e - 1) + [1]  # x^e - 1
    for d in range(1, e):
        if e % d == 0:
            poly = _poly_divexact(poly, cyclotomic_polynomial(d))
    return tuple(poly)


@lru_cache(maxsize=None)
def reduction_matrix(e):
    """Integer matrix R with rows = x^t mod Phi_e, shape (e, phi(e)).

    Reducing a raw vector is then just c @ R; equal cyclotomic numbers get
    equal reduced vectors, and rationals show up as multiples of row 0.
    """
    phi = cyclotomic_polynomial(e)
    deg = len(phi) - 1
    rows = np.zeros((e, deg), dtype=np.int64)
    cur = [0] * deg
    cur[0] = 1
    for t in range(e):
        rows[t] = cur
        # multiply by x modulo Phi_e (monic, integer)
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for j in range(deg):
                cur[j] -= lead * phi[j]
    return rows


def reduce_vec(vec, e):
    """Canonical tuple for a raw coefficient vector (ints or Fractions)."""
    R = reduction_matrix(e)
    deg = R.shape[1]
    out = [0] * deg
    for t, c in enumerate(vec):
        if c:
            row = R[t]
            for j in range(deg):
                if row[j]:
                    out[j] += c * int(row[j])
    return tuple(out)


def mul(a, b, e):
    """Product in Z[x]/(x^e - 1): circular convolution."""
    out = [0] * e
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[(i + j) % e] += ai * bj
    return out


def conj(a, e):
    """Complex conjugate: w^t -> w^(-t)."""
    out = [0] * e
    for t, c in enumerate(a):
        out[(-t) % e] = c
    return out


def as_rational(vec, e):
    """Return the value as a Fraction if it is rational, else None."""
    red = reduce_vec(vec, e)
    if any(red[1:]):
        return None
    return Fraction(red[0])


def scale_order(vec, e, target):
    """Re-express a vector of order e in order `target` (e must divide target)."""
    assert target % e == 0
    m = target // e
    out = [0] * target
    for t, c in enumerate(vec):
        out[t * m] = c
    return out


@lru_cache(maxsize=None)
def conj_perm(e):
    """Index permutation implementing conjugation on raw vectors."""
    return np.array([(-t) % e for t in range(e)], dtype=np.intp)


@lru_cache(maxsize=None)
def corr_tensor(e):
    """One-hot tensor T[a, b, t] = 1 iff a - b = t (mod e).

    einsum('...a,...b,abt->...t', A, B, T) computes A * conj(B) batched.
    """
    T = np.zeros((e, e, e), dtype=np.int64)
    for a in range(e):
        for b in range(e):
            T[a, b, (a - b) % e] = 1
    return T


def batch_reduce(arr, e):
    """Reduce a (..., e) int array of raw vectors to canonical (..., phi(e))."""
    arr = np.asarray(arr, dtype=np.int64)
    return arr @ reduction_matrix(e)


def primitive_root(p):
    """Smallest primitive root modulo a prime p."""
    fac = []
    m = p - 1
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
    raise ValueError(f"no primitive root mod {p}")


def nth_root_mod(e, ell):
    """A primitive e-th root of unity modulo a prime ell = 1 (mod e)."""
    assert (ell - 1) % e == 0
    g = primitive_root(ell)
    z = pow(g, (ell - 1) // e, ell)
    # primitivity check: z^(e/q) != 1 for prime q | e
    q = 2
    m = e
    while q * q <= m:
        if m % q == 0:
            assert pow(z, e // q, ell) != 1
            while m % q == 0:
                m //= q
        q += 1
    if m > 1:
        assert pow(z, e // m, ell) != 1
    return z


def lcm(a, b):
    return a // gcd(a, b) * b
