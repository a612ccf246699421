"""Small shared helpers: exact-fraction JSON encoding, prime sieves."""

from fractions import Fraction

import numpy as np


def frac_to_str(x):
    """Serialize a Fraction/int as "num" or "num/den" (never floats)."""
    f = Fraction(x)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def frac_from_str(s):
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, str):
        if "/" in s:
            num, den = s.split("/")
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    raise ValueError(f"expected exact rational, got {s!r}")


def primes_below(bound):
    """All primes < bound as an int64 array (simple numpy sieve)."""
    bound = int(bound)
    if bound <= 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(bound, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(bound**0.5) + 1):
        if sieve[p]:
            sieve[p * p::p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def is_prime(n):
    n = int(n)
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def next_prime_congruent(start, residue, modulus, avoid=()):
    """Smallest prime >= start that is = residue (mod modulus) and not in avoid."""
    n = int(start)
    r = n % modulus
    n += (residue - r) % modulus
    while True:
        if n >= 2 and is_prime(n) and n not in avoid:
            return n
        n += modulus
