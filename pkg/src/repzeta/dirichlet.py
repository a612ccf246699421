"""Exact Dirichlet-series arithmetic and abscissa-of-convergence calculus.

Finite Dirichlet series with nonnegative rational coefficients are the common
output format of every zeta computation in this package.  On top of them live
the two local-factor normal forms (the Jaikin shape and the monomial family
shape), equivalence checking for families of series, and the abscissa formulas
for Euler products over prime sets, together with an empirical
truncated-product bisection that every formula is tested against.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._util import frac_from_str, frac_to_str, primes_below

NEG_INFINITY = float("-inf")


class UndefinedInputError(ValueError):
    """Input outside the operation's domain (empty grid, all-zero counts...)."""


class PoleError(ArithmeticError):
    """Evaluation at a pole of a local factor; carries the offending (A, B) pair."""

    def __init__(self, pair, message=None):
        self.pair = tuple(pair)
        super().__init__(message or f"local factor has a pole from pair {pair}")


class InvalidFamilyError(ValueError):
    """A monomial local family violating e + sum(A) > 0, or an A=0, B>0 pair."""


def _exact_pow(base, s):
    """base**(-s) as a Fraction when s is a nonnegative integer, else float."""
    if isinstance(s, (int, Fraction)) and Fraction(s).denominator == 1 and s >= 0:
        return Fraction(1, int(base) ** int(s)) if base != 1 else Fraction(1)
    return float(base) ** (-float(s))


class DirichletPoly:
    """Finite Dirichlet series sum_n terms[n] * n^(-s), exact coefficients.

    Immutable after construction.  Multiplicities are rationals so that
    Clifford-theoretic weighted sums (1/[H:Stab] weights) stay exact.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms=()):
        data = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for n, c in items:
            n = int(n)
            c = Fraction(c) if not isinstance(c, str) else frac_from_str(c)
            if n < 1:
                raise ValueError(f"dimension {n} < 1")
            if c < 0:
                raise ValueError(f"negative multiplicity at dimension {n}")
            if c:
                data[n] = data.get(n, Fraction(0)) + c
        self._terms = dict(sorted(data.items()))

    @property
    def terms(self):
        return dict(self._terms)

    def coefficient(self, n):
        return self._terms.get(int(n), Fraction(0))

    def dimensions(self):
        return list(self._terms)

    def evaluate(self, s):
        """Value at real s; exact Fraction for a nonnegative integer s."""
        if isinstance(s, (int, Fraction)) and Fraction(s).denominator == 1 and s >= 0:
            return sum((c * Fraction(1, n ** int(s)) for n, c in self._terms.items()),
                       Fraction(0))
        return float(sum(float(c) * float(n) ** (-float(s)) for n, c in self._terms.items()))

    def total_count(self):
        return sum(self._terms.values(), Fraction(0))

    def scale(self, c):
        c = Fraction(c)
        return DirichletPoly({n: c * v for n, v in self._terms.items()})

    def __add__(self, other):
        out = dict(self._terms)
        for n, c in other._terms.items():
            out[n] = out.get(n, Fraction(0)) + c
        return DirichletPoly(out)

    def __mul__(self, other):
        """Dirichlet product: dimensions multiply (zeta of a direct product)."""
        out = {}
        for n, c in self._terms.items():
            for m, d in other._terms.items():
                out[n * m] = out.get(n * m, Fraction(0)) + c * d
        return DirichletPoly(out)

    def __eq__(self, other):
        return isinstance(other, DirichletPoly) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        inner = ", ".join(f"{n}: {frac_to_str(c)}" for n, c in self._terms.items())
        return f"DirichletPoly({{{inner}}})"

    def to_json(self):
        return {"terms": [[n, frac_to_str(c)] for n, c in self._terms.items()]}

    @classmethod
    def from_json(cls, obj):
        return cls([(n, frac_from_str(c)) for n, c in obj["terms"]])


def eval_dirichlet(poly, s):
    """sum_n terms[n] * n^(-s); exact rational when s is a nonnegative integer."""
    return poly.evaluate(s)


def abscissa_from_counts(counts):
    """log(r_1 + ... + r_N) / log N, the N-th term of the limsup sequence.

    Feeding increasing N lets the caller watch the limsup defining the growth
    exponent of the representation count sequence.
    """
    counts = list(counts)
    if len(counts) < 2:
        raise UndefinedInputError("need at least two counts")
    if any(c < 0 for c in counts):
        raise UndefinedInputError("counts must be nonnegative")
    total = sum(counts)
    if total == 0:
        raise UndefinedInputError("all counts are zero")
    return math.log(total) / math.log(len(counts))


@dataclass(frozen=True)
class JaikinTerm:
    n: int
    f: tuple  # polynomial in p^(-s), coefficients low-to-high, nonnegative ints
    pairs: tuple  # ((A, B), ...) nonnegative integers

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if any(c < 0 for c in self.f):
            raise ValueError("f must have nonnegative coefficients")
        if any(a < 0 or b < 0 for a, b in self.pairs):
            raise ValueError("pairs must be nonnegative")


@dataclass(frozen=True)
class JaikinLocalFactor:
    """Local factor sum_i n_i^(-s) f_i(p^(-s)) / prod_j (1 - p^(-A_ij s + B_ij))."""

    terms: tuple

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(
            t if isinstance(t, JaikinTerm) else JaikinTerm(t[0], tuple(t[1]), tuple(map(tuple, t[2])))
            for t in terms))

    def to_json(self):
        return {"terms": [{"n": t.n, "f": list(t.f), "pairs": [list(p) for p in t.pairs]}
                          for t in self.terms]}

    @classmethod
    def from_json(cls, obj):
        return cls([(t["n"], t["f"], t["pairs"]) for t in obj["terms"]])

    def expand(self, p, max_exponent):
        """Expand into a DirichletPoly, truncating geometric series at p^(-max_exponent * s).

        Dimensions are n_i * p^(deg + sum A_j k_j); the expansion is exact up to
        the truncation and is the direct-summation oracle for jaikin_eval.
        """
        out = {}

        def add_term(dim_exp, coef, n):
            dim = n * p**dim_exp
            out[dim] = out.get(dim, Fraction(0)) + coef

        for t in self.terms:
            base = [(0, Fraction(1))]  # (exponent of p in dimension, coefficient)
            for A, B in t.pairs:
                new = []
                for e0, c0 in base:
                    k = 0
                    while e0 + A * k <= max_exponent:
                        new.append((e0 + A * k, c0 * p ** (B * k)))
                        if A == 0:
                            break
                        k += 1
                base = new
            for deg, fc in enumerate(t.f):
                if fc == 0:
                    continue
                for e0, c0 in base:
                    if deg + e0 <= max_exponent:
                        add_term(deg + e0, fc * c0, t.n)
        return DirichletPoly(out)


def jaikin_eval(factor, p, s):
    """Evaluate a Jaikin-shape local factor at (p, s); PoleError inside a pole."""
    exact = isinstance(s, int) or (isinstance(s, Fraction) and s.denominator == 1)
    total = Fraction(0) if exact else 0.0
    for t in factor.terms:
        for A, B in t.pairs:
            if A * Fraction(s) - B <= 0:
                raise PoleError((A, B))
        x = _exact_pow(p, s)  # p^(-s)
        fval = sum(c * x**k for k, c in enumerate(t.f))
        denom = 1
        for A, B in t.pairs:
            if exact:
                denom *= 1 - Fraction(p ** B, p ** (A * int(s)))
            else:
                denom *= 1.0 - float(p) ** (-A * float(s) + B)
        val = _exact_pow(t.n, s) * fval / denom
        total = total + val
    return total


@dataclass(frozen=True)
class MonomialTerm:
    d: int
    e: int
    pairs: tuple  # ((A, B), ...)

    def __post_init__(self):
        if self.d < 0 or self.e < 0:
            raise ValueError("d, e must be nonnegative")
        for A, B in self.pairs:
            if A < 0 or B < 0:
                raise ValueError("pairs must be nonnegative")

    def effective_pairs(self):
        """Pairs with the removable (0,0) constants dropped; A=0,B>0 rejected."""
        out = []
        for A, B in self.pairs:
            if A == 0 and B > 0:
                raise InvalidFamilyError(f"pair (0, {B}): pole structure degenerate")
            if A == 0 and B == 0:
                continue  # factor p^0/(1-p^0) never arises from a convergent series
            out.append((A, B))
        return out


@dataclass(frozen=True)
class MonomialLocalFamily:
    """Uniform local-factor shape sum_i p^(d_i - e_i s) prod_j p^(-A s + B)/(1 - p^(-A s + B))."""

    terms: tuple

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(
            t if isinstance(t, MonomialTerm) else MonomialTerm(int(t["d"]), int(t["e"]),
                                                               tuple(map(tuple, t["pairs"])))
            if isinstance(t, dict) else
            (t if isinstance(t, MonomialTerm) else MonomialTerm(t[0], t[1], tuple(map(tuple, t[2]))))
            for t in terms))

    def validate(self):
        for t in self.terms:
            pairs = t.effective_pairs()
            if t.e + sum(a for a, _ in pairs) <= 0:
                raise InvalidFamilyError(f"term {t}: e + sum(A) must be positive")

    def to_json(self):
        return {"terms": [{"d": t.d, "e": t.e, "pairs": [list(p) for p in t.pairs]}
                          for t in self.terms]}

    @classmethod
    def from_json(cls, obj):
        return cls(obj["terms"])

    def local_value(self, p, s):
        """Value of the local factor at prime(s) p; p may be a numpy array.

        Returns +inf beyond a pole (the truncated product diverges there).
        """
        p = np.asarray(p, dtype=np.float64)
        s = float(s)
        total = np.zeros_like(p)
        for t in self.terms:
            val = p ** (t.d - t.e * s)
            ok = True
            for A, B in t.effective_pairs():
                q = p ** (-A * s + B)
                if np.any(q >= 1.0):
                    ok = False
                    break
                val = val * q / (1.0 - q)
            if not ok:
                return np.full_like(p, np.inf)
            total = total + val
        return total


def monomial_family_abscissa(family):
    """Abscissa of the Euler product of a monomial family over a positive-density prime set.

    max over terms of max{(sum B + d + 1)/(e + sum A), max_j B_j/A_j}; pairs with
    A=0 contribute only through the first expression (B>0 with A=0 is rejected).
    """
    family.validate()
    best = None
    for t in family.terms:
        pairs = t.effective_pairs()
        sum_a = sum(a for a, _ in pairs)
        sum_b = sum(b for _, b in pairs)
        cand = Fraction(sum_b + t.d + 1, t.e + sum_a)
        for A, B in pairs:
            if A > 0:
                cand = max(cand, Fraction(B, A))
        best = cand if best is None else max(best, cand)
    if best is None:
        raise InvalidFamilyError("family has no terms")
    return best


def factor_pole_abscissa(family):
    """Largest pole max_j B_j/A_j of a single factor (finitely many primes case)."""
    best = None
    for t in family.terms:
        for A, B in t.effective_pairs():
            if A > 0:
                r = Fraction(B, A)
                best = r if best is None else max(best, r)
    return best  # None means the factor is entire


def archimedean_abscissa(rank, positive_roots):
    """Abscissa r/|Phi_+| of the local factor at infinity for root-system data."""
    if positive_roots < 1:
        raise UndefinedInputError("positive root count must be >= 1")
    return Fraction(rank, positive_roots)


@dataclass(frozen=True)
class EulerPart:
    """One local piece of an Euler product: a prime set plus its uniform factor shape."""

    family: MonomialLocalFamily
    artin: object = None  # duck-typed: .contains(p); None means all primes
    finite: bool = False

    def contains(self, p):
        return True if self.artin is None else bool(self.artin.contains(p))


@dataclass(frozen=True)
class EulerProductSpec:
    parts: tuple = ()
    archimedean: tuple = None  # (rank, positive_roots)

    def __init__(self, parts=(), archimedean=None):
        object.__setattr__(self, "parts", tuple(parts))
        object.__setattr__(self, "archimedean",
                           tuple(archimedean) if archimedean is not None else None)

    def validate_disjoint(self, prime_bound=10**4):
        """Empirically confirm the referenced prime sets are pairwise disjoint."""
        ps = primes_below(prime_bound)
        for i in range(len(self.parts)):
            for j in range(i + 1, len(self.parts)):
                for p in ps:
                    if self.parts[i].contains(int(p)) and self.parts[j].contains(int(p)):
                        raise InvalidFamilyError(
                            f"parts {i} and {j} both contain prime {p}")
        return True

    def to_json(self):
        return {
            "archimedean": list(self.archimedean) if self.archimedean else None,
            "parts": [{
                "family": part.family.to_json(),
                "finite": part.finite,
                "artin": part.artin.to_json() if hasattr(part.artin, "to_json") else None,
            } for part in self.parts],
        }


def euler_abscissa(spec):
    """Abscissa of the full Euler product: the max over all local contributions."""
    candidates = []
    if spec.archimedean is not None:
        candidates.append(archimedean_abscissa(*spec.archimedean))
    for part in spec.parts:
        if part.finite:
            pole = factor_pole_abscissa(part.family)
            if pole is not None:
                candidates.append(pole)
        else:
            candidates.append(monomial_family_abscissa(part.family))
    if not candidates:
        return NEG_INFINITY
    return max(candidates)


def check_equivalence(family_a, family_b, C, s_grid):
    """Sampled equivalence check: C^(-1-s) b_n(s) <= a_n(s) <= C^(1+s) b_n(s).

    Families are mappings from a shared index set to DirichletPoly objects or
    callables s -> value.  The check runs on the supplied finite grid only;
    universal quantification over all s past the abscissae is not decidable
    from samples.
    """
    s_grid = list(s_grid)
    if not s_grid:
        raise UndefinedInputError("empty s grid")
    if set(family_a) != set(family_b):
        raise UndefinedInputError("families must share an index set")
    C = Fraction(C)

    def value(member, s):
        if isinstance(member, DirichletPoly):
            return member.evaluate(s)
        return member(s)

    for n in family_a:
        for s in s_grid:
            a = value(family_a[n], s)
            b = value(family_b[n], s)
            exact = isinstance(a, Fraction) and isinstance(b, Fraction) \
                and isinstance(s, (int, Fraction)) and Fraction(s).denominator == 1
            if exact:
                bound = C ** (1 + int(s))
                if not (b / bound <= a <= b * bound):
                    return False
            else:
                bound = float(C) ** (1.0 + float(s))
                a, b = float(a), float(b)
                if not (b / bound <= a <= b * bound):
                    return False
    return True


def truncated_product_abscissa(local_value, prime_bound=10**6, tol=0.05,
                               s_lo=Fraction(1, 100), s_hi=8.0,
                               grow_threshold=0.05):
    """Empirical abscissa of prod_p (1 + a_p(s)) by bisection on a doubling test.

    local_value(p_array, s) -> array of local values a_p(s).  A point s counts
    as convergent when the log partial product over primes < bound moves by
    less than `grow_threshold` (relatively) when the bound doubles from
    bound/2 to bound.  Returns (estimate, status) with status in
    {"ok", "inconclusive", "empty"}; estimate is -inf for an empty product.
    """
    ps = primes_below(prime_bound)
    half = ps[ps < prime_bound // 2]

    def log_partial(primes, s):
        vals = local_value(primes.astype(np.float64), s)
        if np.any(~np.isfinite(vals)) or np.any(vals <= -1.0):
            return np.inf
        return float(np.sum(np.log1p(vals)))

    def converged(s):
        s = float(s)
        full_v = log_partial(ps, s)
        half_v = log_partial(half, s)
        if not math.isfinite(full_v) or not math.isfinite(half_v):
            return False
        if full_v == 0.0 and half_v == 0.0:
            return True
        denom = max(abs(half_v), 1e-12)
        return (full_v - half_v) / denom < grow_threshold

    lo, hi = float(s_lo), float(s_hi)
    if converged(lo):
        # product converges everywhere we can see: possibly empty/entire
        probe = local_value(ps[:50].astype(np.float64), lo)
        if np.all(probe == 0.0):
            return NEG_INFINITY, "empty"
        return lo, "inconclusive"
    if not converged(hi):
        return hi, "inconclusive"
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if converged(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi), "ok"


def equiv_products_same_abscissa(family_a, family_b, C, prime_bound=10**6, tol=0.05):
    """Compare empirical abscissae of two equivalent families' Euler products.

    family_a/family_b: callables (p_array, s) -> values of the local series.
    Returns a report dict with both estimates, their difference, and a status;
    "inconclusive" when the truncation cannot bracket either abscissa.
    """
    est_a, status_a = truncated_product_abscissa(family_a, prime_bound, tol)
    est_b, status_b = truncated_product_abscissa(family_b, prime_bound, tol)
    report = {
        "abscissa_a": est_a,
        "abscissa_b": est_b,
        "status_a": status_a,
        "status_b": status_b,
        "constant": frac_to_str(Fraction(C)),
        "prime_bound": int(prime_bound),
        "tolerance": float(tol),
    }
    if status_a == "empty" and status_b == "empty":
        report["status"] = "ok"
        report["difference"] = 0.0
        return report
    if status_a != "ok" or status_b != "ok":
        report["status"] = "inconclusive"
        report["difference"] = None
        return report
    diff = abs(est_a - est_b)
    report["difference"] = diff
    # bisection grids are tol/2-accurate each; equivalent products must agree
    report["status"] = "ok" if diff <= 2 * tol else "mismatch"
    return report
