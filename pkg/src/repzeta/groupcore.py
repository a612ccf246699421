"""Brute-force finite-group engine.

Groups are element-indexed with pluggable multiplication backends: an explicit
table, stacked matrices over Z/m, or Lazard coordinate vectors (installed by
the Lie-ring module).  On top of that sit exact character tables via the
Burnside-Dixon class-algebra method (computed modulo a large auxiliary prime
and lifted to eigenvalue-multiplicity vectors over a fixed root of unity),
restriction/induction bookkeeping for Clifford theory, maximal normal
p-subgroups, extendibility tests, and decomposition trees that reduce relative
zeta functions to leaves.

Everything downstream treats character values as length-e integer vectors
(e = exponent of the group) in the sense of `_cyclotomic`; all identities are
checked exactly, never in floating point.
"""

from fractions import Fraction
from math import gcd, isqrt

import numpy as np

from . import _cyclotomic as cyc
from . import _modlinalg as ml
from ._util import next_prime_congruent
from .dirichlet import DirichletPoly

DEFAULT_CLOSURE_CAP = 2 * 10**5
DEFAULT_TABLE_CAP = 5000
DEFAULT_CHAR_CAP = 2 * 10**5


class SizeError(RuntimeError):
    """A configured cap (closure size, table size, character-table order) was exceeded."""


class InputError(ValueError):
    """Bad input data (non-invertible generator, malformed descriptor...)."""


class PreconditionError(ValueError):
    """An operation precondition does not hold (K not normal, char not fixed...)."""


# ---------------------------------------------------------------------------
# multiplication backends


class TableBackend:
    """Explicit multiplication table."""

    def __init__(self, table):
        self.table = np.asarray(table, dtype=np.int32)
        self.order = self.table.shape[0]

    def mult(self, i, j):
        return int(self.table[i, j])

    def mult_left(self, g, idx):
        return self.table[g, idx]

    def mult_right(self, idx, g):
        return self.table[idx, g]

    def mult_pairs(self, idx_a, idx_b):
        return self.table[idx_a, idx_b]

    def mult_outer(self, idx_a, idx_b):
        return self.table[np.ix_(np.atleast_1d(idx_a), np.atleast_1d(idx_b))]

    def dense_table(self):
        return self.table


def _key_powers(m, count):
    powers = np.ones(count, dtype=np.int64)
    for i in range(1, count):
        powers[i] = powers[i - 1] * m
    return powers


class MatrixBackend:
    """Elements as invertible n x n matrices over Z/m, stacked in one array."""

    def __init__(self, mats, m):
        self.mats = np.asarray(mats, dtype=np.int64) % m
        self.m = int(m)
        self.order = self.mats.shape[0]
        self.n = self.mats.shape[1]
        self._powers = _key_powers(self.m, self.n * self.n)
        span = self.m ** (self.n * self.n)
        if span <= 1 << 22:
            lut = np.full(span, -1, dtype=np.int32)
            lut[self.keys(self.mats)] = np.arange(self.order, dtype=np.int32)
            self._lut = lut
            self._dict = None
        else:
            self._lut = None
            self._dict = {k: i for i, k in enumerate(self.keys(self.mats).tolist())}

    def keys(self, mats):
        flat = mats.reshape(mats.shape[:-2] + (self.n * self.n,))
        return flat @ self._powers

    def lookup(self, mats):
        keys = self.keys(mats)
        if self._lut is not None:
            out = self._lut[keys]
            if np.any(out < 0):
                raise InputError("product left the enumerated group")
            return out.astype(np.int64)
        flatkeys = np.atleast_1d(keys)
        out = np.array([self._dict[int(k)] for k in flatkeys.ravel()], dtype=np.int64)
        return out.reshape(flatkeys.shape)

    def mult(self, i, j):
        return int(self.lookup((self.mats[i] @ self.mats[j]) % self.m))

    def mult_left(self, g, idx):
        return self.lookup(np.einsum("ij,ajk->aik", self.mats[g], self.mats[idx]) % self.m)

    def mult_right(self, idx, g):
        return self.lookup(np.einsum("aij,jk->aik", self.mats[idx], self.mats[g]) % self.m)

    def mult_pairs(self, idx_a, idx_b):
        return self.lookup(np.einsum("aij,ajk->aik", self.mats[idx_a], self.mats[idx_b]) % self.m)

    def mult_outer(self, idx_a, idx_b):
        prod = np.einsum("aij,bjk->abik", self.mats[np.atleast_1d(idx_a)],
                         self.mats[np.atleast_1d(idx_b)]) % self.m
        return self.lookup(prod)

    def dense_table(self):
        return self.mult_outer(np.arange(self.order), np.arange(self.order)).astype(np.int32)


def mat_inv_mod(M, m):
    """Inverse of an integer matrix modulo m (m may be a prime power)."""
    M = np.array(M, dtype=np.int64) % m
    n = M.shape[0]
    aug = np.concatenate([M, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        piv = None
        for r in range(c, n):
            if gcd(int(aug[r, c]), m) == 1:
                piv = r
                break
        if piv is None:
            raise InputError("matrix not invertible modulo m")
        if piv != c:
            aug[[c, piv]] = aug[[piv, c]]
        inv = pow(int(aug[c, c]), -1, m)
        aug[c] = (aug[c] * inv) % m
        for r in range(n):
            if r != c and aug[r, c]:
                aug[r] = (aug[r] - aug[r, c] * aug[c]) % m
    return aug[:, n:]


# ---------------------------------------------------------------------------
# the group object


class FiniteGroup:
    """Multiplication-table group with canonical element indexing.

    `backend` provides vectorized products; `generators` (indices) drive
    conjugacy-class and closure searches.  Immutable after construction apart
    from transparent caches.
    """

    def __init__(self, backend, identity, generators=(), name="G", meta=None,
                 validate=True, rng_seed=0):
        self.backend = backend
        self.order = backend.order
        self.identity = int(identity)
        self.generators = tuple(int(g) for g in generators)
        self.name = name
        self.meta = dict(meta or {})
        self._inv = None
        self._classes = None
        self._table = None
        self._chartab = None
        self._sub_cache = {}
        self._rng_seed = rng_seed
        if validate:
            self._validate()

    # -- basic structure

    def _validate(self):
        idx = np.arange(self.order)
        if not np.all(self.backend.mult_left(self.identity, idx) == idx):
            raise InputError("identity law fails")
        if not np.all(self.backend.mult_right(idx, self.identity) == idx):
            raise InputError("identity law fails")
        self.inv()  # raises if some element has no inverse
        if self.order <= 512 and not isinstance(self.backend, (MatrixBackend,)):
            t = self.dense_table()
            for i in range(self.order):
                if not np.all(t[t[i], :] == t[i][t]):
                    raise InputError("associativity fails")
        else:
            rng = np.random.default_rng(self._rng_seed)
            tri = rng.integers(0, self.order, size=(256, 3))
            for i, j, k in tri:
                ij = self.backend.mult(int(i), int(j))
                jk = self.backend.mult(int(j), int(k))
                if self.backend.mult(ij, int(k)) != self.backend.mult(int(i), jk):
                    raise InputError("associativity fails on sampled triple")

    def inv(self):
        if self._inv is None:
            if hasattr(self.backend, "inverse_all"):
                self._inv = self.backend.inverse_all()
            elif isinstance(self.backend, MatrixBackend):
                mats = np.stack([mat_inv_mod(M, self.backend.m) for M in self.backend.mats])
                self._inv = self.backend.lookup(mats)
            else:
                t = self.backend.dense_table()
                hits = np.argwhere(t == self.identity)
                inv = np.full(self.order, -1, dtype=np.int64)
                inv[hits[:, 0]] = hits[:, 1]
                if np.any(inv < 0):
                    raise InputError("inverse law fails")
                self._inv = inv
        return self._inv

    def mult(self, i, j):
        return self.backend.mult(int(i), int(j))

    def dense_table(self, cap=DEFAULT_TABLE_CAP):
        if self._table is None:
            if self.order > cap:
                raise SizeError(f"multiplication table of order {self.order} exceeds cap {cap}")
            self._table = self.backend.dense_table()
        return self._table

    def conj_perm(self, g):
        """Permutation x -> g x g^(-1) as an index array."""
        idx = np.arange(self.order)
        return self.backend.mult_right(self.backend.mult_left(int(g), idx), int(self.inv()[g]))

    def element_order(self, i):
        n = 1
        x = int(i)
        while x != self.identity:
            x = self.mult(x, i)
            n += 1
        return n

    # -- conjugacy classes

    def conjugacy_classes(self):
        """(class_of, reps, sizes); classes sorted by minimal member, identity first."""
        if self._classes is not None:
            return self._classes
        n = self.order
        gens = list(self.generators)
        if not gens:
            gens = list(range(n))
        perms = [self.conj_perm(g) for g in gens]
        class_of = np.full(n, -1, dtype=np.int32)
        reps = []
        for start in range(n):
            if class_of[start] >= 0:
                continue
            cid = len(reps)
            reps.append(start)
            class_of[start] = cid
            frontier = np.array([start])
            while frontier.size:
                nxt = np.unique(np.concatenate([perm[frontier] for perm in perms]))
                nxt = nxt[class_of[nxt] < 0]
                class_of[nxt] = cid
                frontier = nxt
        reps = np.array(reps, dtype=np.int64)
        sizes = np.bincount(class_of, minlength=len(reps)).astype(np.int64)
        # canonical order: identity class first, then by smallest member (= rep)
        order = np.argsort(reps)
        ident_cid = class_of[self.identity]
        order = np.concatenate([[ident_cid], order[order != ident_cid]])
        remap = np.empty(len(reps), dtype=np.int32)
        remap[order] = np.arange(len(reps), dtype=np.int32)
        self._classes = (remap[class_of], reps[order], sizes[order])
        return self._classes

    def exponent(self):
        _, reps, _ = self.conjugacy_classes()
        e = 1
        for r in reps:
            o = self.element_order(int(r))
            e = e // gcd(e, o) * o
        return e

    # -- subgroups

    def closure(self, seed):
        """Sorted element indices of the subgroup generated by `seed` indices."""
        member = np.zeros(self.order, dtype=bool)
        member[self.identity] = True
        seed = np.unique(np.asarray(list(seed), dtype=np.int64))
        frontier = seed[~member[seed]]
        member[frontier] = True
        gens = seed
        while frontier.size:
            prods = np.unique(self.backend.mult_outer(frontier, gens))
            frontier = prods[~member[prods]]
            member[frontier] = True
        return np.nonzero(member)[0]

    def normal_closure(self, seed):
        sub = self.closure(seed)
        gens = self.generators or range(self.order)
        while True:
            conj = set(sub.tolist())
            added = []
            for g in gens:
                pg = self.conj_perm(g)
                img = pg[sub]
                added.extend(img[~np.isin(img, sub)].tolist())
            if not added:
                return sub
            sub = self.closure(np.concatenate([sub, np.array(added, dtype=np.int64)]))

    def is_subgroup_normal(self, indices):
        member = np.zeros(self.order, dtype=bool)
        member[indices] = True
        gens = self.generators or range(self.order)
        for g in gens:
            if not np.all(member[self.conj_perm(g)[indices]]):
                return False
        return True

    def subgroup(self, indices, name=None):
        """Child FiniteGroup on the given (closed) element set, with index maps."""
        indices = np.asarray(sorted(int(i) for i in indices), dtype=np.int64)
        key = indices.tobytes()
        if key in self._sub_cache:
            return self._sub_cache[key]
        pos = {int(x): i for i, x in enumerate(indices)}
        table = self.backend.mult_outer(indices, indices)
        local = np.searchsorted(indices, table).astype(np.int32)
        if not np.array_equal(indices[local], table):
            raise InputError("index set is not closed under multiplication")
        child = FiniteGroup(TableBackend(local), pos[self.identity],
                            generators=[], name=name or f"{self.name}<{len(indices)}>",
                            validate=False)
        child.parent = self
        child.parent_elements = indices
        child.parent_pos = pos
        self._sub_cache[key] = child
        return child

    def all_normal_subgroups(self):
        """Every normal subgroup, as sorted index arrays (joins of class closures)."""
        class_of, reps, _ = self.conjugacy_classes()
        seeds = []
        seen = set()
        for cid in range(len(reps)):
            members = np.nonzero(class_of == cid)[0]
            sub = self.closure(members)
            key = sub.tobytes()
            if key not in seen:
                seen.add(key)
                seeds.append(sub)
        normals = {np.array([self.identity], dtype=np.int64).tobytes():
                   np.array([self.identity], dtype=np.int64)}
        for s in seeds:
            normals[s.tobytes()] = s
        frontier = list(seeds)
        while frontier:
            new = []
            for a in frontier:
                for s in seeds:
                    join = self.closure(np.concatenate([a, s]))
                    key = join.tobytes()
                    if key not in normals:
                        normals[key] = join
                        new.append(join)
            frontier = new
        return sorted(normals.values(), key=lambda v: (len(v), v.tolist()))

    def p_elements(self, p):
        """Indices of elements whose order is a power of p (identity included)."""
        out = []
        for i in range(self.order):
            o = self.element_order(i)
            while o % p == 0:
                o //= p
            if o == 1:
                out.append(i)
        return np.array(out, dtype=np.int64)

    def normalizer(self, indices):
        member = np.zeros(self.order, dtype=bool)
        member[indices] = True
        out = []
        for g in range(self.order):
            if np.all(member[self.conj_perm(g)[indices]]):
                out.append(g)
        return np.array(out, dtype=np.int64)

    def sylow_subgroup(self, p):
        a = 0
        m = self.order
        while m % p == 0:
            m //= p
            a += 1
        if a == 0:
            return np.array([self.identity], dtype=np.int64)
        target = p**a
        pel = self.p_elements(p)
        nontriv = pel[pel != self.identity]
        P = self.closure([int(nontriv[0])])
        while len(P) < target:
            N = self.normalizer(P)
            inP = np.isin(pel, P)
            inN = np.isin(pel, N)
            cand = pel[inN & ~inP]
            assert cand.size, "Sylow growth stalled"
            P = self.closure(np.concatenate([P, cand[:1]]))
        return P

    def max_normal_p_subgroup(self, p):
        """O_p: the intersection of all Sylow p-subgroups."""
        P = self.sylow_subgroup(p)
        if len(P) == 1:
            return P
        member = np.zeros(self.order, dtype=bool)
        member[P] = True
        core = member.copy()
        seen = {member.tobytes()}
        frontier = [member]
        gens = self.generators or range(self.order)
        while frontier:
            cur = frontier.pop()
            idx = np.nonzero(cur)[0]
            for g in gens:
                img = np.zeros(self.order, dtype=bool)
                img[self.conj_perm(g)[idx]] = True
                key = img.tobytes()
                if key not in seen:
                    seen.add(key)
                    frontier.append(img)
                    core &= img
        out = np.nonzero(core)[0]
        assert self.is_subgroup_normal(out)
        n = len(out)
        while n > 1 and n % p == 0:
            n //= p
        assert n == 1, "O_p is not a p-group"
        return out

    def quotient(self, normal_indices, name=None):
        """Quotient group by a normal subgroup, plus the coset map."""
        if not self.is_subgroup_normal(normal_indices):
            raise PreconditionError("subgroup is not normal")
        normal_indices = np.asarray(normal_indices, dtype=np.int64)
        coset_key = np.full(self.order, -1, dtype=np.int64)
        reps = []
        for x in range(self.order):
            if coset_key[x] >= 0:
                continue
            coset = self.backend.mult_left(x, normal_indices)
            coset_key[coset] = len(reps)
            reps.append(int(np.min(coset)))
        reps = np.array(reps, dtype=np.int64)
        table = coset_key[self.backend.mult_outer(reps, reps)]
        q = FiniteGroup(TableBackend(table), coset_key[self.identity],
                        generators=sorted(set(int(coset_key[g]) for g in
                                              (self.generators or range(self.order)))),
                        name=name or f"{self.name}/N", validate=False)
        return q, coset_key


def group_from_generators(gens, m, cap=DEFAULT_CLOSURE_CAP, name=None):
    """BFS closure of matrix generators over Z/m with lexicographic indexing.

    Deterministic across runs: after the closure, elements are sorted by their
    flattened entry tuples and re-indexed.
    """
    gens = [np.asarray(g, dtype=np.int64) % m for g in gens]
    if not gens:
        raise InputError("need at least one generator")
    n = gens[0].shape[0]
    for g in gens:
        if g.shape != (n, n):
            raise InputError("generators must be square matrices of equal size")
        try:
            mat_inv_mod(g, m)
        except InputError:
            raise InputError("generator not invertible modulo m")
    powers = _key_powers(m, n * n)
    seen = {}
    ident = np.eye(n, dtype=np.int64) % m
    elems = [ident]
    seen[int(ident.reshape(-1) @ powers)] = 0
    frontier = [ident]
    gen_stack = np.stack(gens)
    while frontier:
        batch = np.stack(frontier)
        prods = np.einsum("aij,bjk->abik", batch, gen_stack) % m
        prods = prods.reshape(-1, n, n)
        keys = prods.reshape(-1, n * n) @ powers
        frontier = []
        for mat, key in zip(prods, keys):
            k = int(key)
            if k not in seen:
                if len(elems) >= cap:
                    raise SizeError(f"closure exceeded cap {cap}")
                seen[k] = len(elems)
                elems.append(mat)
                frontier.append(mat)
    elems = np.stack(elems)
    order = np.lexsort(elems.reshape(len(elems), -1).T[::-1])
    elems = elems[order]
    backend = MatrixBackend(elems, m)
    gen_idx = backend.lookup(gen_stack)
    ident_idx = int(backend.lookup(ident[None])[0])
    return FiniteGroup(backend, ident_idx, generators=[int(i) for i in np.atleast_1d(gen_idx)],
                       name=name or f"mat({n},{m})", meta={"modulus": m, "degree": n})


def group_from_table(table, name="G"):
    table = np.asarray(table, dtype=np.int32)
    ident = None
    n = table.shape[0]
    idx = np.arange(n)
    for e in range(n):
        if np.all(table[e] == idx) and np.all(table[:, e] == idx):
            ident = e
            break
    if ident is None:
        raise InputError("table has no identity")
    return FiniteGroup(TableBackend(table), ident, generators=list(range(n)), name=name)


def group_from_json(obj, cap=DEFAULT_CLOSURE_CAP, name=None):
    """Group input file: {"modulus": m, "generators": [...]} or {"table": [[...]]}."""
    if "table" in obj:
        return group_from_table(obj["table"], name=name or obj.get("name", "G"))
    m = int(obj["modulus"])
    gens = [np.array(g, dtype=np.int64) for g in obj["generators"]]
    side = isqrt(gens[0].size) if gens[0].ndim == 1 else gens[0].shape[0]
    gens = [g.reshape(side, side) for g in gens]
    return group_from_generators(gens, m, cap=cap, name=name or obj.get("name"))


# ---------------------------------------------------------------------------
# character tables (Burnside-Dixon)


class CharacterTable:
    """Exact irreducible character data.

    `values[i, j]` is the length-e integer vector of eigenvalue multiplicities
    for character i at class j: chi_i(g_j) = sum_t values[i,j,t] w^t with w a
    primitive e-th root of unity, e the group exponent.
    """

    def __init__(self, group, exponent, values, degrees):
        self.group = group
        self.exponent = int(exponent)
        self.values = values  # (n_chars, n_classes, e) int64
        self.degrees = [int(d) for d in degrees]
        self.class_of, self.class_reps, self.class_sizes = group.conjugacy_classes()
        self._reduced = None

    @property
    def n_chars(self):
        return self.values.shape[0]

    @property
    def n_classes(self):
        return self.values.shape[1]

    def reduced(self):
        """Canonical (n_chars, n_classes, phi(e)) array for exact value comparison."""
        if self._reduced is None:
            self._reduced = cyc.batch_reduce(self.values, self.exponent)
        return self._reduced

    @staticmethod
    def pairwise_inner_raw(A, B, e):
        """raw[i, j, t] = sum_c sum_{a-b=t (mod e)} A[i,c,a] * B[j,c,b].

        A is expected to carry any class-size weights already.  Shift-and-dot
        keeps the cost at (pairs) * classes * e^2 instead of e^3.
        """
        nA = A.shape[0]
        nB = B.shape[0]
        out = np.empty((nA, nB, e), dtype=np.int64)
        for t in range(e):
            Bs = np.roll(B, t, axis=2)
            out[:, :, t] = np.einsum("ica,jca->ij", A, Bs)
        return out

    def zeta(self):
        terms = {}
        for d in self.degrees:
            terms[d] = terms.get(d, 0) + 1
        return DirichletPoly(terms)

    def value_at_element(self, char_index, element_index):
        return self.values[char_index, self.class_of[element_index]]

    def inverse_class_perm(self):
        inv = self.group.inv()
        return self.class_of[inv[self.class_reps]]

    def inner(self, i, j):
        """Exact inner product <chi_i, chi_j> (a nonnegative integer)."""
        e = self.exponent
        if e <= 64:
            T = cyc.corr_tensor(e)
            A = self.values[i].astype(np.int64) * self.class_sizes[:, None]
            raw = np.einsum("ca,cb,abt->t", A, self.values[j].astype(np.int64), T)
            red = cyc.reduce_vec(raw.tolist(), e)
        else:
            perm = cyc.conj_perm(e)
            raw = np.zeros(2 * e - 1, dtype=np.int64)
            for c in range(self.n_classes):
                a = self.values[i, c].astype(np.int64) * int(self.class_sizes[c])
                b = self.values[j, c].astype(np.int64)[perm]
                raw += np.convolve(a, b)
            folded = [0] * e
            for t, v in enumerate(raw.tolist()):
                folded[t % e] += v
            red = cyc.reduce_vec(folded, e)
        if any(red[1:]):
            raise AssertionError("inner product not rational")
        val = Fraction(int(red[0]), self.group.order)
        assert val.denominator == 1
        return int(val)

    def _mod_table(self, ell):
        """chi values mod ell, via a primitive e-th root of unity mod ell."""
        e = self.exponent
        z = cyc.nth_root_mod(e, ell)
        zp = np.array([pow(z, t, ell) for t in range(e)], dtype=np.int64)
        ml.check_modulus(e, ell)
        return (self.values.astype(np.int64) % ell) @ zp % ell

    def verify(self, full=None):
        """Row/column orthogonality and the degree sum, all exactly.

        Small exponents go through exact cyclotomic reduction; large ones use
        residues modulo two independent primes whose product exceeds every
        possible inner-product magnitude, which is equally exact.
        """
        G = self.group
        assert sum(d * d for d in self.degrees) == G.order, "sum of squares != |G|"
        assert self.n_chars == self.n_classes
        k = self.n_chars
        e = self.exponent
        if full is None:
            full = k <= 128
        if full and e <= 64 and k <= 128:
            A = self.values.astype(np.int64) * self.class_sizes[None, :, None]
            raw = self.pairwise_inner_raw(A, self.values.astype(np.int64), e)
            red = cyc.batch_reduce(raw, e)
            expect = np.zeros_like(red)
            expect[np.arange(k), np.arange(k), 0] = G.order
            assert np.array_equal(red, expect), "row orthogonality fails"
            Vt = self.values.astype(np.int64).transpose(1, 0, 2)
            rawc = self.pairwise_inner_raw(Vt, Vt, e)
            redc = cyc.batch_reduce(rawc, e)
            expectc = np.zeros_like(redc)
            for c in range(k):
                expectc[c, c, 0] = G.order // int(self.class_sizes[c])
            assert np.array_equal(redc, expectc), "column orthogonality fails"
        else:
            # two-prime exact check: |row inner| * |G| <= |G|^2 < ell1 * ell2 / 2
            bound = 2 * G.order * G.order
            ells = []
            start = max(2 * 10**6, int(np.sqrt(2**61 / max(k, e))) // 4)
            ell = start
            while len(ells) < 2 or np.prod([float(x) for x in ells]) < bound:
                ell = next_prime_congruent(ell + 1, 1, e)
                ells.append(ell)
            inv_class = self.inverse_class_perm()
            for ell in ells:
                M = self._mod_table(ell)
                Mw = (M * (self.class_sizes[None, :] % ell)) % ell
                g = (Mw @ M[:, inv_class].T) % ell
                expect = (np.eye(k, dtype=np.int64) * (G.order % ell)) % ell
                assert np.array_equal(g, expect), "row orthogonality fails (mod check)"
                # columns: sum_i chi_i(c) conj(chi_i(c')) = delta * |G| / |C|
                col = (M[:, inv_class].T @ M) % ell
                expectc = np.zeros((k, k), dtype=np.int64)
                for c in range(k):
                    expectc[c, c] = (G.order // int(self.class_sizes[c])) % ell
                assert np.array_equal(col, expectc), "column orthogonality fails (mod check)"
        return True

    def row_sort_order(self):
        red = self.reduced()
        keys = [(self.degrees[i],) + tuple(red[i].ravel().tolist())
                for i in range(self.n_chars)]
        return sorted(range(self.n_chars), key=lambda i: keys[i])


def _select_modulus(order, exponent, n_classes):
    lower = max(2 * isqrt(order) + 1, 4 * n_classes * n_classes, 257)
    ell = next_prime_congruent(lower, 1, exponent)
    while order % ell == 0:
        ell = next_prime_congruent(ell + 1, 1, exponent)
    ml.check_modulus(max(n_classes, 2), ell)
    return ell


def _class_matrix(G, class_of, reps, i_class, members, inv):
    """M_i[j, k] = #{x in class i : x^(-1) z_k in class j}."""
    k = len(reps)
    xs = inv[members]
    prods = G.backend.mult_outer(xs, reps)  # (|C_i|, k)
    cls = class_of[prods]
    flat = cls.astype(np.int64) * k + np.arange(k, dtype=np.int64)[None, :]
    counts = np.bincount(flat.ravel(), minlength=k * k)
    return counts.reshape(k, k)


def _central_characters(G, ell, rng):
    """Rows = central-character vectors omega mod ell, one per irreducible."""
    class_of, reps, sizes = G.conjugacy_classes()
    k = len(reps)
    inv = G.inv()
    members_by_class = [np.nonzero(class_of == c)[0] for c in range(k)]

    built = {}

    def mat(i):
        if i not in built:
            built[i] = _class_matrix(G, class_of, reps, i, members_by_class[i], inv) % ell
        return built[i]

    # stream of operators: random combinations of small classes first, then singles
    by_size = sorted(range(1, k), key=lambda c: (int(sizes[c]), c))
    pool = by_size[: min(8, k - 1)]

    def stream():
        for _ in range(3):
            ms = [mat(i) for i in pool]
            coeffs = rng.integers(1, ell, size=len(ms))
            yield sum(int(c) * M for c, M in zip(coeffs, ms)) % ell
        for c in by_size:
            yield mat(c)

    finished = []  # 1-dim: vectors in the big space
    active = [np.eye(k, dtype=np.int64)]  # RREF bases, rows spanning subspaces
    for M in stream():
        if not active:
            break
        nxt = []
        for B in active:
            d = B.shape[0]
            piv = [int(np.nonzero(B[r])[0][0]) for r in range(d)]
            R = ((B @ M.T) % ell)[:, piv]  # row action: coords c -> c @ R
            op = R.T % ell
            cp = ml.charpoly(op, ell)
            roots = ml.roots_in_field(cp, ell, rng)
            assert sum(roots.values()) == d, "class algebra not split"
            if len(roots) == 1:
                nxt.append(B)
                continue
            simple = [lam for lam, m in sorted(roots.items()) if m == 1]
            if simple:
                vecs = ml.simple_eigvecs(op, simple, cp, ell, rng)
                for lam, v in zip(simple, vecs):
                    assert np.all((op @ v) % ell == (lam * v) % ell)
                    finished.append((v @ B) % ell)
            for lam, mult in sorted(roots.items()):
                if mult == 1:
                    continue
                A = (op - lam * np.eye(d, dtype=np.int64)) % ell
                ns = ml.nullspace(A, ell)
                assert ns.shape[0] == mult, "eigenspace dimension mismatch"
                sub = (ns @ B) % ell
                Bsub, _ = ml.rref(sub, ell)
                nxt.append(Bsub)
        active = nxt
    assert not active, "class matrices failed to split the algebra"
    assert len(finished) == k
    W = np.stack(finished) % ell
    # normalize so the identity-class coordinate is 1
    w0 = W[:, 0]
    assert np.all(w0 != 0)
    scale = np.array([ml.modinv(x, ell) for x in w0], dtype=np.int64)
    return (W * scale[:, None]) % ell


def character_table(G, cap=DEFAULT_CHAR_CAP):
    """Exact character table by the Burnside-Dixon class-algebra method.

    Simultaneous eigenvectors of the class matrices are found modulo an
    auxiliary prime ell = 1 (mod exponent), degrees recovered from the second
    orthogonality relation, and values lifted to exact eigenvalue-multiplicity
    vectors by a discrete Fourier transform over the power maps.
    """
    if G._chartab is not None:
        return G._chartab
    if G.order > cap:
        raise SizeError(f"character table cap {cap} exceeded by order {G.order}")
    class_of, reps, sizes = G.conjugacy_classes()
    k = len(reps)
    e = G.exponent()
    ell = _select_modulus(G.order, e, k)
    rng = np.random.default_rng(12345)
    W = _central_characters(G, ell, rng)

    inv_class = class_of[G.inv()[reps]]
    inv_sizes = np.array([ml.modinv(int(s), ell) for s in sizes], dtype=np.int64)
    # degrees: d^2 = |G| / sum_j omega_j omega_j' / |C_j|
    t = (W * W[:, inv_class] % ell * inv_sizes[None, :] % ell).sum(axis=1) % ell
    degrees = []
    bound = isqrt(G.order)
    for ti in t:
        d2 = (G.order * ml.modinv(int(ti), ell)) % ell
        d = next((x for x in range(1, bound + 1) if (x * x) % ell == d2), None)
        assert d is not None, "degree recovery failed"
        degrees.append(d)
    degrees = np.array(degrees, dtype=np.int64)
    assert int((degrees * degrees).sum()) == G.order, "degree check fails"

    # chi mod ell, then DFT over power maps to eigenvalue multiplicities
    chi_mod = (degrees[:, None] * W % ell) * inv_sizes[None, :] % ell
    power_class = np.empty((k, e), dtype=np.int64)
    cur = np.full(k, G.identity, dtype=np.int64)
    for tgt in range(e):
        power_class[:, tgt] = class_of[cur]
        cur = G.backend.mult_pairs(cur, reps)
    z = cyc.nth_root_mod(e, ell)
    zinv = ml.modinv(z, ell)
    Zmat = np.empty((e, e), dtype=np.int64)
    for tt in range(e):
        for m in range(e):
            Zmat[tt, m] = pow(zinv, tt * m, ell)
    einv = ml.modinv(e, ell)
    values = np.empty((k, k, e), dtype=np.int64)
    chunk = max(1, (1 << 22) // (k * e))
    for lo in range(0, k, chunk):
        hi = min(k, lo + chunk)
        gathered = chi_mod[lo:hi][:, power_class]  # (chunk, k, e)
        m = (gathered @ Zmat) % ell
        m = (m * einv) % ell
        values[lo:hi] = m
    assert np.all(values <= degrees[:, None, None].max()), "lift out of range"
    assert np.all(values.sum(axis=2) == degrees[:, None]), "multiplicities do not sum to degree"

    # canonical row order: by degree then value vectors
    tab = CharacterTable(G, e, values, degrees)
    order = tab.row_sort_order()
    tab = CharacterTable(G, e, values[order], degrees[order])
    tab.verify(full=(k <= 96))
    G._chartab = tab
    return tab


def zeta_of_group(G, cap=DEFAULT_CHAR_CAP):
    """Representation zeta function: terms[n] = number of degree-n irreducibles."""
    return character_table(G, cap=cap).zeta()


# ---------------------------------------------------------------------------
# Clifford theory


def _values_in_order(vals, e_from, e_to):
    """Embed (..., e_from) multiplicity vectors into order e_to (e_from | e_to)."""
    if e_from == e_to:
        return vals
    assert e_to % e_from == 0
    m = e_to // e_from
    out = np.zeros(vals.shape[:-1] + (e_to,), dtype=vals.dtype)
    out[..., ::m] = vals
    return out


def restriction_matrix(H, K_indices):
    """Multiplicity matrix M[i, t] = <Res_K chi_i, tau_t> for K a subgroup of H.

    Returns (M, child_group, child_table).
    """
    TH = character_table(H)
    K = H.subgroup(K_indices)
    TK = character_table(K)
    E = TH.exponent
    if E > 256:
        raise SizeError(f"restriction bookkeeping not supported at exponent {E}")
    kcls_in_h = TH.class_of[K.parent_elements[TK.class_reps]]
    A = TH.values[:, kcls_in_h, :].astype(np.int64)  # (nH, kK, E)
    B = _values_in_order(TK.values.astype(np.int64), TK.exponent, E)
    Bw = B * TK.class_sizes[None, :, None]
    raw = CharacterTable.pairwise_inner_raw(A, Bw, E)
    red = cyc.batch_reduce(raw, E)
    assert not np.any(red[:, :, 1:]), "restriction inner products not rational"
    M = red[:, :, 0]
    assert np.all(M % len(K_indices) == 0)
    return (M // len(K_indices)).astype(np.int64), K, TK


def irr_over(H, K_indices, tau_index):
    """Indices of irreducibles of H lying over tau (a row of K's table)."""
    if not H.is_subgroup_normal(K_indices):
        raise InputError("K is not normal in H")
    M, _, _ = restriction_matrix(H, K_indices)
    return [int(i) for i in np.nonzero(M[:, tau_index])[0]]


def relative_zeta(H, K_indices, tau_index):
    """zeta_{H|tau}: dimensions of Irr(H|tau) divided by dim tau."""
    if not H.is_subgroup_normal(K_indices):
        raise InputError("K is not normal in H")
    M, _, TK = restriction_matrix(H, K_indices)
    TH = character_table(H)
    dt = TK.degrees[tau_index]
    terms = {}
    for i in np.nonzero(M[:, tau_index])[0]:
        d = TH.degrees[int(i)]
        if d % dt != 0:
            raise AssertionError("dim tau does not divide dim rho; internal inconsistency")
        terms[d // dt] = terms.get(d // dt, 0) + 1
    return DirichletPoly(terms)


def _class_action_on_subgroup(H, K, TK):
    """(|H|, k_K) array: column view of how each h permutes K's classes by conjugation.

    P[h, c] = K-class of h^(-1) rep_c h.
    """
    inv = H.inv()
    k = TK.n_classes
    P = np.empty((H.order, k), dtype=np.int32)
    all_h = np.arange(H.order)
    for c in range(k):
        r = int(K.parent_elements[TK.class_reps[c]])
        u = H.backend.mult_right(inv[all_h], r)
        w = H.backend.mult_pairs(u, all_h)
        local = np.searchsorted(K.parent_elements, w)
        assert np.array_equal(K.parent_elements[local], w), "K is not normal in H"
        P[:, c] = TK.class_of[local]
    return P


def char_orbit_and_stabilizer(H, K_indices, tau_index):
    """Orbit size of tau under H-conjugation and the stabilizer's element indices."""
    K = H.subgroup(K_indices)
    TK = character_table(K)
    P = _class_action_on_subgroup(H, K, TK)
    row = TK.values[tau_index]
    fixed = np.all(row[P] == row[None, :], axis=(1, 2))
    stab = np.nonzero(fixed)[0]
    orbit_size = H.order // len(stab)
    return orbit_size, stab


def stabilizer_of_char(H, K_indices, tau_index):
    """{h in H : tau(h^(-1) k h) = tau(k) for all k}; always contains K."""
    _, stab = char_orbit_and_stabilizer(H, K_indices, tau_index)
    return stab


class CliffordResult:
    def __init__(self, ok, witness=None, lhs=None, rhs=None):
        self.ok = bool(ok)
        self.witness = witness
        self.lhs = lhs
        self.rhs = rhs

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return f"CliffordResult(ok={self.ok}, witness={self.witness})"


def verify_clifford_sum(H, K_indices):
    """Exact identity zeta_H = sum_tau [H:Stab tau]^(-1) (dim tau)^(-s) zeta_{H|tau}."""
    TH = character_table(H)
    M, K, TK = restriction_matrix(H, K_indices)
    P = _class_action_on_subgroup(H, K, TK)
    lhs = TH.zeta()
    rhs = DirichletPoly()
    per_tau = []
    for t in range(TK.n_chars):
        row = TK.values[t]
        fixed = np.all(row[P] == row[None, :], axis=(1, 2))
        orbit = H.order // int(np.count_nonzero(fixed))
        piece = {}
        for i in np.nonzero(M[:, t])[0]:
            d = TH.degrees[int(i)]
            piece[d] = piece.get(d, Fraction(0)) + Fraction(1, orbit)
        per_tau.append((t, piece))
        rhs = rhs + DirichletPoly(piece)
    if lhs == rhs:
        return CliffordResult(True, lhs=lhs, rhs=rhs)
    # find a witness: smallest tau whose removal changes the mismatch
    return CliffordResult(False, witness=per_tau[0][0] if per_tau else None, lhs=lhs, rhs=rhs)


def verify_index_bounds(L, H_indices, K_indices, tau_index, s_points=(0, 1, 2)):
    """Both displayed count inequalities and the zeta sandwich for K <= H <= L.

    K must be normal in L and contained in H; tau is a row of K's table.
    N/[L:H] is taken with a floor.
    """
    K_set = set(int(x) for x in K_indices)
    H_set = set(int(x) for x in H_indices)
    if not K_set <= H_set:
        raise PreconditionError("K must be contained in H")
    if not L.is_subgroup_normal(sorted(K_set)):
        raise PreconditionError("K must be normal in L")
    H = L.subgroup(sorted(H_set))
    K_in_H = np.array(sorted(H.parent_pos[x] for x in K_set), dtype=np.int64)

    ML, KL, TKL = restriction_matrix(L, np.array(sorted(K_set), dtype=np.int64))
    MH, KH, TKH = restriction_matrix(H, K_in_H)
    TL, TH = character_table(L), character_table(H)
    # match tau across the two K copies (same group, same class order)
    dt = TKL.degrees[tau_index]
    index = L.order // H.order

    def counts(M, T):
        out = {}
        for i in np.nonzero(M[:, tau_index])[0]:
            n = T.degrees[int(i)] // dt
            out[n] = out.get(n, 0) + 1
        return out

    cl = counts(ML, TL)
    ch = counts(MH, TH)
    maxdim = max(list(cl) + list(ch) + [1])

    def partial(cnts, N):
        return sum(v for n, v in cnts.items() if n <= N)

    for N in range(1, maxdim + 1):
        lo = Fraction(partial(ch, N // index), index)
        mid = partial(cl, N)
        hi = partial(ch, N) * index
        if not (lo <= mid <= hi):
            return False
    zl = DirichletPoly(cl)
    zh = DirichletPoly(ch)
    for s in s_points:
        a = zl.evaluate(s)
        b = zh.evaluate(s)
        if not (Fraction(1, index ** (1 + s)) * b <= a <= index * b):
            return False
    return True


def extendibility_check(S, V_indices, rho_index):
    """Whether rho (an S-fixed irreducible of normal V) extends to S.

    Returns {"extendible": bool, "count_match": bool}; count_match compares the
    Irr(S|rho) dimension-ratio multiset with the degree multiset of Irr(S/V).
    """
    orbit, stab = char_orbit_and_stabilizer(S, V_indices, rho_index)
    if orbit != 1:
        raise PreconditionError("rho is not S-fixed")
    M, V, TV = restriction_matrix(S, V_indices)
    TS = character_table(S)
    drho = TV.degrees[rho_index]
    over = [int(i) for i in np.nonzero(M[:, rho_index])[0]]
    extendible = any(TS.degrees[i] == drho for i in over)
    ratios = sorted(TS.degrees[i] // drho for i in over)
    Q, _ = S.quotient(V_indices)
    qdeg = sorted(character_table(Q).degrees)
    count_match = ratios == qdeg
    if extendible:
        assert count_match, "Isaacs bijection count mismatch for an extendible character"
    return {"extendible": extendible, "count_match": count_match}


# ---------------------------------------------------------------------------
# decomposition trees


class TreeNode:
    """One vertex: stabilizer S, its p-radical V = O_p(S), and a character.

    The character tau lives on `home` (the parent's radical; K at the root).
    Weight data records the induction index [parent S : S], the dimension
    ratio dim tau / dim tau_parent, and the orbit size collapsed into this
    representative.
    """

    def __init__(self, stab_idx, radical_idx, home_idx, char_index,
                 index_weight, dim_ratio, orbit_size):
        self.stabilizer = stab_idx
        self.p_radical = radical_idx
        self.home = home_idx
        self.char_index = int(char_index)
        self.index_weight = int(index_weight)
        self.dim_ratio = int(dim_ratio)
        self.orbit_size = int(orbit_size)
        self.children = []
        self.leaf = False

    def to_json(self):
        return {
            "stabilizer_order": len(self.stabilizer),
            "p_radical_order": len(self.p_radical),
            "char_home_order": len(self.home),
            "char_index": self.char_index,
            "index_weight": self.index_weight,
            "dim_ratio": self.dim_ratio,
            "orbit_size": self.orbit_size,
            "leaf": self.leaf,
            "children": [c.to_json() for c in self.children],
        }


class DecompositionTree:
    def __init__(self, H, K_indices, rho_index, p, root):
        self.H = H
        self.K_indices = np.asarray(K_indices, dtype=np.int64)
        self.rho_index = int(rho_index)
        self.p = int(p)
        self.root = root

    def depth(self):
        def d(node):
            return 1 + max((d(c) for c in node.children), default=0)
        return d(self.root)

    def to_json(self):
        return {"p": self.p, "ambient_order": self.H.order,
                "base_order": len(self.K_indices), "rho": self.rho_index,
                "root": self.root.to_json()}


def _orbit_reps_of_chars(S, V_child, TV, candidates):
    """Group candidate V-characters into S-orbits; reps chosen by minimal index."""
    P = _class_action_on_subgroup(S, V_child, TV)
    reps = []
    seen = set()
    cand_keys = {}
    for t in candidates:
        cand_keys[TV.values[t].tobytes()] = t
    for t in sorted(candidates):
        if t in seen:
            continue
        row = TV.values[t]
        permuted = row[P]  # (|S|, k, e)
        orbit_members = set()
        for h in range(S.order):
            key = permuted[h].tobytes()
            member = cand_keys.get(key)
            assert member is not None, "orbit left the candidate set"
            orbit_members.add(member)
        for mbr in orbit_members:
            seen.add(mbr)
        reps.append((t, len(orbit_members)))
    return reps


def decomposition_tree(H, K_indices, rho_index, p):
    """Decomposition tree of rho per the stabilizer / p-radical recursion.

    Root is (Stab_H rho, O_p(Stab_H rho), rho); a node (S, V, tau) with
    tau living on W expands through S-orbit representatives of Irr(V|tau)
    unless V = W, in which case it is a leaf (S/V then has trivial O_p).
    """
    K_indices = np.asarray(sorted(int(x) for x in K_indices), dtype=np.int64)
    if not H.is_subgroup_normal(K_indices):
        raise PreconditionError("K must be normal in H")
    n = len(K_indices)
    while n % p == 0:
        n //= p
    if n != 1:
        raise PreconditionError("K must be a p-group")

    def build(S_idx, W_idx, tau_idx, index_weight, dim_ratio, orbit_size):
        # S_idx, W_idx: element indices in H; tau is a table row of the group on W.
        # Character indices stay valid across re-materialized subgroups because
        # table row order is canonical (degree, then value vectors).
        S = H.subgroup(S_idx)
        W_in_S = np.searchsorted(S.parent_elements, W_idx)
        rad_in_S = S.max_normal_p_subgroup(p)
        rad_amb = S.parent_elements[rad_in_S]
        node = TreeNode(S_idx, rad_amb, W_idx, tau_idx,
                        index_weight, dim_ratio, orbit_size)
        if len(rad_in_S) == len(W_in_S):
            node.leaf = True
            return node
        V_sub = S.subgroup(rad_in_S)
        TV = character_table(V_sub)
        W_in_V = np.searchsorted(V_sub.parent_elements, W_in_S)
        MVW, _, TW = restriction_matrix(V_sub, W_in_V)
        candidates = [int(i) for i in np.nonzero(MVW[:, tau_idx])[0]]
        reps = _orbit_reps_of_chars(S, V_sub, TV, candidates)
        dtau = TW.degrees[tau_idx]
        for t, osize in reps:
            stab_t = stabilizer_of_char(S, rad_in_S, t)  # indices in S
            child = build(S.parent_elements[stab_t], rad_amb, t,
                          S.order // len(stab_t),
                          TV.degrees[t] // dtau, osize)
            node.children.append(child)
        return node

    orbit, stab = char_orbit_and_stabilizer(H, K_indices, rho_index)
    root = build(stab, K_indices, rho_index, orbit, 1, 1)
    return DecompositionTree(H, K_indices, rho_index, p, root)


def zeta_via_tree(tree):
    """Fold the recursion; must equal relative_zeta(H, K, rho) exactly."""
    H = tree.H

    def value(node):
        S = H.subgroup(node.stabilizer)
        W_in_S = np.array(sorted(S.parent_pos[int(x)] for x in node.home), dtype=np.int64)
        if node.leaf:
            return relative_zeta(S, W_in_S, node.char_index)
        total = DirichletPoly()
        for child in node.children:
            sub = value(child)
            scaled = DirichletPoly({n * child.index_weight * child.dim_ratio: c
                                    for n, c in sub.terms.items()})
            total = total + scaled
        return total

    inner = value(tree.root)
    w = tree.root.index_weight  # [H : Stab_H(rho)]
    return DirichletPoly({n * w: c for n, c in inner.terms.items()})
