"""Bundled generator library: the named test catalog of groups of order <= 200.

Each entry is a matrix-generator recipe fed to `group_from_generators`;
permutation groups are realized as permutation matrices over Z/2.  The
catalog is the universe that the Clifford / decomposition-tree invariant
suites quantify over.
"""

from functools import lru_cache

import numpy as np

from .groupcore import FiniteGroup, group_from_generators


def perm_matrix(perm):
    """Permutation (one-line tuple, 0-based) as a 0/1 matrix."""
    n = len(perm)
    M = np.zeros((n, n), dtype=np.int64)
    for i, j in enumerate(perm):
        M[j, i] = 1
    return M


def cycle(n, *cycles):
    """One-line form of a product of cycles on {0..n-1}."""
    perm = list(range(n))
    for cyc in cycles:
        for i in range(len(cyc)):
            perm[cyc[i]] = cyc[(i + 1) % len(cyc)]
    return tuple(perm)


def block_diag(*mats):
    n = sum(m.shape[0] for m in mats)
    out = np.zeros((n, n), dtype=np.int64)
    at = 0
    for m in mats:
        out[at:at + m.shape[0], at:at + m.shape[0]] = m
        at += m.shape[0]
    return out


def _eye(n):
    return np.eye(n, dtype=np.int64)


def _unitriangular_gens(n, m):
    gens = []
    for i in range(n - 1):
        g = _eye(n)
        g[i, i + 1] = 1
        gens.append(g)
    return gens, m


def _perm_group(n, *perms):
    return [perm_matrix(cycle(n, *p)) for p in perms], 2


_RECIPES = {
    "C2": lambda: _perm_group(2, [(0, 1)]),
    "C3": lambda: _perm_group(3, [(0, 1, 2)]),
    "C4": lambda: _perm_group(4, [(0, 1, 2, 3)]),
    "C5": lambda: _perm_group(5, [(0, 1, 2, 3, 4)]),
    "C6": lambda: _perm_group(6, [(0, 1, 2, 3, 4, 5)]),
    "C8": lambda: _perm_group(8, [tuple(range(8))]),
    "C12": lambda: _perm_group(12, [tuple(range(12))]),
    "C2xC2": lambda: _perm_group(4, [(0, 1)], [(2, 3)]),
    "C2xC4": lambda: _perm_group(6, [(0, 1)], [(2, 3, 4, 5)]),
    "C3xC3": lambda: _perm_group(6, [(0, 1, 2)], [(3, 4, 5)]),
    "S3": lambda: _perm_group(3, [(0, 1, 2)], [(0, 1)]),
    "D4": lambda: _perm_group(4, [(0, 1, 2, 3)], [(0, 2)]),
    "Q8": lambda: ([np.array([[0, 2], [1, 0]]), np.array([[1, 1], [1, 2]])], 3),
    "D5": lambda: _perm_group(5, [(0, 1, 2, 3, 4)], [(1, 4), (2, 3)]),
    "D6": lambda: _perm_group(6, [(0, 1, 2, 3, 4, 5)], [(1, 5), (2, 4)]),
    "A4": lambda: _perm_group(4, [(0, 1, 2)], [(0, 1), (2, 3)]),
    "D8": lambda: _perm_group(8, [tuple(range(8))], [(1, 7), (2, 6), (3, 5)]),
    "S3xC3": lambda: _perm_group(6, [(0, 1, 2)], [(0, 1)], [(3, 4, 5)]),
    "F20": lambda: _perm_group(5, [(0, 1, 2, 3, 4)], [(1, 2, 4, 3)]),
    "S4": lambda: _perm_group(4, [(0, 1, 2, 3)], [(0, 1)]),
    "SL2_3": lambda: ([np.array([[1, 1], [0, 1]]), np.array([[1, 0], [1, 1]])], 3),
    "heis3": lambda: _unitriangular_gens(3, 3),
    "C30": lambda: _perm_group(10, [(0, 1)], [(2, 3, 4)], [(5, 6, 7, 8, 9)]),
    "A5": lambda: _perm_group(5, [(0, 1, 2, 3, 4)], [(0, 1, 2)]),
    "UT3Z4": lambda: _unitriangular_gens(3, 4),
    "SL2_5": lambda: ([np.array([[1, 1], [0, 1]]), np.array([[1, 0], [1, 1]])], 5),
    "heis5": lambda: _unitriangular_gens(3, 5),
}


def catalog_names():
    return sorted(_RECIPES)


@lru_cache(maxsize=None)
def build(name):
    """Construct a catalog group by name (cached)."""
    gens, m = _RECIPES[name]()
    G = group_from_generators(gens, m, name=name)
    assert G.order <= 200, f"{name} exceeds the catalog order bound"
    return G


def subgroup_from_matrices(G, mats):
    """Element indices in G of the subgroup generated by the given matrices."""
    idx = G.backend.lookup((np.stack([np.asarray(M, dtype=np.int64) for M in mats])
                            % G.backend.m))
    return G.closure([int(i) for i in np.atleast_1d(idx)])


def subgroup_from_perms(G, *perms):
    n = G.backend.n
    return subgroup_from_matrices(G, [perm_matrix(cycle(n, *p)) for p in perms])


def index_bound_triples():
    """Configured (L, H, K) triples for the finite-index sandwich checks.

    Returns tuples (L, H_indices, K_indices) with K normal in L, K <= H <= L,
    and [L:H] <= 6.
    """
    out = []
    S4 = build("S4")
    A4 = subgroup_from_perms(S4, [(0, 1, 2)], [(0, 1), (2, 3)])
    V4 = subgroup_from_perms(S4, [(0, 1), (2, 3)], [(0, 2), (1, 3)])
    D4_in_S4 = subgroup_from_perms(S4, [(0, 1, 2, 3)], [(0, 2)])
    out.append((S4, A4, V4))
    out.append((S4, D4_in_S4, V4))
    out.append((S4, V4, V4))

    S3 = build("S3")
    C3 = subgroup_from_perms(S3, [(0, 1, 2)])
    out.append((S3, C3, np.array([S3.identity], dtype=np.int64)))

    SL23 = build("SL2_3")
    Q8 = subgroup_from_matrices(SL23, [np.array([[0, 2], [1, 0]]), np.array([[1, 1], [1, 2]])])
    Z2 = subgroup_from_matrices(SL23, [np.array([[2, 0], [0, 2]])])
    out.append((SL23, Q8, Z2))

    A4g = build("A4")
    V4a = subgroup_from_perms(A4g, [(0, 1), (2, 3)], [(0, 2), (1, 3)])
    out.append((A4g, V4a, V4a))

    D6 = build("D6")
    C6 = subgroup_from_perms(D6, [(0, 1, 2, 3, 4, 5)])
    C3d = subgroup_from_perms(D6, [(0, 2, 4), (1, 3, 5)])
    out.append((D6, C6, C3d))

    H3 = build("heis3")
    center = subgroup_from_matrices(H3, [np.array([[1, 0, 1], [0, 1, 0], [0, 0, 1]])])
    wall = subgroup_from_matrices(H3, [np.array([[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
                                       np.array([[1, 0, 1], [0, 1, 0], [0, 0, 1]])])
    out.append((H3, wall, center))
    return out


def sl2_zmod(pk, name=None):
    """SL2 over Z/pk from the standard transvection generators."""
    gens = [np.array([[1, 1], [0, 1]]), np.array([[1, 0], [1, 1]])]
    return group_from_generators(gens, pk, name=name or f"SL2(Z/{pk})")
