"""Dense linear algebra and polynomial arithmetic modulo a prime, numpy-backed.

Everything here works with int64 arrays of residues in [0, ell).  Callers must
keep n * ell^2 < 2^62 so that matrix products cannot overflow; `check_modulus`
enforces this.
"""

import numpy as np


def check_modulus(n, ell):
    if n * ell * ell >= 2**62:
        raise ValueError(f"modulus {ell} too large for safe int64 products at size {n}")


def modinv(a, ell):
    return pow(int(a) % ell, ell - 2, ell)


def matmul(A, B, ell):
    return (A @ B) % ell


def rref(A, ell):
    """Row-reduce A modulo ell in place; returns (R, pivot_columns)."""
    R = np.array(A, dtype=np.int64) % ell
    rows, cols = R.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        R[r] = (R[r] * modinv(R[r, c], ell)) % ell
        mask = np.nonzero(R[:, c])[0]
        mask = mask[mask != r]
        if mask.size:
            R[mask] = (R[mask] - np.outer(R[mask, c], R[r])) % ell
        pivots.append(c)
        r += 1
    return R[:r], pivots


def nullspace(A, ell):
    """Basis (rows) of the right nullspace of A mod ell."""
    R, pivots = rref(A, ell)
    cols = A.shape[1]
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-int(R[r, fc])) % ell
    return basis


def solve(A, b, ell):
    """One solution of A x = b mod ell, or None (A need not be square)."""
    aug = np.concatenate([np.asarray(A, dtype=np.int64) % ell,
                          (np.asarray(b, dtype=np.int64) % ell)[:, None]], axis=1)
    R, pivots = rref(aug, ell)
    n = A.shape[1]
    if n in pivots:
        return None
    x = np.zeros(n, dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = R[r, n]
    return x


def hessenberg(A, ell):
    """Similarity reduction to upper Hessenberg form modulo ell."""
    H = np.array(A, dtype=np.int64) % ell
    n = H.shape[0]
    for j in range(n - 2):
        nz = np.nonzero(H[j + 1:, j])[0]
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            H[[j + 1, i]] = H[[i, j + 1]]
            H[:, [j + 1, i]] = H[:, [i, j + 1]]
        inv = modinv(H[j + 1, j], ell)
        f = (H[j + 2:, j] * inv) % ell
        if np.any(f):
            H[j + 2:] = (H[j + 2:] - np.outer(f, H[j + 1])) % ell
            H[:, j + 1] = (H[:, j + 1] + H[:, j + 2:] @ f) % ell
    return H


def charpoly(A, ell):
    """Characteristic polynomial of A mod ell, coefficients low-to-high, monic."""
    n = A.shape[0]
    if n == 0:
        return np.array([1], dtype=np.int64)
    check_modulus(n, ell)
    H = hessenberg(A, ell)
    # p_m = (x - H[m-1,m-1]) p_{m-1} - sum_i H[m-1-i,m-1] (prod of i subdiagonals) p_{m-1-i}
    polys = np.zeros((n + 1, n + 1), dtype=np.int64)
    polys[0, 0] = 1
    for m in range(1, n + 1):
        prev = polys[m - 1]
        pm = np.zeros(n + 1, dtype=np.int64)
        pm[1:] = prev[:-1]
        pm = (pm - H[m - 1, m - 1] * prev) % ell
        if m >= 2:
            w = np.zeros(m - 1, dtype=np.int64)
            running = 1
            for i in range(1, m):
                running = (running * int(H[m - i, m - i - 1])) % ell
                if running == 0:
                    break
                w[i - 1] = (int(H[m - 1 - i, m - 1]) * running) % ell
            if np.any(w):
                # rows p_{m-2}, p_{m-3}, ..., p_0
                pm = (pm - w @ polys[m - 2::-1]) % ell
        polys[m] = pm
    return polys[n]


def poly_mul(a, b, ell):
    return np.convolve(a, b) % ell


def poly_mod(a, f, ell):
    """Remainder of a modulo monic f, both low-to-high int64 arrays."""
    a = np.array(a, dtype=np.int64) % ell
    d = len(f) - 1
    while len(a) > d:
        c = int(a[-1])
        if c:
            a[-d - 1:-1] = (a[-d - 1:-1] - c * np.asarray(f[:-1], dtype=np.int64)) % ell
        a = a[:-1]
    return np.trim_zeros(a, "b") if a.size else a


def poly_powmod(base, exp, f, ell):
    result = np.array([1], dtype=np.int64)
    base = poly_mod(base, f, ell)
    while exp:
        if exp & 1:
            result = poly_mod(poly_mul(result, base, ell), f, ell)
        base = poly_mod(poly_mul(base, base, ell), f, ell)
        exp >>= 1
    return result


def poly_gcd(a, b, ell):
    a = np.trim_zeros(np.asarray(a, dtype=np.int64) % ell, "b")
    b = np.trim_zeros(np.asarray(b, dtype=np.int64) % ell, "b")
    while b.size:
        inv = modinv(b[-1], ell)
        bm = (b * inv) % ell
        a = poly_mod(a, bm, ell)
        a, b = b, a
    if a.size:
        a = (a * modinv(a[-1], ell)) % ell
    return a


def poly_deriv(a, ell):
    a = np.asarray(a, dtype=np.int64)
    if len(a) <= 1:
        return np.zeros(0, dtype=np.int64)
    return (a[1:] * np.arange(1, len(a), dtype=np.int64)) % ell


def poly_eval_at(a, x, ell):
    acc = 0
    for c in reversed(list(a)):
        acc = (acc * x + int(c)) % ell
    return acc


def _split_roots(f, ell, rng):
    """Roots of a squarefree, fully-split monic polynomial via equal-degree splitting."""
    deg = len(f) - 1
    if deg == 0:
        return []
    if deg == 1:
        return [(-int(f[0])) % ell]
    roots = []
    stack = [np.asarray(f, dtype=np.int64)]
    while stack:
        g = stack.pop()
        d = len(g) - 1
        if d == 1:
            roots.append((-int(g[0])) % ell)
            continue
        while True:
            a = int(rng.integers(0, ell))
            h = poly_powmod(np.array([a, 1], dtype=np.int64), (ell - 1) // 2, g, ell)
            if h.size == 0:
                continue
            h = h.copy()
            h[0] = (h[0] - 1) % ell
            u = poly_gcd(h, g, ell)
            if 0 < len(u) - 1 < d:
                v = _poly_divexact_mod(g, u, ell)
                stack.append(u)
                stack.append(v)
                break
    return roots


def _poly_divexact_mod(a, b, ell):
    a = np.array(a, dtype=np.int64) % ell
    db = len(b) - 1
    inv = modinv(b[-1], ell)
    q = np.zeros(len(a) - db, dtype=np.int64)
    for i in range(len(q) - 1, -1, -1):
        c = (int(a[i + db]) * inv) % ell
        q[i] = c
        if c:
            a[i:i + db + 1] = (a[i:i + db + 1] - c * np.asarray(b, dtype=np.int64)) % ell
    return q


def roots_in_field(f, ell, rng):
    """All roots of f in F_ell with multiplicities, as a dict root -> mult.

    Only the part of f that splits into linear factors is reported.
    """
    f = np.trim_zeros(np.asarray(f, dtype=np.int64) % ell, "b")
    f = (f * modinv(f[-1], ell)) % ell
    # squarefree part
    df = poly_deriv(f, ell)
    g = poly_gcd(f, df, ell) if df.size else f
    sqf = _poly_divexact_mod(f, g, ell) if len(g) > 1 else f
    # keep only the split part: gcd(x^ell - x, sqf)
    xq = poly_powmod(np.array([0, 1], dtype=np.int64), ell, sqf, ell)
    xq = list(xq) + [0] * (2 - len(xq))
    lin = np.array(xq, dtype=np.int64)
    lin[1] = (lin[1] - 1) % ell
    split = poly_gcd(lin, sqf, ell)
    roots = _split_roots(split, ell, rng)
    out = {}
    for r in roots:
        m = 0
        h = f
        while True:
            if poly_eval_at(h, r, ell) != 0:
                break
            h = _poly_divexact_mod(h, np.array([(-r) % ell, 1], dtype=np.int64), ell)
            m += 1
        out[r] = m
    return out


def simple_eigvecs(M, lams, cp, ell, rng, tries=4):
    """Eigenvectors for simple eigenvalues lams of M, via Krylov + synthetic division.

    Returns an array (len(lams), n); rows are unnormalized eigenvectors.
    f/(x - lam) applied to a random vector lands in the lam-eigenspace when
    lam is a simple root of the characteristic polynomial f.
    """
    n = M.shape[0]
    check_modulus(n, ell)
    lams = np.asarray(lams, dtype=np.int64)
    out = np.zeros((len(lams), n), dtype=np.int64)
    todo = np.arange(len(lams))
    for _ in range(tries):
        if todo.size == 0:
            break
        b = rng.integers(0, ell, size=n, dtype=np.int64)
        K = np.empty((n, n), dtype=np.int64)
        K[0] = b
        for i in range(1, n):
            K[i] = (M @ K[i - 1]) % ell
        # synthetic division: q_{n-1} = 1; q_{j-1} = cp[j] + lam * q_j
        Q = np.empty((todo.size, n), dtype=np.int64)
        Q[:, n - 1] = 1
        for j in range(n - 1, 0, -1):
            Q[:, j - 1] = (int(cp[j]) + lams[todo] * Q[:, j]) % ell
        V = (Q @ K) % ell
        good = np.any(V, axis=1)
        out[todo[good]] = V[good]
        todo = todo[~good]
    if todo.size:
        # fall back to explicit nullspaces for the stragglers
        for idx in todo:
            A = (M - lams[idx] * np.eye(n, dtype=np.int64)) % ell
            ns = nullspace(A, ell)
            assert ns.shape[0] >= 1
            out[idx] = ns[0]
    return out
