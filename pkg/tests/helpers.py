"""Independent oracles shared by the tests: brute-force F2 linear algebra on dense arrays."""

import itertools

import numpy as np


def brute_rank(arr) -> int:
    """Rank over F2 as log2 of the size of the column span (exhaustive, small matrices only)."""
    a = np.asarray(arr, dtype=np.int64) % 2
    if a.size == 0:
        return 0
    cols = [tuple(a[:, j]) for j in range(a.shape[1])]
    span = set()
    for mask in itertools.product((0, 1), repeat=len(cols)):
        v = np.zeros(a.shape[0], dtype=np.int64)
        for m, c in zip(mask, cols):
            if m:
                v = (v + np.array(c)) % 2
        span.add(tuple(v))
    return int(round(np.log2(len(span))))


def elimination_rank(arr) -> int:
    """Rank over F2 by row reduction on a dense copy."""
    a = np.array(arr, dtype=np.int64) % 2
    r = 0
    rows, cols = a.shape if a.ndim == 2 else (0, 0)
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


def random_invertible(n: int, rng: np.random.Generator, steps: int = 20):
    """(P, P^{-1}) over F2 as a product of random transvections."""
    p = np.eye(n, dtype=np.int64)
    q = np.eye(n, dtype=np.int64)
    for _ in range(steps if n > 1 else 0):
        i, j = rng.choice(n, 2, replace=False)
        e = np.eye(n, dtype=np.int64)
        e[i, j] = 1
        p = (e @ p) % 2
        q = (q @ e) % 2
    return p, q


def scrambled_complex(n_pairs, n_free, rng):
    """Direct sum of contractible pairs and free generators, scrambled by a change of basis.

    n_pairs[k] pairs sit in degrees (k, k+1); n_free[k] generators sit in degree k.
    Returns dims, dense differentials d[k] : C^k -> C^{k+1} and the cohomology dims.
    """
    degs = sorted(set(n_pairs) | {k + 1 for k in n_pairs} | set(n_free))
    lo, hi = degs[0], degs[-1]
    dims, slots = {}, {}
    for k in range(lo, hi + 1):
        top = [("t", k)] * n_pairs.get(k, 0)
        bot = [("b", k - 1)] * n_pairs.get(k - 1, 0)
        free = [("f", k)] * n_free.get(k, 0)
        slots[k] = top + bot + free
        dims[k] = len(slots[k])
    d = {}
    for k in range(lo, hi):
        m = np.zeros((dims[k + 1], dims[k]), dtype=np.int64)
        np_k = n_pairs.get(k, 0)
        off = n_pairs.get(k + 1, 0)
        for i in range(np_k):
            m[off + i, i] = 1
        d[k] = m
    ps = {k: random_invertible(dims[k], rng) for k in dims}
    for k in d:
        d[k] = (ps[k + 1][0] @ d[k] @ ps[k][1]) % 2
    return dims, d, {k: v for k, v in n_free.items() if v}


def dense_cohomology(cc):
    """Cohomology dims of a ChainComplex via dense elimination."""
    out = {}
    for k in cc.degrees():
        n = cc.space.dim(k)
        out_rank = elimination_rank(cc.d(k).to_dense()) if cc.d(k).rows and n else 0
        prev = cc.d(k - 1)
        in_rank = elimination_rank(prev.to_dense()) if prev.rows and prev.cols else 0
        if n - out_rank - in_rank:
            out[k] = n - out_rank - in_rank
    return out
