"""Hop-limited min-plus relaxation: the layered DP behind k-hop distances.

The recurrence is Jacobi-style (round j reads only round j-1), so the result
after k rounds is exactly the minimum weight over walks with at most k edges.
Negative weights are fine; the hop cap forbids unbounded cycling. Rounds stop
early once a fixpoint is reached, which cannot change the answer.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _HAVE_NUMBA = False


def _relax_rounds_py(indptr, tails, weights, dist, hops):
    # numpy fallback: one gather + grouped min per round, chunked over sources
    n = dist.shape[0]
    if tails.size == 0:
        return dist
    heads = np.repeat(np.arange(n), np.diff(indptr))
    starts = indptr[:-1][np.diff(indptr) > 0]
    head_ids = heads[starts]
    chunk = max(1, int(5e7) // max(1, tails.size))
    cur = dist
    for _ in range(hops):
        nxt = cur.copy()
        for lo in range(0, n, chunk):
            hi = min(n, lo + chunk)
            gathered = cur[lo:hi, tails] + weights[np.newaxis, :]
            grouped = np.minimum.reduceat(gathered, starts, axis=1)
            nxt[lo:hi, head_ids] = np.minimum(cur[lo:hi, head_ids], grouped)
        if np.array_equal(nxt, cur):
            return cur
        cur = nxt
    return cur


if _HAVE_NUMBA:

    @njit(cache=True)
    def _relax_rounds(indptr, tails, weights, dist, hops):  # pragma: no cover
        n = dist.shape[0]
        cur = dist
        nxt = np.empty_like(dist)
        for _ in range(hops):
            changed = False
            for s in range(n):
                row = cur[s]
                out = nxt[s]
                for u in range(n):
                    best = row[u]
                    for e in range(indptr[u], indptr[u + 1]):
                        cand = row[tails[e]] + weights[e]
                        if cand < best:
                            best = cand
                    out[u] = best
                    if best != row[u]:
                        changed = True
            tmp = cur
            cur = nxt
            nxt = tmp
            if not changed:
                break
        return cur

else:
    _relax_rounds = _relax_rounds_py


def hop_limited_matrix(n, eu, ev, ew, hops):
    """All-sources distances over walks with at most `hops` edges.

    `eu`, `ev`, `ew` describe undirected edges (traversable both ways).
    Returns a dense (n, n) float64 matrix with +inf for pairs unreachable
    within the hop budget and an exact zero diagonal at hop zero.
    """
    if hops < 1:
        raise ValueError(f"hop budget must be >= 1, got {hops}")
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    m = len(eu)
    if m == 0 or n == 0:
        return dist
    heads = np.concatenate([ev, eu]).astype(np.int64)
    tails = np.concatenate([eu, ev]).astype(np.int64)
    weights = np.concatenate([ew, ew]).astype(np.float64)
    order = np.argsort(heads, kind="stable")
    heads, tails, weights = heads[order], tails[order], weights[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, heads + 1, 1)
    indptr = np.cumsum(indptr)
    return _relax_rounds(indptr, tails, weights, dist, int(hops))
