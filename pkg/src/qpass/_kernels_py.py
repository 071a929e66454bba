"""Pure numpy fallback for the compiled kernels in qpass._core.

Arithmetic mirrors the compiled versions operation-for-operation so both
backends produce identical results; only speed differs (see
benchmarks/bench_kernels.py).
"""

from __future__ import annotations

import numpy as np

BACKEND = "py"

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0

# chunk the (points x centroids) distance matrix to bound memory
_CHUNK_CELLS = 4_000_000


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def assign_nearest(points: np.ndarray, centroids: np.ndarray):
    """Index of the nearest centroid (squared Euclidean, ties to the
    lowest index) and the squared distance, per point."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    centroids = np.ascontiguousarray(centroids, dtype=np.float64)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError("points and centroids must share the feature dimension")
    if centroids.shape[0] == 0:
        raise ValueError("no centroids")
    n = points.shape[0]
    labels = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.float64)
    step = max(1, _CHUNK_CELLS // max(1, centroids.shape[0]))
    for lo in range(0, n, step):
        hi = min(n, lo + step)
        diff = points[lo:hi, None, :] - centroids[None, :, :]
        # plain sum matches the compiled kernel's accumulation order bitwise
        d2 = (diff * diff).sum(axis=-1)
        lab = d2.argmin(axis=1)
        labels[lo:hi] = lab
        dists[lo:hi] = d2[np.arange(hi - lo), lab]
    return labels, dists


def minibatch_update(batch: np.ndarray, centers: np.ndarray,
                     counts: np.ndarray) -> float:
    """One mini-batch k-means step (see the compiled twin). bincount
    accumulates in batch order, matching the compiled loop bitwise."""
    c, d = centers.shape
    labels, _ = assign_nearest(batch, centers)
    m = np.bincount(labels, minlength=c).astype(np.float64)
    sums = np.column_stack([
        np.bincount(labels, weights=batch[:, k], minlength=c) for k in range(d)])
    hit = m > 0
    counts[hit] += m[hit]
    delta = (sums[hit] - m[hit, None] * centers[hit]) / counts[hit, None]
    centers[hit] += delta
    return float(np.sqrt((delta * delta).sum(axis=1).max(initial=0.0)))


def absorption_walks(cum: np.ndarray, n_transient: int, b_term: np.ndarray,
                     last_col: np.ndarray, start: int, n_walks: int,
                     seed: int, cap: int):
    """Vectorized random walks, synchronized across walks but with one
    splitmix64 stream per walk (matching the compiled kernel)."""
    cum = np.asarray(cum, dtype=np.float64)
    b_term = np.asarray(b_term, dtype=np.float64)
    last_col = np.asarray(last_col, dtype=np.int64)

    rng = _mix(np.uint64(seed) ^ (_GAMMA * np.arange(1, n_walks + 1, dtype=np.uint64)))
    states = np.full(n_walks, start, dtype=np.int64)
    payoffs = np.zeros(n_walks, dtype=np.float64)
    capped = np.zeros(n_walks, dtype=bool)
    active = np.ones(n_walks, dtype=bool)

    for _ in range(cap):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        cur = states[idx]
        dangling = last_col[cur] < 0
        if dangling.any():
            # payoff already 0
            active[idx[dangling]] = False
            idx = idx[~dangling]
            if idx.size == 0:
                continue
            cur = states[idx]
        rng[idx] += _GAMMA
        u = (_mix(rng[idx]) >> np.uint64(11)).astype(np.float64) * _INV_2_53
        rows = cum[cur]
        nxt = (rows <= u[:, None]).sum(axis=1)
        overshoot = nxt >= cum.shape[1]
        if overshoot.any():
            nxt[overshoot] = last_col[cur[overshoot]]
        terminal = nxt >= n_transient
        if terminal.any():
            t = idx[terminal]
            payoffs[t] = b_term[nxt[terminal] - n_transient]
            active[t] = False
        cont = ~terminal
        states[idx[cont]] = nxt[cont]
    capped[active] = True
    return payoffs, capped
