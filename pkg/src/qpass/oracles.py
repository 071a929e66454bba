"""Independent numerical oracles for the field-value solver.

Both routines consume the same (row-stochastic matrix, terminal payoffs)
contract as the solver but share none of its code path: value iteration
is a plain dense fixed point, the Monte Carlo estimate simulates walks.
"""

from __future__ import annotations

import numpy as np

from . import kernels


class ConvergenceError(RuntimeError):
    pass


class ReliabilityError(RuntimeError):
    pass


def _dense(P) -> np.ndarray:
    return P.toarray() if hasattr(P, "toarray") else np.asarray(P, dtype=np.float64)


def value_iteration(P, b_term, tol: float = 1e-10,
                    cap: int = 100_000) -> tuple[np.ndarray, int]:
    """Fixed-point iteration v <- T v + R b_term from v = 0. Returns the
    values over transient states and the iteration count."""
    P = _dense(P)
    b_term = np.asarray(b_term, dtype=np.float64)
    n_t = P.shape[0] - len(b_term)
    T = P[:n_t, :n_t]
    r = P[:n_t, n_t:] @ b_term
    v = np.zeros(n_t)
    for it in range(1, cap + 1):
        nxt = T @ v + r
        if np.abs(nxt - v).max(initial=0.0) < tol:
            return nxt, it
        v = nxt
    raise ConvergenceError(f"value iteration did not converge within {cap} steps")


def monte_carlo_value(P, b_term, start_state: int, n_walks: int, seed: int,
                      cap: int = 1_000_000,
                      max_capped_fraction: float = 0.01) -> tuple[float, float]:
    """Mean terminal payoff over seeded random walks plus its standard
    error. Raises if more than max_capped_fraction of walks hit the
    length cap (those walks are excluded from the estimate)."""
    P = _dense(P)
    b_term = np.asarray(b_term, dtype=np.float64)
    n_t = P.shape[0] - len(b_term)
    cum = np.ascontiguousarray(np.cumsum(P, axis=1))
    positive = P > 0
    last_col = np.where(positive.any(axis=1),
                        P.shape[1] - 1 - positive[:, ::-1].argmax(axis=1),
                        -1).astype(np.int64)

    payoffs, capped = kernels.absorption_walks(
        cum, n_t, np.ascontiguousarray(b_term), last_col,
        int(start_state), int(n_walks), np.uint64(seed), int(cap))
    n_capped = int(capped.sum())
    if n_capped > max_capped_fraction * n_walks:
        raise ReliabilityError(
            f"{n_capped}/{n_walks} walks hit the {cap}-step cap")
    kept = payoffs[~capped]
    estimate = float(kept.mean())
    stderr = float(kept.std(ddof=1) / np.sqrt(len(kept))) if len(kept) > 1 else 0.0
    return estimate, stderr
