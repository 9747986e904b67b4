"""Pure-numpy reference implementations of the hot DP kernels."""
from __future__ import annotations

import numpy as np


def poisson_binomial(q: np.ndarray) -> np.ndarray:
    """Exact distribution of the number of successes among independent
    Bernoulli trials with probabilities q.  O(n^2) convolution."""
    n = q.shape[0]
    dp = np.zeros(n + 1)
    dp[0] = 1.0
    for j in range(n):
        p = q[j]
        dp[1:] = dp[1:] * (1.0 - p) + dp[:-1] * p
        dp[0] *= 1.0 - p
    return dp


def left_tail(q: np.ndarray, delta: int) -> tuple[np.ndarray, float]:
    """Left-tail DP with counts capped at delta.

    Returns (live, dead): live[c] = Pr[count so far = c] for c < delta, dead =
    Pr[count already reached delta].  O(delta * n) time, O(delta) space.
    """
    live = np.zeros(delta)
    live[0] = 1.0
    dead = 0.0
    for j in range(q.shape[0]):
        p = q[j]
        dead += live[delta - 1] * p
        live[1:] = live[1:] * (1.0 - p) + live[:-1] * p
        live[0] *= 1.0 - p
    return live, dead


def box_dp(cols: np.ndarray, delta: int) -> tuple[np.ndarray, float, int]:
    """Joint left-tail DP over k item-support counters, capped at delta.

    `cols` has shape (n, k): per-transaction presence probabilities of the k
    singletons.  Returns (live, dead, ops) where live has shape (delta,)*k,
    live[c1,..,ck] = Pr[every counter j ended at cj < delta], dead is the
    probability mass where some counter reached delta, and ops counts executed
    state*pattern transition steps.
    """
    n, k = cols.shape
    live = np.zeros((delta,) * k)
    live[(0,) * k] = 1.0
    dead = 0.0
    ops = 0
    shifted_src = [slice(None), slice(0, delta - 1)]
    shifted_dst = [slice(None), slice(1, delta)]
    for j in range(n):
        p = cols[j]
        new = np.zeros_like(live)
        total = live.sum()
        for mask in range(1 << k):
            weight = 1.0
            for b in range(k):
                weight *= p[b] if mask >> b & 1 else 1.0 - p[b]
            src = tuple(shifted_src[mask >> b & 1] for b in range(k))
            dst = tuple(shifted_dst[mask >> b & 1] for b in range(k))
            kept = live[src]
            new[dst] += weight * kept
            dead += weight * (total - kept.sum())
            ops += live.size
        live = new
    return live, dead, ops
