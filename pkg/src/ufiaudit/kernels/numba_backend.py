"""Numba-jitted versions of the hot DP kernels.

Signatures match `numpy_backend`; `box_dp` returns the live array flattened
back into (delta,)*k shape by the thin python wrappers below.
"""
from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _poisson_binomial(q):
    n = q.shape[0]
    dp = np.zeros(n + 1)
    dp[0] = 1.0
    for j in range(n):
        p = q[j]
        for c in range(min(j + 1, n), 0, -1):
            dp[c] = dp[c] * (1.0 - p) + dp[c - 1] * p
        dp[0] *= 1.0 - p
    return dp


@njit(cache=True)
def _left_tail(q, delta):
    live = np.zeros(delta)
    live[0] = 1.0
    dead = 0.0
    for j in range(q.shape[0]):
        p = q[j]
        dead += live[delta - 1] * p
        for c in range(delta - 1, 0, -1):
            live[c] = live[c] * (1.0 - p) + live[c - 1] * p
        live[0] *= 1.0 - p
    return live, dead


@njit(cache=True)
def _box_dp(cols, delta):
    n, k = cols.shape
    size = delta**k
    strides = np.empty(k, dtype=np.int64)
    for b in range(k):
        strides[b] = delta**b
    live = np.zeros(size)
    live[0] = 1.0
    dead = 0.0
    ops = 0
    new = np.zeros(size)
    digits = np.empty(k, dtype=np.int64)
    for j in range(n):
        for s in range(size):
            new[s] = 0.0
        for s in range(size):
            v = live[s]
            rem = s
            for b in range(k):
                digits[b] = rem % delta
                rem //= delta
            for mask in range(1 << k):
                weight = 1.0
                target = s
                overflow = False
                for b in range(k):
                    if mask >> b & 1:
                        weight *= cols[j, b]
                        if digits[b] + 1 >= delta:
                            overflow = True
                        else:
                            target += strides[b]
                    else:
                        weight *= 1.0 - cols[j, b]
                if overflow:
                    dead += weight * v
                else:
                    new[target] += weight * v
                ops += 1
        live, new = new, live
    return live, dead, ops


def poisson_binomial(q: np.ndarray) -> np.ndarray:
    return _poisson_binomial(np.ascontiguousarray(q))


def left_tail(q: np.ndarray, delta: int) -> tuple[np.ndarray, float]:
    live, dead = _left_tail(np.ascontiguousarray(q), delta)
    return live, float(dead)


def box_dp(cols: np.ndarray, delta: int) -> tuple[np.ndarray, float, int]:
    n, k = cols.shape
    live, dead, ops = _box_dp(np.ascontiguousarray(cols), delta)
    # flattened index is little-endian in the counter dims; undo for (delta,)*k
    shaped = live.reshape((delta,) * k, order="F") if k > 1 else live.reshape(delta)
    return np.ascontiguousarray(shaped), float(dead), int(ops)
