"""Benchmark the numba and numpy kernel backends against each other.

Run with `python -m ufiaudit.bench`.  Backends are compared in-process by
importing both implementations directly, so no env juggling is needed.
"""
from __future__ import annotations

import time

import numpy as np

from .kernels import numpy_backend

try:
    from .kernels import numba_backend
except ImportError:
    numba_backend = None


def _time(fn, *args, repeats: int = 3) -> float:
    fn(*args)  # warm-up (jit compile)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run() -> None:
    rng = np.random.default_rng(7)
    backends = [("numpy", numpy_backend)]
    if numba_backend is not None:
        backends.append(("numba", numba_backend))

    print(f"{'kernel':<24}{'size':<22}" + "".join(f"{name:>12}" for name, _ in backends))
    cases = [
        ("poisson_binomial", lambda b, n: b.poisson_binomial(rng.random(n)), [2000, 5000]),
        ("left_tail d=32", lambda b, n: b.left_tail(rng.random(n), 32), [10_000, 100_000]),
        (
            "box_dp k=2 d=8",
            lambda b, n: b.box_dp(rng.random((n, 2)) * 0.5, 8),
            [1_000, 10_000],
        ),
        (
            "box_dp k=3 d=4",
            lambda b, n: b.box_dp(rng.random((n, 3)) * 0.5, 4),
            [1_000, 10_000],
        ),
    ]
    for label, call, sizes in cases:
        for n in sizes:
            row = f"{label:<24}{f'n={n}':<22}"
            for _name, backend in backends:
                row += f"{1e3 * _time(call, backend, n):>10.2f}ms"
            print(row)


if __name__ == "__main__":
    run()
