"""Hot DP kernels with a numba fast path and a pure-numpy fallback.

Backend selection via the UFIAUDIT_BACKEND environment variable:
  auto (default) -- numba if importable, else numpy
  numba          -- require numba
  numpy          -- force the pure-numpy reference path
"""
from __future__ import annotations

import os

_requested = os.environ.get("UFIAUDIT_BACKEND", "auto").lower()

if _requested not in ("auto", "numba", "numpy"):
    raise RuntimeError(f"UFIAUDIT_BACKEND={_requested!r} not one of auto/numba/numpy")

if _requested in ("auto", "numba"):
    try:
        from . import numba_backend as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import numpy_backend as _impl

        BACKEND = "numpy"
else:
    from . import numpy_backend as _impl

    BACKEND = "numpy"

poisson_binomial = _impl.poisson_binomial
left_tail = _impl.left_tail
box_dp = _impl.box_dp

__all__ = ["BACKEND", "poisson_binomial", "left_tail", "box_dp"]
