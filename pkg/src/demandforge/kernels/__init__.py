"""Kernel dispatch.

The hot numeric loops live here in two flavors: numba-jitted (numba_impl)
and pure numpy (numpy_impl). DEMANDFORGE_KERNELS picks the path:

    auto   (default) jitted kernels when numba imports, numpy otherwise
    numba  require the jitted path, fail loudly if numba is unavailable
    numpy  force the fallback

benchmarks/bench_kernels.py times the two paths side by side.
"""

from __future__ import annotations

import os

from . import numpy_impl

_MODE = os.environ.get("DEMANDFORGE_KERNELS", "auto").lower()
if _MODE not in ("auto", "numba", "numpy"):
    raise RuntimeError(
        f"DEMANDFORGE_KERNELS must be one of auto/numba/numpy, got {_MODE!r}"
    )

if _MODE == "numpy":
    _active = numpy_impl
    BACKEND = "numpy"
else:
    try:
        from . import numba_impl

        _active = numba_impl
        BACKEND = "numba"
    except ImportError:
        if _MODE == "numba":
            raise RuntimeError("DEMANDFORGE_KERNELS=numba but numba is not importable")
        _active = numpy_impl
        BACKEND = "numpy"

best_split = _active.best_split
predict_tree = _active.predict_tree
pattern_stack = _active.pattern_stack
statistic_stack = _active.statistic_stack
inventory_run = _active.inventory_run
