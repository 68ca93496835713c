"""Kernel dispatch: the compiled extension when built, else pure Python.

Set ``MTS_ORACLE_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("MTS_ORACLE_PURE"):
        raise ImportError("pure-Python kernels forced")
    from . import _ckernels as _impl

    COMPILED = True
except ImportError:
    _impl = _kernels_py
    COMPILED = False

furthest_schedule = _impl.furthest_schedule
lru_schedule = _impl.lru_schedule
pleco_predictions = _impl.pleco_predictions
belady_faults_batch = _impl.belady_faults_batch

# cheap enough that a compiled twin is not worth it
popu_predictions = _kernels_py.popu_predictions
next_arrivals = _kernels_py.next_arrivals
pleco_weights = _kernels_py.pleco_weights

BACKEND = "cython" if COMPILED else "python"
