"""Select the kernel backend at import time.

The compiled ``_ckernels`` module is used when it imports cleanly; setting
``TROPRANK_PURE_PYTHON=1`` forces the pure-Python reference kernels.
"""

from __future__ import annotations

import os

from troprank import _pykernels

if os.environ.get("TROPRANK_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from troprank import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

MAX_PERM_POINTS = _pykernels.MAX_PERM_POINTS
NO_TERM = _pykernels.NO_TERM

reduce_chips = _impl.reduce_chips
unburnt = _impl.unburnt
graph_rank = _impl.graph_rank
min_perm_excess = _impl.min_perm_excess
scan_tree = _impl.scan_tree

__all__ = [
    "BACKEND",
    "MAX_PERM_POINTS",
    "NO_TERM",
    "reduce_chips",
    "unburnt",
    "graph_rank",
    "min_perm_excess",
    "scan_tree",
]
