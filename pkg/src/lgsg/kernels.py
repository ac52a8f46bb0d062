"""Select the compiled kernels when available, else the pure-Python fallback.

Set ``LGSG_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("LGSG_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

pair_sums = _impl.pair_sums
simplex_iterate = _impl.simplex_iterate

OPTIMAL = _kernels_py.OPTIMAL
UNBOUNDED = _kernels_py.UNBOUNDED
ITER_LIMIT = _kernels_py.ITER_LIMIT
NUMERICAL = _kernels_py.NUMERICAL
