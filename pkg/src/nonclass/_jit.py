"""Backend selection for the hot kernels.

Set ``NONCLASS_DISABLE_NUMBA=1`` to force the pure-numpy path.  Numba is also
bypassed automatically when it cannot be imported.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None

_flag = os.environ.get("NONCLASS_DISABLE_NUMBA", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _flag not in ("1", "true", "yes", "on")

numba_default = {"nogil": True, "cache": True, "fastmath": False}


def njit(*args, **kwargs):
    """``numba.njit`` with package defaults; identity decorator without numba."""
    if not HAVE_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    opts = dict(numba_default)
    opts.update(kwargs)
    if args and callable(args[0]):
        return numba.njit(**opts)(args[0])
    return numba.njit(**opts)


if HAVE_NUMBA:
    prange = numba.prange
    if "NUMBA_THREADING_LAYER" not in os.environ:
        # skip the TBB probe; old system TBB builds only emit a warning
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
else:  # pragma: no cover
    prange = range
