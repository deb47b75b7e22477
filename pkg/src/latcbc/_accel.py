"""Backend switch for the hot loops.

numba is used when importable unless ``LATCBC_NO_NUMBA`` is set to a truthy
value, in which case the pure-numpy kernels run instead.
"""

import os

_flag = os.environ.get("LATCBC_NO_NUMBA", "").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is an optional extra
    numba = None

HAVE_NUMBA = numba is not None
if HAVE_NUMBA and "NUMBA_THREADING_LAYER" not in os.environ:
    # skip the TBB probe; an outdated TBB only produces a warning
    try:
        from numba.np.ufunc import omppool  # noqa: F401

        numba.config.THREADING_LAYER = "omp"
    except ImportError:
        numba.config.THREADING_LAYER = "workqueue"
USE_NUMBA = HAVE_NUMBA and not DISABLED

BACKEND = "numba" if USE_NUMBA else "numpy"
