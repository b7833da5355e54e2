"""Numba availability switch.

Set ``ISOCOND_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The flag is
read once at import time.
"""
import os

_FALSY = {"", "0", "false", "no", "off"}

DISABLED_BY_ENV = os.environ.get("ISOCOND_DISABLE_NUMBA", "0").strip().lower() not in _FALSY

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not DISABLED_BY_ENV

if HAVE_NUMBA:
    import warnings

    # numba probes TBB first and warns when the system copy is too old; it then
    # falls back to another threading layer, which is all we need
    warnings.filterwarnings("ignore", message="The TBB threading layer", category=numba.NumbaWarning)
