"""Backend selection for the solver's inner loop.

The compiled extension is used when it imports; set
``TELEGRAPH_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os

from ._ext import _kernels_py

if os.environ.get("TELEGRAPH_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from ._ext import _kernels_c as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

leapfrog_step = _impl.leapfrog_step
quadratic_energy = _impl.quadratic_energy
max_abs = _impl.max_abs


def backends():
    """Every importable backend, keyed by name (used by tests and the benchmark)."""
    found = {"python": _kernels_py}
    try:
        from ._ext import _kernels_c
        found["cython"] = _kernels_c
    except ImportError:
        pass
    return found
