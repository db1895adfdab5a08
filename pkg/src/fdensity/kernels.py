"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``FDENSITY_PURE_PYTHON`` is set to a non-empty value,
the pure-Python module is used. ``BACKEND`` names the active choice.
"""

import os

from . import _pykernels

python_backend = _pykernels

compiled_backend = None
if not os.environ.get("FDENSITY_PURE_PYTHON"):
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

_impl = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

cantor_many = _impl.cantor_many
oscillation_by_lag = _impl.oscillation_by_lag
scan_deviations = _impl.scan_deviations

__all__ = [
    "BACKEND",
    "cantor_many",
    "compiled_backend",
    "oscillation_by_lag",
    "python_backend",
    "scan_deviations",
]
