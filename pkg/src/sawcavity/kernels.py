"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
fallback is used. Set ``SAWCAVITY_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

python_backend = _pykernels

try:
    if os.environ.get("SAWCAVITY_PURE_PYTHON"):
        raise ImportError("pure-Python backend forced")
    from . import _ckernels as _backend
    compiled_backend = _backend
except ImportError:
    _backend = _pykernels
    compiled_backend = None

BACKEND = _backend.NAME

jacobi_eigh = _backend.jacobi_eigh
lorentzian_s11 = _backend.lorentzian_s11
arrow_rates = _backend.arrow_rates
flux_map_abs = _backend.flux_map_abs


def available_backends():
    """Backends importable in this environment, compiled first."""
    out = []
    if compiled_backend is not None:
        out.append(compiled_backend)
    out.append(python_backend)
    return out
