"""Backend selection for the propagation kernels.

The env var ``LZSIM_KERNELS`` picks the implementation:

* ``auto`` (default): numba if importable, else the pure-numpy fallback
* ``numba``: require the jitted kernels, raise if numba is unavailable
* ``numpy``: force the pure-numpy fallback

Both backends expose the same functions: ``ground_amplitudes``,
``propagate_sin``, ``propagate_ramp``, ``final_sz_grid``, ``warmup``.
"""

from __future__ import annotations

import os

from .errors import DomainError

ENV_VAR = "LZSIM_KERNELS"

_requested = os.environ.get(ENV_VAR, "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise DomainError(
        f"{ENV_VAR} must be one of auto|numba|numpy, got {_requested!r}")

if _requested == "numpy":
    from . import _kernels_numpy as _backend
elif _requested == "numba":
    from . import _kernels_numba as _backend
else:
    try:
        from . import _kernels_numba as _backend
    except ImportError:
        from . import _kernels_numpy as _backend

BACKEND = _backend.NAME
ground_amplitudes = _backend.ground_amplitudes
propagate_sin = _backend.propagate_sin
propagate_ramp = _backend.propagate_ramp
final_sz_grid = _backend.final_sz_grid
warmup = _backend.warmup


def backend_name() -> str:
    """Name of the active kernel backend ('numba' or 'numpy')."""
    return BACKEND
