"""Kernel backend selection.

Numba kernels are used unless ``QSWORKLOAD_DISABLE_NUMBA=1`` is set (or
numba cannot be imported); a per-call ``backend`` argument overrides both.
"""
from __future__ import annotations

import os
from types import ModuleType

ENV_FLAG = "QSWORKLOAD_DISABLE_NUMBA"
BACKENDS = ("numba", "numpy")


def numba_disabled() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on")


def resolve_backend(backend: str | None = None) -> str:
    if backend is not None:
        if backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")
        return backend
    if numba_disabled():
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        return "numpy"
    return "numba"


def kernels(backend: str | None = None) -> ModuleType:
    if resolve_backend(backend) == "numba":
        from . import _kernels_numba as mod
    else:
        from . import _kernels_numpy as mod
    return mod
