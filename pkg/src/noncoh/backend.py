"""Kernel backend selection: compiled extension when present, numpy otherwise.

The environment variable ``NONCOH_BACKEND`` ("compiled" or "python") forces a
choice for the whole process; individual decoders also accept a ``backend``
argument.
"""

from __future__ import annotations

import os

from . import _pykernels

try:
    from . import _kernels
except ImportError:  # extension not built; pure fallback
    _kernels = None

_BACKENDS = {"python": _pykernels, "compiled": _kernels}


def available_backends() -> list[str]:
    return [name for name, mod in _BACKENDS.items() if mod is not None]


def default_backend_name() -> str:
    env = os.environ.get("NONCOH_BACKEND")
    if env:
        if _BACKENDS.get(env) is None:
            raise ValueError(
                f"NONCOH_BACKEND={env!r} not available; have {available_backends()}"
            )
        return env
    return "compiled" if _kernels is not None else "python"


def get_backend(name: str | None = None):
    """Kernel module for ``name`` (None or "auto" means the default)."""
    if name is None or name == "auto":
        name = default_backend_name()
    mod = _BACKENDS.get(name)
    if mod is None:
        raise ValueError(
            f"backend {name!r} not available; have {available_backends()}"
        )
    return mod
