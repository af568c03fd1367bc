"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
fallback is loaded. ``FRACGRAD_BACKEND=python`` forces the fallback.
"""

import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels


def _select():
    requested = os.environ.get("FRACGRAD_BACKEND", "").strip().lower()
    if requested:
        if requested not in BACKENDS:
            raise ImportError(
                f"FRACGRAD_BACKEND={requested!r} is not available; have {sorted(BACKENDS)}"
            )
        return BACKENDS[requested]
    return _ckernels if _ckernels is not None else _pykernels


kernels = _select()


def use(name):
    """Switch the active kernel module at runtime (used by benchmarks and tests)."""
    global kernels
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {sorted(BACKENDS)}")
    kernels = BACKENDS[name]
    return kernels


def active():
    return kernels.NAME
