"""Kernel backend selection.

Prefers the compiled extension (qpass._core) and falls back to the numpy
implementation. Override with QPASS_KERNELS={auto,c,py}.
"""

from __future__ import annotations

import logging
import os

log = logging.getLogger(__name__)

_choice = os.environ.get("QPASS_KERNELS", "auto").lower()
if _choice not in ("auto", "c", "py"):
    raise RuntimeError(f"QPASS_KERNELS must be auto, c, or py, not {_choice!r}")

if _choice == "py":
    from . import _kernels_py as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "c":
            raise RuntimeError(
                "QPASS_KERNELS=c but the compiled extension is unavailable")
        from . import _kernels_py as _impl  # type: ignore[no-redef]
        log.info("compiled kernels unavailable, using numpy fallback")

BACKEND = _impl.BACKEND
assign_nearest = _impl.assign_nearest
minibatch_update = _impl.minibatch_update
absorption_walks = _impl.absorption_walks


def backend_name() -> str:
    return BACKEND
