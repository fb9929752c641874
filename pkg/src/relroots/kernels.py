"""Kernel selection.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
pure-Python module takes over. Setting ``RELROOTS_PURE_PYTHON=1`` forces the
fallback.
"""

from __future__ import annotations

import logging
import os

from . import _pykernels

log = logging.getLogger(__name__)

_compiled = None
if os.environ.get("RELROOTS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # pragma: no cover - depends on the build
        log.debug("compiled kernels unavailable, using pure Python")

BACKEND = "compiled" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels


def get_backend(name: str | None = None):
    """Return the kernel module for ``name`` ("compiled", "python" or default)."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    return _compiled is not None


subset_histogram = _impl.subset_histogram
count_connected = _impl.count_connected
