"""Backend selection for the hot interval kernel.

Imports the compiled extension when available; falls back to the numpy
implementation otherwise. Set the environment variable ``LORKAM_PURE=1`` to
force the pure-Python backend (useful for the benchmark and for debugging).
"""
import os

from . import _core_py

if os.environ.get("LORKAM_PURE"):
    _impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
        BACKEND = "ext"
    except ImportError:  # pragma: no cover - build-dependent
        _impl = _core_py
        BACKEND = "python"

flat_relation_batch = _impl.flat_relation_batch
TIE_RTOL = _core_py.TIE_RTOL
