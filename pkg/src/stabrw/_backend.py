"""Pick the compiled executor when it is importable, else the numpy one."""

from __future__ import annotations

import os

from . import _fallback

try:
    if os.environ.get("STABRW_PURE_PYTHON"):
        raise ImportError("compiled kernels disabled by STABRW_PURE_PYTHON")
    from . import _kernels

    run_program = _kernels.run_program
    BACKEND = "cython"
except ImportError:
    run_program = _fallback.run_program
    BACKEND = "numpy"

fallback_run_program = _fallback.run_program

__all__ = ["run_program", "fallback_run_program", "BACKEND"]
