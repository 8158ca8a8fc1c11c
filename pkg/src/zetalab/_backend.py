"""Kernel selection: compiled extensions when importable, numpy otherwise.

Set ZETALAB_BACKEND=python to force the numpy kernels.
"""

from __future__ import annotations

import os

from . import _fallback

try:
    from types import SimpleNamespace

    from . import _cue_kernel, _kernels

    _compiled = SimpleNamespace(
        rs_main_sum=_kernels.rs_main_sum,
        cue_log_abs_sum=_cue_kernel.cue_log_abs_sum,
    )
except ImportError:  # extensions not built
    _compiled = None

AVAILABLE = {"python": _fallback}
if _compiled is not None:
    AVAILABLE["compiled"] = _compiled


def _choose() -> str:
    wanted = os.environ.get("ZETALAB_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in AVAILABLE:
            raise ImportError(f"ZETALAB_BACKEND={wanted!r} is not available: {sorted(AVAILABLE)}")
        return wanted
    return "compiled" if _compiled is not None else "python"


NAME = _choose()
kernels = AVAILABLE[NAME]


def get(name: str | None = None):
    """Kernel module by name (default: the selected one)."""
    return kernels if name is None else AVAILABLE[name]
