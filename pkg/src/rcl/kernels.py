"""Kernel backend selection: compiled extension if available, numpy fallback.

Set RCL_KERNEL_BACKEND=python|compiled to force a choice; default prefers
the compiled extension.  Both backends expose the same functions; torus and
box-scan results are bit-identical between them.
"""

from __future__ import annotations

import os

from . import _kernels_py as _python

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built; fall back silently
    _compiled = None

IMPLEMENTATIONS = {"python": _python}
if _compiled is not None:
    IMPLEMENTATIONS["compiled"] = _compiled


def _select():
    forced = os.environ.get("RCL_KERNEL_BACKEND")
    if forced:
        if forced not in IMPLEMENTATIONS:
            raise ImportError(
                f"RCL_KERNEL_BACKEND={forced!r} unavailable; "
                f"have {sorted(IMPLEMENTATIONS)}"
            )
        return forced
    return "compiled" if _compiled is not None else "python"


_BACKEND = _select()
_impl = IMPLEMENTATIONS[_BACKEND]


def backend_name() -> str:
    return _BACKEND


torus_fill = _impl.torus_fill
box_scan = _impl.box_scan
weyl_sum = _impl.weyl_sum
disc1_star = _impl.disc1_star
disc1_extreme = _impl.disc1_extreme
disc2_extreme = _impl.disc2_extreme
grid_extreme_1d = _impl.grid_extreme_1d
grid_extreme_2d = _impl.grid_extreme_2d
