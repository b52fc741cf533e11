"""Kernel backend selection: compiled extension if available, numpy fallback.

Set EDGECOUNT_BACKEND=pure (or =compiled) to force a backend; by default the
compiled extension is used when the build produced it.
"""

from __future__ import annotations

import os

_requested = os.environ.get("EDGECOUNT_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "pure"):
    raise ImportError(
        f"EDGECOUNT_BACKEND must be 'compiled' or 'pure', got {_requested!r}"
    )

if _requested == "pure":
    from . import _pure as _impl

    BACKEND = "pure"
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _pure as _impl  # type: ignore[no-redef]

        BACKEND = "pure"

edge_counts_for_labels = _impl.edge_counts_for_labels
perm_edge_counts = _impl.perm_edge_counts
kruskal_kmst = _impl.kruskal_kmst
stein_mc = _impl.stein_mc
stein_mc_node_moments = _impl.stein_mc_node_moments


def get_backend() -> str:
    return BACKEND
