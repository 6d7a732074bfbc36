"""Kernel backend selection.

Imports the compiled extension when it is available and not disabled via
``GPILAB_DISABLE_EXT=1``, otherwise the numpy fallback. ``BACKEND`` names the
active implementation; both expose the same functions and agree numerically
(see tests/test_kernels.py and benchmarks/bench_kernels.py).
"""

import os

from ._kernels_py import (  # codes are backend-independent
    A_COUNT,
    A_SCALED_COUNT,
    D_COMPLEMENT_POWER,
    D_POWER,
    W_ONE,
    W_POWER,
)

if os.environ.get("GPILAB_DISABLE_EXT") == "1":
    _impl = None
else:
    try:
        from . import _gpi_kernels as _impl
    except ImportError:
        _impl = None

if _impl is not None:
    BACKEND = "cython"
    coded_gpi_value = _impl.coded_gpi_value
    stable_ranks = _impl.stable_ranks
    rank_gap_weighted_sum = _impl.rank_gap_weighted_sum
else:
    from ._kernels_py import (
        coded_gpi_value,
        rank_gap_weighted_sum,
        stable_ranks,
    )

    BACKEND = "python"

__all__ = [
    "BACKEND",
    "W_ONE", "W_POWER", "D_POWER", "D_COMPLEMENT_POWER",
    "A_COUNT", "A_SCALED_COUNT",
    "coded_gpi_value", "stable_ranks", "rank_gap_weighted_sum",
]
