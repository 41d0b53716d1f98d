"""Hot pair-loop kernels with a compiled core and a NumPy fallback.

The solvers spend nearly all their time in four primitives over the
ordered-pair table (gather, scatter-add by row, row scaling).  A Cython
implementation of those primitives is compiled at install time; when it
is missing, or when ``NLFLUX_BACKEND=numpy`` is set, the pure-NumPy
implementation is used instead.  Both backends accumulate in pair-table
order, so results are deterministic and bitwise identical between them.
"""

import os

from . import _numpy_backend

BACKEND = "numpy"
_impl = _numpy_backend

if os.environ.get("NLFLUX_BACKEND", "").lower() not in ("numpy", "python"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

gather_diff_scaled = _impl.gather_diff_scaled
scatter_mirror_diff = _impl.scatter_mirror_diff
row_sqsums = _impl.row_sqsums
scale_by_row = _impl.scale_by_row
