"""Backend dispatch for the hot kernels.

Set ``SEQFORGE_BACKEND=numpy`` to force the pure-numpy path; the default is
``numba`` when it imports, otherwise numpy. The choice is made once at import.
"""

import os

BACKEND_ENV = "SEQFORGE_BACKEND"


def _select():
    wanted = os.environ.get(BACKEND_ENV, "numba").strip().lower()
    if wanted not in ("numba", "numpy"):
        raise ImportError(f"{BACKEND_ENV} must be 'numba' or 'numpy', got {wanted!r}")
    if wanted == "numba":
        try:
            from . import _kernels_numba as impl
            return "numba", impl
        except ImportError:
            pass
    from . import _kernels_numpy as impl
    return "numpy", impl


BACKEND, _impl = _select()

gram = _impl.gram
max_offdiag_abs = _impl.max_offdiag_abs
probe_correlations = _impl.probe_correlations
sequence_displacement = _impl.sequence_displacement
papr_displacement = _impl.papr_displacement
