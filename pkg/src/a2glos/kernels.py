"""Backend selection for the occlusion kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``A2GLOS_PURE_PYTHON=1`` is set, the pure-Python module
is used.  Both expose ``cell_uniform``, ``cell_height``, ``segment_blocked``
and ``trace_batch`` with identical results.
"""
import os

from . import _pykernels

UNBOUNDED = _pykernels.UNBOUNDED

if os.environ.get("A2GLOS_PURE_PYTHON") == "1":
    _impl = _pykernels
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

cell_uniform = _impl.cell_uniform
cell_height = _impl.cell_height
segment_blocked = _impl.segment_blocked
trace_batch = _impl.trace_batch
