"""Hot-kernel backend selection.

The compiled Cython core is preferred when importable; otherwise the
NumPy fallback is used. SDEC_KERNELS=numpy or SDEC_KERNELS=compiled
forces a backend (forcing an unavailable one raises ImportError).
"""

import os

from . import _numpy_impl

_forced = os.environ.get("SDEC_KERNELS", "").strip().lower()

_impl = None
if _forced not in ("", "numpy", "compiled"):
    raise ImportError(f"SDEC_KERNELS must be 'numpy' or 'compiled', got {_forced!r}")
if _forced != "numpy":
    try:
        from . import _core as _impl
    except ImportError:
        if _forced == "compiled":
            raise
        _impl = None
if _impl is None:
    _impl = _numpy_impl

BACKEND = "numpy" if _impl is _numpy_impl else "compiled"

selu = _impl.selu
selu_grad = _impl.selu_grad
pairwise_sqdist = _impl.pairwise_sqdist
student_t_q = _impl.student_t_q
nearest_centroid = _impl.nearest_centroid
label_sums = _impl.label_sums


def backend_name() -> str:
    return BACKEND


def available_backends():
    names = ["numpy"]
    try:
        from . import _core  # noqa: F401
        names.append("compiled")
    except ImportError:
        pass
    return names
