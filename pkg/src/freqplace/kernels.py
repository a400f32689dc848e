"""Kernel backend selection.

The compiled extension is used when it was built; set
``FREQPLACE_KERNELS=python`` to force the numpy implementation.
"""
import os

from . import _kernels_py

_impl = _kernels_py
if os.environ.get("FREQPLACE_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND = _impl.BACKEND
density_map = _impl.density_map
density_grad = _impl.density_grad
wa_wirelength = _impl.wa_wirelength
freq_repulsion = _impl.freq_repulsion
