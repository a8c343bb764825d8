"""Kernel backend selection: compiled extension if available, numpy fallback.

Set EOQSIM_PURE_PYTHON=1 to force the numpy backend (used by the benchmark
and by CI environments without a compiler).
"""

from __future__ import annotations

import os

from . import _kernels_np

if os.environ.get("EOQSIM_PURE_PYTHON"):
    _impl = _kernels_np
    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_np
        BACKEND = "numpy"

apply_two_spin_gate = _impl.apply_two_spin_gate
apply_spin_phases = _impl.apply_spin_phases
singlet_components = _impl.singlet_components
