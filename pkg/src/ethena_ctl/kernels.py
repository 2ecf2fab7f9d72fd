"""Kernel backend selection: compiled extension if built, numpy otherwise."""

from __future__ import annotations

try:
    from . import _kernels as _impl

    BACKEND = "compiled"
except ImportError:  # extension not built; identical numpy implementation
    from . import _kernels_py as _impl

    BACKEND = "numpy"

simulate_batch = _impl.simulate_batch
objective_batch = _impl.objective_batch

__all__ = ["BACKEND", "simulate_batch", "objective_batch"]
