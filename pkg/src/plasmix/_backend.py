"""Kernel backend selection and scalar packing.

The compiled extension is preferred when importable; set
``PLASMIX_BACKEND=python`` or ``PLASMIX_BACKEND=compiled`` to force one.
Both backends produce bit-identical results, so the choice only affects
speed.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from .model import MixtureParams

_forced = os.environ.get("PLASMIX_BACKEND")

if _forced == "python":
    kernels = _kernels_py
elif _forced == "compiled":
    from . import _kernels as kernels  # noqa: F401  (ImportError is the diagnostic)
elif _forced is None:
    try:
        from . import _kernels as kernels
    except ImportError:
        kernels = _kernels_py
else:
    raise RuntimeError(
        f"PLASMIX_BACKEND must be 'python' or 'compiled', got {_forced!r}"
    )

BACKEND = kernels.BACKEND_NAME


def available_kernel_modules() -> dict:
    """All importable kernel backends, keyed by name (for benchmarks/tests)."""
    modules = {_kernels_py.BACKEND_NAME: _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        modules[_kernels.BACKEND_NAME] = _kernels
    return modules


def mixture_scalars(params: MixtureParams) -> np.ndarray:
    """Pack the per-node flux-inversion constants for the kernels."""
    return np.array(
        [
            params.alpha,
            params.beta,
            1.0 / params.d13,
            1.0 / params.d23,
            params.d13 * params.d23,
            params.alpha * params.d13,
            params.beta * params.d23,
        ]
    )


def reaction_scalars(coeffs) -> np.ndarray:
    """Pack closure-eliminated reaction coefficients for the kernels."""
    return np.array(
        [coeffs.a11, coeffs.a12, coeffs.c1, coeffs.a21, coeffs.a22, coeffs.c2]
    )
