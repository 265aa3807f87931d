"""Input validation helpers shared by the modules and the estimator wrappers."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import NonSquare


def check_cmatrix(a, name="matrix", square=False):
    """Return ``a`` as a finite 2-d complex128 array.

    Raises ``ValueError`` for wrong dimensionality or non-finite entries and
    :class:`NonSquare` when ``square`` is requested and the shape disagrees.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must be a non-empty 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    if square and arr.shape[0] != arr.shape[1]:
        raise NonSquare(f"{name} must be square, got shape {arr.shape}")
    return arr


def check_same_shape(*arrays, names=None):
    shapes = {a.shape for a in arrays}
    if len(shapes) != 1:
        label = ", ".join(names) if names else "arrays"
        raise ValueError(f"{label} must share one shape, got {sorted(shapes)}")


def check_complex(z, name="value"):
    if not isinstance(z, numbers.Number):
        raise TypeError(f"{name} must be a number, got {type(z).__name__}")
    z = complex(z)
    if not (np.isfinite(z.real) and np.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite")
    return z


def check_real(x, name="value"):
    z = check_complex(x, name)
    if z.imag != 0.0:
        raise ValueError(f"{name} must be real, got {z}")
    return z.real


def max_norm(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def rel_close(a, b, rtol):
    """Max-norm comparison relative to the larger operand (absolute below unit scale)."""
    scale = max(1.0, max_norm(a), max_norm(b))
    return max_norm(np.asarray(a) - np.asarray(b)) <= rtol * scale
