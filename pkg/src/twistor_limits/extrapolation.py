"""Richardson extrapolation of sampled sequences to ``t -> 0``.

The tableau is Neville's scheme evaluated at zero, so any decreasing step list
works; with the default halving ratio it reduces to classical Richardson with an
order-one base error.  Values may be arrays; all arithmetic is elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoLimit

#: Cauchy threshold on successive extrapolated estimates
TAU_LIM = 1e-6
#: number of trailing estimates inspected by the Cauchy criterion
CAUCHY_WINDOW = 5


def halving_steps(first=3, last=12):
    """``[2**-first, ..., 2**-last]``."""
    return [2.0 ** -k for k in range(first, last + 1)]


@dataclass(frozen=True)
class Extrapolation:
    value: np.ndarray
    diagonal: list  # successive tableau-diagonal estimates
    spread: float  # largest successive difference over the Cauchy window


def richardson_tableau(ts, values):
    """Diagonal of the Neville tableau evaluated at ``t = 0``.

    ``diag[k]`` is the value at zero of the degree-``k`` interpolant through the
    first ``k + 1`` samples.
    """
    ts = np.asarray(ts, dtype=float)
    cols = [np.asarray(v, dtype=np.complex128) for v in values]
    if len(cols) != len(ts):
        raise ValueError("ts and values differ in length")
    diag = [cols[0]]
    prev = cols
    for k in range(1, len(ts)):
        cur = []
        for i in range(k, len(ts)):
            # interpolate between the entries ending at i-1 and at i of order k-1
            lo, hi = prev[i - k], prev[i - k + 1]
            t_far, t_near = ts[i - k], ts[i]
            cur.append(hi + (hi - lo) * t_near / (t_far - t_near))
        prev = cur
        diag.append(cur[0])
    return diag


def extrapolate_to_zero(ts, values, tau=TAU_LIM, window=CAUCHY_WINDOW):
    """Extrapolate ``values[i] ~ f(ts[i])`` to ``f(0)`` with a Cauchy check.

    ``ts`` must be positive and strictly decreasing.  The estimate is the last
    tableau diagonal entry; :class:`NoLimit` is raised when successive diagonal
    estimates over the trailing ``window`` differ by more than ``tau`` (relative
    to the estimate when it exceeds unit size).
    """
    ts = np.asarray(ts, dtype=float)
    if ts.ndim != 1 or ts.size < 2:
        raise ValueError("need at least two steps")
    if np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise ValueError("steps must be positive and strictly decreasing")
    diag = richardson_tableau(ts, values)
    tail = diag[-min(window, len(diag)):]
    spread = 0.0
    for a, b in zip(tail, tail[1:]):
        spread = max(spread, float(np.max(np.abs(b - a))) if np.size(a) else 0.0)
    scale = max(1.0, float(np.max(np.abs(diag[-1]))) if np.size(diag[-1]) else 0.0)
    if not np.isfinite(spread) or spread > tau * scale:
        raise NoLimit(f"extrapolated estimates do not settle: spread {spread:.3e} > {tau:.1e}")
    return Extrapolation(diag[-1], diag, spread)


def loglog_slope(ts, errs):
    """Least-squares slope of ``log err`` against ``log t``."""
    ts = np.asarray(ts, dtype=float)
    errs = np.asarray(errs, dtype=float)
    keep = errs > 0
    if keep.sum() < 2:
        return float("nan")
    return float(np.polyfit(np.log(ts[keep]), np.log(errs[keep]), 1)[0])
