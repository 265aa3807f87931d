"""Spectral curves, line-bundle cocycles and rational-map coordinates.

A hyperbolic spectral curve of charge ``k`` is a bidegree-``(k, k)`` polynomial
``sum c[i][j] zeta**i eta**j`` on the fibre over ``t > 0``.  Substituting
``eta = zeta + t w`` and dividing by the ``zeta**0 w**k`` coefficient gives a
w-monic polynomial whose ``t -> 0`` limit is a Euclidean spectral curve

    w**k + a_1(zeta) w**(k-1) + ... + a_k(zeta),   deg a_j <= 2 j.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import minimize_scalar

from ._validation import check_complex, check_real, max_norm
from .exceptions import (
    BranchCut,
    DegenerateLeading,
    NoLimit,
    NonSimplePoles,
    NotBased,
    ZeroZeta,
)
from .extrapolation import TAU_LIM, extrapolate_to_zero
from .minitwistor import Curve11, EuclidCurve1, SpacePoint, point_to_curve

#: relative size below which a leading coefficient counts as vanished
LEADING_TOL = 1e-12
#: absolute tolerance for limit coefficients forced to zero by the degree bounds
DEGREE_TOL = 1e-8
POLE_SEPARATION = 1e-8


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpectralCurveHyp:
    """Bidegree-``(k, k)`` curve; ``coeffs[i, j]`` multiplies ``zeta**i eta**j``.

    The scale convention is ``coeffs[0, k] = (-1/t)**k``, which is the
    :class:`Curve11` normalisation for ``k = 1`` and makes the ``zeta**0 w**k``
    coefficient equal to ``(-1)**k`` after substituting ``eta = zeta + t w``.
    Use :meth:`normalized` to rescale arbitrary coefficients.
    """

    k: int
    t: float
    coeffs: np.ndarray

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError("charge k must be a positive integer")
        t = check_real(self.t, "t")
        if t <= 0:
            raise ValueError("hyperbolic curves need t > 0")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.k + 1, self.k + 1):
            raise ValueError(f"coefficient grid must be {(self.k + 1,) * 2}, got {c.shape}")
        if not np.all(np.isfinite(c)) or not np.any(c):
            raise ValueError("coefficient grid must be finite and not identically zero")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "coeffs", _frozen(c))

    @classmethod
    def normalized(cls, k, t, coeffs):
        c = np.asarray(coeffs, dtype=np.complex128)
        lead = c[0, k]
        if lead == 0:
            raise DegenerateLeading("the zeta**0 eta**k coefficient vanishes")
        return cls(k, t, c * ((-1.0 / t) ** k / lead))

    @classmethod
    def from_curve11(cls, c: Curve11):
        return cls(1, c.t, c.grid())

    @classmethod
    def from_points(cls, points, t):
        """Reducible curve: product of the (1,1)-curves of ``points`` at parameter ``t``."""
        grid = np.ones((1, 1), dtype=np.complex128)
        for x, y, z in points:
            g = point_to_curve(SpacePoint(x, y, z, t)).grid()
            grid = _mul2(grid, g)
        return cls(len(points), t, grid)

    def __call__(self, zeta, eta):
        k = self.k
        return complex(np.einsum("i,j,ij->", zeta ** np.arange(k + 1), eta ** np.arange(k + 1), self.coeffs))

    def substituted(self):
        """Coefficients ``R[p, l]`` of ``zeta**p w**l`` after ``eta = zeta + t w``."""
        k, t = self.k, self.t
        R = np.zeros((2 * k + 1, k + 1), dtype=np.complex128)
        for (i, j), c in np.ndenumerate(self.coeffs):
            if c == 0:
                continue
            for l in range(j + 1):
                R[i + j - l, l] += c * comb(j, l) * t**l
        return R


def _mul2(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), dtype=np.complex128)
    for (i, j), c in np.ndenumerate(a):
        out[i:i + b.shape[0], j:j + b.shape[1]] += c * b
    return out


@dataclass(frozen=True, eq=False)
class SpectralCurveEuc:
    """``w**k + a[0](zeta) w**(k-1) + ... + a[k-1](zeta)``; ``a[j-1]`` ascending in zeta."""

    k: int
    a: tuple

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError("charge k must be a positive integer")
        if len(self.a) != self.k:
            raise ValueError(f"need {self.k} coefficient polynomials, got {len(self.a)}")
        polys = []
        for j, p in enumerate(self.a, start=1):
            p = np.atleast_1d(np.asarray(p, dtype=np.complex128))
            if p.ndim != 1 or not np.all(np.isfinite(p)):
                raise ValueError(f"a_{j} must be a finite coefficient list")
            if np.any(p[2 * j + 1:] != 0):
                raise ValueError(f"a_{j} exceeds degree {2 * j}")
            padded = np.zeros(2 * j + 1, dtype=np.complex128)
            m = min(p.size, 2 * j + 1)
            padded[:m] = p[:m]
            polys.append(_frozen(padded))
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "a", tuple(polys))

    @classmethod
    def from_euclid1(cls, c: EuclidCurve1):
        """``w - (A00 + A10 zeta + A11 zeta**2)``."""
        return cls(1, ([-c.A00, -c.A10, -c.A11],))

    @classmethod
    def from_points(cls, points):
        """Product of the sections of ``points`` in R^3."""
        prod = np.ones((1, 1), dtype=np.complex128)  # [zeta power, w power]
        for x, y, z in points:
            c = point_to_curve(SpacePoint(x, y, z, 0.0))
            lin = np.zeros((3, 2), dtype=np.complex128)
            lin[:, 0] = [-c.A00, -c.A10, -c.A11]
            lin[0, 1] = 1.0
            prod = _mul2(prod, lin)
        k = len(points)
        return cls(k, tuple(prod[: 2 * j + 1, k - j] for j in range(1, k + 1)))

    def __call__(self, zeta, w):
        out = w**self.k
        for j, p in enumerate(self.a, start=1):
            out += npoly.polyval(zeta, p) * w ** (self.k - j)
        return complex(out)

    def terms(self):
        """``{(j, p): alpha}`` for ``alpha zeta**p w**(k-j)``, including ``(0, 0): 1``."""
        out = {(0, 0): 1.0 + 0j}
        for j, p in enumerate(self.a, start=1):
            for q, c in enumerate(p):
                out[(j, q)] = complex(c)
        return out


# -- cocycles --------------------------------------------------------------------


def bundle_cocycle(s, a, b, t, zeta, w):
    """Transition value of ``L**s (a, b)`` at ``(zeta, w, t)``.

    ``(1 + t w/zeta)**(-s/t) zeta**a (zeta + t w)**b`` on the principal branch
    for ``t > 0``; ``exp(-s w/zeta) zeta**(a + b)`` for ``t = 0``.
    """
    s = check_real(s, "s")
    t = check_real(t, "t")
    zeta = check_complex(zeta, "zeta")
    w = check_complex(w, "w")
    if t < 0:
        raise ValueError("t must be non-negative")
    if zeta == 0:
        raise ZeroZeta("the cocycle is defined on zeta != 0")
    if t == 0:
        return cmath.exp(-s * w / zeta) * zeta ** (a + b)
    x = t * w / zeta
    base = 1.0 + x
    if base.imag == 0.0 and base.real <= 0.0:
        raise BranchCut(f"1 + t w/zeta = {base.real} lies on the cut")
    return cmath.exp(-s * (_log1p(x) / t)) * zeta**a * (zeta + t * w) ** b


def _log1p(x):
    # principal log(1 + x), accurate for small |x|
    u = 1.0 + x
    if u == 1.0:
        return x
    return cmath.log(u) * x / (u - 1.0)


# -- degeneration ------------------------------------------------------------------


def euclid_limit(family, tau=TAU_LIM) -> SpectralCurveEuc:
    """Limit of hyperbolic curves of one charge as ``t -> 0``."""
    family = sorted(family, key=lambda c: -c.t)
    if len(family) < 2:
        raise ValueError("need at least two curves")
    ks = {c.k for c in family}
    if len(ks) != 1:
        raise ValueError(f"family mixes charges {sorted(ks)}")
    k = ks.pop()
    monic = []
    for c in family:
        R = c.substituted()
        lead = R[0, k]
        if abs(lead) <= LEADING_TOL * max_norm(R):
            raise DegenerateLeading(f"w-leading coefficient vanishes at t = {c.t}")
        monic.append(R / lead)
    ext = extrapolate_to_zero([c.t for c in family], monic, tau=tau)
    R0 = ext.value
    if max_norm(R0[1:, k]) > DEGREE_TOL:
        raise DegenerateLeading("the w-leading coefficient does not tend to a constant")
    a = []
    for j in range(1, k + 1):
        col = R0[:, k - j]
        if max_norm(col[2 * j + 1:]) > DEGREE_TOL:
            raise NoLimit(f"limit violates the degree bound on a_{j}")
        a.append(col[: 2 * j + 1])
    return SpectralCurveEuc(k, tuple(a))


def hyp_family(points, ts):
    """Curves of fixed points of R^3 in the hyperbolic fibres over ``ts``."""
    return [SpectralCurveHyp.from_points(points, t) for t in ts]


# -- real structure ----------------------------------------------------------------


def _sigma_pull_hyp(c: SpectralCurveHyp):
    k = c.k
    P = c.coeffs
    out = np.empty_like(P)
    for a in range(k + 1):
        for b in range(k + 1):
            out[a, b] = (-1) ** (a + b) * np.conj(P[k - b, k - a])
    return P, out


def _sigma_pull_euc(c: SpectralCurveEuc):
    k = c.k
    terms = c.terms()
    keys = sorted(terms)
    F = np.array([terms[key] for key in keys])
    Fs = np.array([(-1) ** (k + j + q) * np.conj(terms[(j, 2 * j - q)]) for j, q in keys])
    return F, Fs


def _best_phase(F, Fs, grid=360):
    def cost(theta):
        return max_norm(cmath.exp(1j * theta) * F - Fs)

    thetas = 2 * np.pi * np.arange(grid) / grid
    costs = [cost(th) for th in thetas]
    i = int(np.argmin(costs))
    step = 2 * np.pi / grid
    res = minimize_scalar(cost, bounds=(thetas[i] - step, thetas[i] + step), method="bounded",
                          options={"xatol": 1e-12})
    return min(costs[i], float(res.fun))


def sigma_residual(c) -> float:
    """Distance from sigma-invariance, minimised over a unimodular scale."""
    if isinstance(c, SpectralCurveHyp):
        F, Fs = _sigma_pull_hyp(c)
    elif isinstance(c, SpectralCurveEuc):
        F, Fs = _sigma_pull_euc(c)
    else:
        raise TypeError(f"expected a spectral curve, got {type(c).__name__}")
    return _best_phase(F.ravel(), Fs.ravel())


# -- rational maps -----------------------------------------------------------------


def _resultant(p, q):
    """Sylvester resultant of two ascending coefficient lists."""
    p = np.trim_zeros(np.asarray(p, dtype=np.complex128), "b")
    q = np.trim_zeros(np.asarray(q, dtype=np.complex128), "b")
    m, n = len(p) - 1, len(q) - 1
    if m < 0 or n < 0:
        return 0.0
    if m == 0 and n == 0:
        return 1.0
    S = np.zeros((m + n, m + n), dtype=np.complex128)
    for r in range(n):
        S[r, r:r + m + 1] = p[::-1]
    for r in range(m):
        S[n + r, r:r + n + 1] = q[::-1]
    return complex(np.linalg.det(S))


@dataclass(frozen=True, eq=False)
class RationalMap:
    """Based map ``p/q``; coefficient lists in ascending powers of ``z``."""

    k: int
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError("degree k must be a positive integer")
        p = np.trim_zeros(np.atleast_1d(np.asarray(self.p, dtype=np.complex128)), "b")
        q = np.trim_zeros(np.atleast_1d(np.asarray(self.q, dtype=np.complex128)), "b")
        if q.size != self.k + 1 or q[-1] != 1:
            raise NotBased(f"q must be monic of degree {self.k}")
        if p.size == 0 or p.size > self.k:
            raise NotBased(f"p must be nonzero with degree below {self.k}")
        scale = max(1.0, max_norm(p)) ** self.k * max(1.0, max_norm(q)) ** (p.size - 1)
        if abs(_resultant(p, q)) <= 1e-12 * scale:
            raise ValueError("p and q have a common root")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "p", _frozen(p))
        object.__setattr__(self, "q", _frozen(q))


def rational_map_pole_data(r: RationalMap):
    """``[(eta_i, p(eta_i)), ...]`` over the poles, sorted by (real, imag)."""
    roots = npoly.polyroots(r.q) if r.k > 1 else np.array([-r.q[0]])
    roots = sorted((complex(z) + 0.0 for z in roots), key=lambda z: (z.real, z.imag))
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) <= POLE_SEPARATION:
                raise NonSimplePoles(f"poles {roots[i]} and {roots[j]} coincide")
    return [(z, complex(npoly.polyval(z, r.p))) for z in roots]


def cocycle_limit_error(s, ts, zetas, ws):
    """``max |cocycle(s, 0, 0, t) - exp(-s w/zeta)|`` over the sample set, per ``t``."""
    errs = []
    for t in ts:
        e = 0.0
        for z in zetas:
            for w in ws:
                e = max(e, abs(bundle_cocycle(s, 0, 0, t, z, w) - cmath.exp(-s * w / z)))
        errs.append(e)
    return errs

