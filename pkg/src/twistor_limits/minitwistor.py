"""The degenerating family of minitwistor spaces.

Points of the total space are given in one of two charts ``U0``/``U1`` with
coordinates ``(zeta, w, t)``.  For ``t != 0`` the fibre is identified with
P^1 x P^1 minus the antidiagonal through ``eta = zeta + t*w``; for ``t = 0`` it
is the tangent bundle of P^1 with fibre coordinate ``w``.

Real points of hyperbolic space of curvature ``-t**2`` (half-space model with
``r = 1/t``) correspond to real (1,1)-curves

    a00 + a10*zeta + a01*eta + a11*zeta*eta = 0,   a01 = -1/t,

and points of R^3 to sections ``w = A00 + A10*zeta + A11*zeta**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_complex, check_real
from .exceptions import (
    NotARealPoint,
    NotSigmaInvariant,
    OutsideDomain,
    OutsideHalfSpace,
    OutsideOverlap,
    ZeroT,
)
from .extrapolation import TAU_LIM, extrapolate_to_zero

U0, U1 = "U0", "U1"
#: marker for the compactifying fibre over t = infinity
T_INFINITY = math.inf
#: absolute tolerance on the reality constraints of curve coefficients
TAU_REAL = 1e-9


def _other(chart):
    return U1 if chart == U0 else U0


@dataclass(frozen=True)
class ChartPoint:
    chart: str
    zeta: complex
    w: complex
    t: complex = 0.0

    def __post_init__(self):
        if self.chart not in (U0, U1):
            raise ValueError(f"chart must be {U0!r} or {U1!r}, got {self.chart!r}")
        for name in ("zeta", "w", "t"):
            object.__setattr__(self, name, check_complex(getattr(self, name), name))
        # |zeta|^2 + t w conj(zeta) + 1 = conj(zeta) * eta + 1
        if self.zeta.conjugate() * (self.zeta + self.t * self.w) + 1 == 0:
            raise OutsideDomain("point lies over the antidiagonal")

    @property
    def eta(self):
        return self.zeta + self.t * self.w


@dataclass(frozen=True)
class ZEPoint:
    """A point ``(zeta, eta)`` of a nonzero fibre, optionally over ``t = inf``."""

    zeta: complex
    eta: complex
    t: complex
    chart: str = U0

    def __post_init__(self):
        object.__setattr__(self, "zeta", check_complex(self.zeta, "zeta"))
        object.__setattr__(self, "eta", check_complex(self.eta, "eta"))
        if self.t != T_INFINITY:
            object.__setattr__(self, "t", check_complex(self.t, "t"))
            if self.t == 0:
                raise ZeroT("the (zeta, eta) description excludes t = 0")
        if self.zeta.conjugate() * self.eta + 1 == 0:
            raise OutsideDomain("(zeta, eta) lies on the antidiagonal")

    @property
    def at_infinity(self):
        return self.t == T_INFINITY


@dataclass(frozen=True)
class Curve11:
    """Real-normalised (1,1)-curve ``a00 + a10 z + a01 e + a11 z e = 0``."""

    a00: complex
    a10: complex
    a01: complex
    a11: complex
    t: float

    def __post_init__(self):
        for name in ("a00", "a10", "a01", "a11"):
            object.__setattr__(self, name, check_complex(getattr(self, name), name))
        t = check_real(self.t, "t")
        if t <= 0:
            raise ValueError("Curve11 needs t > 0")
        object.__setattr__(self, "t", t)
        if abs(self.a01 * t + 1.0) > 1e-12:
            raise ValueError(f"Curve11 normalisation requires a01 = -1/t, got {self.a01}")
        object.__setattr__(self, "a01", complex(-1.0 / t))

    @classmethod
    def normalized(cls, a00, a10, a01, a11, t):
        """Rescale arbitrary coefficients so that ``a01 = -1/t``."""
        a01 = complex(a01)
        if a01 == 0:
            raise ValueError("cannot normalise a curve without an eta term")
        s = (-1.0 / t) / a01
        return cls(a00 * s, a10 * s, -1.0 / t, a11 * s, t)

    def grid(self):
        """Coefficients as ``c[i][j]`` of ``zeta**i * eta**j``."""
        return np.array([[self.a00, self.a01], [self.a10, self.a11]], dtype=np.complex128)


@dataclass(frozen=True)
class EuclidCurve1:
    """Section ``w = A00 + A10 zeta + A11 zeta**2`` of the tangent bundle."""

    A00: complex
    A10: complex
    A11: complex

    def __post_init__(self):
        for name in ("A00", "A10", "A11"):
            object.__setattr__(self, name, check_complex(getattr(self, name), name))

    def __call__(self, zeta):
        return self.A00 + self.A10 * zeta + self.A11 * zeta * zeta


@dataclass(frozen=True)
class SpacePoint:
    x: float
    y: float
    z: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("x", "y", "z", "t"):
            object.__setattr__(self, name, check_real(getattr(self, name), name))
        if self.t < 0:
            raise ValueError("t must be non-negative")
        if self.z * self.t <= -1:
            raise OutsideHalfSpace(f"z*t = {self.z * self.t} violates z*t > -1")

    def as_array(self):
        return np.array([self.x, self.y, self.z])


def transition(p: ChartPoint) -> ChartPoint:
    """Express ``p`` in the other chart."""
    eta = p.eta
    if p.zeta == 0 or eta == 0:
        raise OutsideOverlap("transition needs zeta != 0 and zeta + t*w != 0")
    return ChartPoint(_other(p.chart), 1.0 / p.zeta, -p.w / (eta * p.zeta), p.t)


def to_ze(p: ChartPoint) -> ZEPoint:
    if p.t == 0:
        raise ZeroT("the fibre over t = 0 has no (zeta, eta) description")
    return ZEPoint(p.zeta, p.eta, p.t, p.chart)


def from_ze(q: ZEPoint) -> ChartPoint:
    if q.at_infinity:
        raise OutsideDomain("the fibre over t = infinity has no (zeta, w) chart")
    return ChartPoint(q.chart, q.zeta, (q.eta - q.zeta) / q.t, q.t)


def sigma(p: ChartPoint) -> ChartPoint:
    """Real structure of the family, in the same chart."""
    zb = p.zeta.conjugate()
    eb = p.eta.conjugate()
    if zb == 0 or eb == 0:
        raise OutsideDomain("real structure needs zeta != 0 and zeta + t*w != 0 in this chart")
    return ChartPoint(p.chart, -1.0 / eb, -p.w.conjugate() / (eb * zb), p.t.conjugate())


def sigma0(q: ZEPoint) -> ZEPoint:
    """Standard real structure ``(zeta, eta, t) -> (-1/conj(eta), -1/conj(zeta), conj(t))``.

    Also defined on the fibre over ``t = infinity``.
    """
    if q.zeta == 0 or q.eta == 0:
        raise OutsideDomain("sigma0 needs zeta, eta != 0 in this chart")
    t = q.t if q.at_infinity else q.t.conjugate()
    return ZEPoint(-1.0 / q.eta.conjugate(), -1.0 / q.zeta.conjugate(), t, q.chart)


def point_to_curve(s: SpacePoint):
    """Curve of a point of hyperbolic space (``t > 0``) or of R^3 (``t = 0``)."""
    xy = complex(s.x, s.y)
    if s.t == 0:
        return EuclidCurve1(xy, 2.0 * s.z, -xy.conjugate())
    r = 1.0 / s.t
    rho2 = s.x * s.x + s.y * s.y + s.z * s.z
    return Curve11(xy, 2.0 * s.z + r + rho2 / r, -r, -xy.conjugate(), s.t)


def _check_reality(a00, a10, a11, what):
    if abs(a11.conjugate() + a00) > TAU_REAL or abs(a10.imag) > TAU_REAL:
        raise NotSigmaInvariant(f"{what} is not sigma-invariant")


def curve_to_point(c) -> SpacePoint:
    """Inverse of :func:`point_to_curve`."""
    if isinstance(c, EuclidCurve1):
        _check_reality(c.A00, c.A10, c.A11, "Euclidean curve")
        return SpacePoint(c.A00.real, c.A00.imag, c.A10.real / 2.0, 0.0)
    if not isinstance(c, Curve11):
        raise TypeError(f"expected Curve11 or EuclidCurve1, got {type(c).__name__}")
    _check_reality(c.a00, c.a10, c.a11, "(1,1)-curve")
    r = 1.0 / c.t
    a00sq = abs(c.a00) ** 2
    radicand = r * c.a10.real - a00sq
    if radicand <= 0:
        raise NotARealPoint("curve does not meet the half-space (radicand <= 0)")
    # z = sqrt(radicand) - r, rationalised against cancellation for large r
    z = (r * (c.a10.real - r) - a00sq) / (math.sqrt(radicand) + r)
    return SpacePoint(c.a00.real, c.a00.imag, z, c.t)


def euclid_coefficients(family):
    """Per-term ``(a00, a10 - 1/t, a11)`` of a sequence of :class:`Curve11`."""
    return [np.array([c.a00, c.a10 - 1.0 / c.t, c.a11]) for c in family]


def limit_curve(family, tau=TAU_LIM) -> EuclidCurve1:
    """Limit Euclidean curve of real (1,1)-curves with ``t -> 0``."""
    family = sorted(family, key=lambda c: -c.t)
    if len(family) < 2:
        raise ValueError("need at least two curves")
    ts = [c.t for c in family]
    ext = extrapolate_to_zero(ts, euclid_coefficients(family), tau=tau)
    a00, a10, a11 = ext.value
    return EuclidCurve1(a00, a10, a11)


def limit_point(family, tau=TAU_LIM) -> SpacePoint:
    """Point of R^3 to which the points of a degenerating curve family converge."""
    return curve_to_point(limit_curve(family, tau=tau))


def point_curve_family(x, y, z, ts):
    """Curves of the fixed point ``(x, y, z)`` in the fibres over ``ts``."""
    return [point_to_curve(SpacePoint(x, y, z, t)) for t in ts]


def conformal_factor(s: SpacePoint) -> float:
    """Conformal factor ``r**2 / (z + r)**2`` of the half-space metric."""
    if s.t <= 0:
        raise OutsideHalfSpace("conformal factor needs t > 0")
    r = 1.0 / s.t
    return r * r / ((s.z + r) ** 2)


def chart_domain_value(p: ChartPoint) -> complex:
    """``|zeta|^2 + t*w*conj(zeta) + 1``; zero exactly on the excluded antidiagonal."""
    return abs(p.zeta) ** 2 + p.t * p.w * p.zeta.conjugate() + 1


def euclid_real_structure(zeta, w):
    """Real structure ``(zeta, w) -> (-1/conj(zeta), -conj(w)/conj(zeta)**2)`` on the zero fibre."""
    zeta = complex(zeta)
    if zeta == 0:
        raise OutsideDomain("zeta = 0 maps to infinity in this chart")
    zb = zeta.conjugate()
    return -1.0 / zb, -complex(w).conjugate() / (zb * zb)

