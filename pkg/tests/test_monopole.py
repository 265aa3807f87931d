import cmath

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from twistor_limits.exceptions import (
    BranchCut,
    DegenerateLeading,
    NoLimit,
    NonSimplePoles,
    NotBased,
    ZeroZeta,
)
from twistor_limits.extrapolation import halving_steps, loglog_slope
from twistor_limits.minitwistor import SpacePoint, point_to_curve
from twistor_limits.monopole import (
    RationalMap,
    SpectralCurveEuc,
    SpectralCurveHyp,
    bundle_cocycle,
    cocycle_limit_error,
    euclid_limit,
    hyp_family,
    rational_map_pole_data,
    sigma_residual,
)

coord = st.floats(-3, 3, allow_nan=False)


def test_cocycle_examples():
    assert bundle_cocycle(0, 0, 0, 0.3, 0.2 + 1j, 5) == 1
    assert bundle_cocycle(1, 0, 0, 1, 1, 1) == pytest.approx(0.5)
    vals = [bundle_cocycle(1, 0, 0, t, 1, 1) for t in halving_steps(3, 10)]
    errs = [abs(v - np.exp(-1)) for v in vals]
    assert errs[-1] < 1e-3 and abs(loglog_slope(halving_steps(3, 10), errs) - 1) < 0.2


def test_cocycle_errors():
    with pytest.raises(BranchCut):
        bundle_cocycle(1, 0, 0, 1, 1, -2)
    with pytest.raises(BranchCut):
        bundle_cocycle(1, 0, 0, 1, 1, -1)
    with pytest.raises(ZeroZeta):
        bundle_cocycle(1, 0, 0, 0, 0, 1)


def test_cocycle_t0_and_integer_bundles():
    assert bundle_cocycle(0, 2, 1, 0, 2j, 7) == pytest.approx((2j) ** 3)
    # L^2 (k, -k) at t = 0 reduces to exp(-2 w / zeta)
    assert bundle_cocycle(2, 3, -3, 0, 1 + 1j, 0.5) == pytest.approx(cmath.exp(-1 / (1 + 1j)))
    z, w = 0.6 - 0.8j, 0.3 + 0.2j
    vals = [bundle_cocycle(0, 2, -1, t, z, w) for t in halving_steps(6, 16)]
    assert abs(vals[-1] - z) < 1e-4


@settings(max_examples=100, deadline=None)
@given(
    st.floats(-3, 3), st.floats(-3, 3), st.integers(-3, 3), st.integers(-3, 3),
    st.integers(-3, 3), st.integers(-3, 3), st.one_of(st.just(0.0), st.floats(1e-8, 0.25)),
    st.floats(0, 2 * np.pi),
    st.floats(0, 1), st.floats(0, 2 * np.pi),
)
def test_cocycle_multiplicative(s1, s2, a1, a2, b1, b2, t, th, r, ph):
    z, w = cmath.exp(1j * th), r * cmath.exp(1j * ph)
    lhs = bundle_cocycle(s1 + s2, a1 + a2, b1 + b2, t, z, w)
    rhs = bundle_cocycle(s1, a1, b1, t, z, w) * bundle_cocycle(s2, a2, b2, t, z, w)
    assert abs(lhs - rhs) <= 1e-12 * max(1, abs(lhs))


@pytest.mark.parametrize("s", [1, 2, 5])
def test_cocycle_limit_rate(s):
    ts = halving_steps(3, 10)
    zs = np.exp(2j * np.pi * np.arange(12) / 12)
    ws = [r * cmath.exp(1j * a) for r in (0.5, 1.0) for a in np.linspace(0, 2 * np.pi, 6, endpoint=False)]
    assert abs(loglog_slope(ts, cocycle_limit_error(s, ts, zs, ws)) - 1) <= 0.2


def test_euclid_limit_examples():
    e = euclid_limit(hyp_family([(1, 2, 3)], halving_steps()))
    assert np.allclose(-e.a[0], [1 + 2j, 6, -(1 - 2j)], atol=1e-10)
    e = euclid_limit(hyp_family([(0, 0, 0)], halving_steps()))
    assert np.allclose(e.a[0], 0, atol=1e-10)
    bad = [SpectralCurveHyp(1, t, [[1 / t, -1 / t], [3, 0]]) for t in halving_steps()]
    with pytest.raises(NoLimit):
        euclid_limit(bad)


def test_euclid_limit_degenerate_leading():
    fam = [SpectralCurveHyp(1, t, [[1, 0], [1, 1]]) for t in halving_steps()]
    with pytest.raises(DegenerateLeading):
        euclid_limit(fam)


@settings(max_examples=40, deadline=None)
@given(coord, coord, coord)
def test_euclid_limit_matches_closed_form(x, y, z):
    e = euclid_limit(hyp_family([(x, y, z)], halving_steps()))
    c = point_to_curve(SpacePoint(x, y, z, 0))
    assert np.max(np.abs(-e.a[0] - [c.A00, c.A10, c.A11])) <= 1e-8
    assert sigma_residual(e) <= 1e-9


def test_charge_two_and_three_limits():
    pts = [(1, 2, 3), (-0.5, 0.3, 1.1), (0.2, -1, -0.7)]
    e2 = euclid_limit(hyp_family(pts[:2], halving_steps(3, 10)))
    ex2 = SpectralCurveEuc.from_points(pts[:2])
    assert max(np.max(np.abs(a - b)) for a, b in zip(e2.a, ex2.a)) < 1e-8
    e3 = euclid_limit(hyp_family(pts, halving_steps(2, 9)))
    ex3 = SpectralCurveEuc.from_points(pts)
    assert max(np.max(np.abs(a - b)) for a, b in zip(e3.a, ex3.a)) < 1e-5
    assert sigma_residual(ex3) < 1e-9


def test_sigma_residual_examples():
    c = SpectralCurveHyp.from_curve11(point_to_curve(SpacePoint(0, 0, 1, 1)))
    assert sigma_residual(c) <= 1e-9
    assert sigma_residual(SpectralCurveEuc(1, ([-1, 0, 1],))) <= 1e-9
    assert sigma_residual(SpectralCurveEuc(1, ([0, 0, -1],))) == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(TypeError):
        sigma_residual("curve")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(coord, coord, coord), min_size=1, max_size=3), st.floats(0.05, 2))
def test_sigma_invariance_of_real_curves(points, t):
    assume(all(z * t > -0.9 for _, _, z in points))
    assert sigma_residual(SpectralCurveHyp.from_points(points, t)) <= 1e-9 * max(
        1, np.max(np.abs(SpectralCurveHyp.from_points(points, t).coeffs))
    )
    assert sigma_residual(SpectralCurveEuc.from_points(points)) <= 1e-9 * max(
        1, max(np.max(np.abs(a)) for a in SpectralCurveEuc.from_points(points).a)
    )


def test_curve_types_validate():
    with pytest.raises(ValueError):
        SpectralCurveHyp(1, 0.5, np.zeros((2, 2)))
    with pytest.raises(ValueError):
        SpectralCurveHyp(1, 0.5, np.ones((3, 3)))
    with pytest.raises(ValueError):
        SpectralCurveEuc(1, ([0, 0, 0, 1],))
    c = SpectralCurveHyp.normalized(1, 0.5, [[1, 4], [2, 3]])
    assert c.coeffs[0, 1] == -2
    e = SpectralCurveEuc(1, ([1],))
    assert e.a[0].shape == (3,) and e(0.0, -1.0) == 0


def test_pole_data_examples():
    assert rational_map_pole_data(RationalMap(1, [1], [0, 1])) == [(0, 1)]
    data = rational_map_pole_data(RationalMap(2, [1], [-1, 0, 1]))
    assert np.allclose([p for p, _ in data], [-1, 1]) and np.allclose([v for _, v in data], [1, 1])
    with pytest.raises(NonSimplePoles):
        rational_map_pole_data(RationalMap(2, [1], [0, 0, 1]))


def test_rational_map_validation():
    with pytest.raises(NotBased):
        RationalMap(2, [1, 1, 1], [-1, 0, 1])
    with pytest.raises(NotBased):
        RationalMap(2, [1], [-1, 0, 2])
    with pytest.raises(ValueError):
        RationalMap(2, [-1, 1], [-1, 0, 1])  # common root z = 1
