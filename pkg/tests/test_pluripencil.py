import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistor_limits.exceptions import DegeneratePencil, SingularGauge
from twistor_limits.pluripencil import (
    PluriPencil,
    antidiagonal_clearance,
    assemble_C,
    assemble_M,
    assemble_M_h,
    char_poly,
    cohomology_f2,
    cohomology_report,
    criterion_matrix,
    gauge_act,
    is_hypercomplex,
    sphere_grid,
)
from twistor_limits.polymat import det2, eval2, numerical_rank

from conftest import crandn

X2 = np.array([[0.0, 1.0], [-1.0, 0.0]])
E11 = np.diag([1.0, 0.0])


def normalized(poly, n):
    c = poly.padded((n, n)).coeffs
    k = np.unravel_index(np.argmax(np.abs(c)), c.shape)
    return c / c[k]


def test_assemble_M_example():
    p = PluriPencil(X2, np.zeros((2, 2)))
    z, e = 0.3 + 0.1j, -1.1
    M = eval2(assemble_M(p), z, e)
    want = np.block([[X2, -np.eye(2)], [z * np.eye(2), e * X2]])
    assert np.allclose(M, want)


def test_homogeneous_presentation_dehomogenises(rng):
    p = PluriPencil(crandn(rng, 3, 3), crandn(rng, 3, 3))
    z, e = 0.4 - 0.2j, 1.3 + 0.5j
    assert np.allclose(assemble_M_h(p).evaluate(1, z, 1, e), eval2(assemble_M(p), z, e))


def test_det_M_equals_det_C(rng):
    p = PluriPencil(crandn(rng, 3, 3), crandn(rng, 3, 3))
    d = det2(assemble_M(p))
    z, e = 0.7 + 0.3j, -0.2 + 1j
    assert abs(d(z, e) - np.linalg.det(eval2(assemble_C(p), z, e))) < 1e-9 * max(1, abs(d(z, e)))


def test_degenerate_scalar_pencil():
    p = PluriPencil([[0]], [[1]])
    assert det2(assemble_M(p)).is_zero(1e-12)
    assert char_poly(p).is_zero()
    with pytest.raises(DegeneratePencil):
        cohomology_report(p)
    with pytest.raises(DegeneratePencil):
        antidiagonal_clearance(p)


def test_char_poly_examples():
    hk = char_poly(PluriPencil(X2, np.zeros((2, 2))))
    assert np.allclose(hk.coeffs, [[0, 0, 1], [0, -2, 0], [1, 0, 0]])
    c = char_poly(PluriPencil([[1]], [[0]]))
    assert np.allclose(c.coeffs, [[0, 1], [1, 0]])


def test_is_hypercomplex_examples():
    assert is_hypercomplex(PluriPencil(X2, np.zeros((2, 2))))
    assert not is_hypercomplex(PluriPencil(X2, 1e-3 * E11))
    assert not is_hypercomplex(PluriPencil([[1j]], [[0]]))


def test_gauge_examples(rng):
    p = PluriPencil(crandn(rng, 2, 2), crandn(rng, 2, 2))
    for g in (np.eye(2), 3.5 * np.eye(2)):
        q = gauge_act(g, p)
        assert np.allclose(q.X, p.X) and np.allclose(q.Y, p.Y)
    with pytest.raises(SingularGauge):
        gauge_act(E11, p)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([2, 3, 4]), st.integers(0, 2**31 - 1))
def test_gauge_invariance_of_char_poly(n, seed):
    rng = np.random.default_rng(seed)
    p = PluriPencil(crandn(rng, n, n), crandn(rng, n, n))
    g = np.eye(n) + 0.4 * crandn(rng, n, n)
    a = char_poly(p).padded((n, n)).coeffs
    b = char_poly(gauge_act(g, p)).padded((n, n)).coeffs
    lam = np.vdot(a, b) / np.vdot(a, a)
    assert abs(lam) > 0
    assert np.max(np.abs(b - lam * a)) <= 1e-8 * np.max(np.abs(b))


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([2, 4]), st.integers(0, 2**31 - 1))
def test_hypercomplex_has_diagonal_curve(n, seed):
    rng = np.random.default_rng(seed)
    g = np.eye(n) + 0.3 * crandn(rng, n, n)
    p = gauge_act(g, PluriPencil.hypercomplex_model(n))
    assert is_hypercomplex(p, 1e-9)
    assert p.n % 2 == 0
    c = normalized(char_poly(p), n)
    from math import comb

    want = np.zeros((n + 1, n + 1))
    for j in range(n + 1):
        want[n - j, j] = (-1) ** j * comb(n, j)
    assert np.max(np.abs(c - want / want[np.unravel_index(np.argmax(np.abs(want)), want.shape)])) <= 1e-9


def test_clearance_hypercomplex_and_monotone(rng):
    p = PluriPencil(X2, np.zeros((2, 2)))
    # Fubini-Study normalised |zeta - eta|^2 on the antidiagonal is identically 1
    assert antidiagonal_clearance(p) == pytest.approx(1.0, abs=1e-12)
    q = PluriPencil(crandn(rng, 2, 2), crandn(rng, 2, 2))
    vals = [antidiagonal_clearance(q, g) for g in (1, 10, 100, 10_000)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_sphere_grid_nested():
    assert np.array_equal(sphere_grid(50)[:20], sphere_grid(20))
    assert np.allclose(np.linalg.norm(sphere_grid(100), axis=1), 1)


def test_report_hypercomplex():
    rep = cohomology_report(PluriPencil(X2, np.zeros((2, 2))))
    assert (rep.twists[(0, 0)].h0, rep.twists[(0, 0)].h1) == (4, 0)
    assert rep.vanishing and rep.injective and not rep.odd_n
    assert all(c.nonsingular for c in rep.criteria.values())


def test_criterion_matrices_closed_form(rng):
    X, Y = crandn(rng, 2, 2), crandn(rng, 2, 2)
    p = PluriPencil(X, Y)
    I, Z = np.eye(2), np.zeros((2, 2))
    assert np.allclose(criterion_matrix(p, (-2, 0)), np.block([[Y, X], [I, Z]]))
    assert np.allclose(criterion_matrix(p, (0, -2)), np.block([[Z, -I], [X.conj(), -Y.conj()]]))
    with pytest.raises(ValueError):
        criterion_matrix(p, (1, 1))


def test_singular_X_fails_vanishing():
    rep = cohomology_report(PluriPencil(E11, np.zeros((2, 2))))
    assert not rep.criteria[(-2, 0)].nonsingular
    assert not rep.vanishing


def test_odd_n_warns(rng):
    rep = cohomology_report(PluriPencil(crandn(rng, 3, 3), crandn(rng, 3, 3)))
    assert rep.odd_n and rep.warnings


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.booleans(), st.integers(0, 2**31 - 1))
def test_report_properties(n, singular, seed):
    rng = np.random.default_rng(seed)
    X = crandn(rng, n, n)
    if singular:
        X[:, 0] = 0
    p = PluriPencil(X, crandn(rng, n, n))
    rep = cohomology_report(p)
    assert (rep.twists[(0, 0)].h0, rep.twists[(0, 0)].h1) == (2 * n, 0)
    assert (rep.twists[(-1, -1)].h0, rep.twists[(-1, -1)].h1) == (0, 0)
    for tc in rep.twists.values():
        assert tc.chi == tc.chi_expected
    invertible = numerical_rank(X) == n
    for tw in ((-2, 0), (0, -2)):
        t = rep.twists[tw]
        assert (t.h0 == 0 and t.h1 == 0) == invertible
        assert rep.criteria[tw].nonsingular == invertible
    for tw in ((0, 0), (-2, 0)):
        assert cohomology_f2(p, tw) == (rep.twists[tw].h0, rep.twists[tw].h1)
