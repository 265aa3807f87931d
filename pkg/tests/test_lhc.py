import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from twistor_limits.exceptions import NoLimit, NonSimpleSpectrum, NotHypercomplexBase
from twistor_limits.extrapolation import halving_steps
from twistor_limits.lhc import (
    ATilde,
    FamilySampler,
    LHCData,
    a_tilde,
    char_poly_l,
    extract_limit,
    pushforward_closed_form,
    pushforward_cohomology,
    random_hypercomplex_x0,
    random_lhc,
    reality_residual,
    reconstruct_A,
    sigma_exchange_residual,
    support_degrees,
)

X0 = np.array([[0.0, 1.0], [-1.0, 0.0]])
I2, Z2 = np.eye(2), np.zeros((2, 2))


def test_a_tilde_examples():
    a = a_tilde(LHCData(X0, Z2, Z2))
    assert all(np.all(c == 0) for c in a.coeffs)
    a = a_tilde(LHCData(X0, I2, Z2))
    assert np.allclose(a.c1, 2 * X0) and np.allclose(a.c0, 0) and np.allclose(a.c2, 0)
    a = a_tilde(LHCData(X0, Z2, I2))
    assert np.allclose(a.c0, -X0) and np.allclose(a.c1, 0) and np.allclose(a.c2, X0)


def test_a_tilde_rejects_bad_base():
    with pytest.raises(NotHypercomplexBase):
        a_tilde(LHCData(I2, Z2, Z2))


def test_char_poly_l_examples():
    # coefficient grid is indexed [zeta power, w power]
    assert np.allclose(char_poly_l(LHCData(X0, Z2, Z2)).padded((0, 2)).coeffs, [[0, 0, 1]])
    c = char_poly_l(LHCData(X0, I2, Z2)).padded((2, 2)).coeffs
    want = np.zeros((3, 3))
    want[0, 2], want[2, 0] = 1, 4
    assert np.allclose(c, want)
    c = char_poly_l(LHCData(X0, Z2, I2)).padded((4, 2)).coeffs
    want = np.zeros((5, 3))
    want[0, 2], want[0, 0], want[2, 0], want[4, 0] = 1, 1, -2, 1
    assert np.allclose(c, want)


def test_char_poly_l_is_monic(rng):
    d = random_lhc(4, rng)
    c = char_poly_l(d).coeffs
    assert c.shape[1] == 5 and c.shape[0] <= 9
    assert abs(c[0, 4] - 1) < 1e-10 and np.max(np.abs(c[1:, 4])) < 1e-10


def test_reality_residual_examples():
    assert reality_residual(a_tilde(LHCData(X0, I2, Z2))) <= 1e-10
    assert reality_residual(ATilde(Z2, Z2, Z2)) == 0
    bad = ATilde(I2, Z2, Z2)
    # at zeta = 1 the residual is |I + I| = 2; other radii make it larger
    assert reality_residual(bad, samples=4) >= 2


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 4, 6]), st.integers(0, 2**31 - 1))
def test_reality_and_sigma_exchange(n, seed):
    rng = np.random.default_rng(seed)
    d = random_lhc(n, rng)
    assert reality_residual(a_tilde(d)) <= 1e-10
    assert sigma_exchange_residual(d, [0.3 + 0.4j, -1.2 + 0.1j, 2.0j]) <= 1e-8


def test_random_base_is_hypercomplex(rng):
    X = random_hypercomplex_x0(4, rng)
    assert np.max(np.abs(X.conj() @ X + np.eye(4))) < 1e-12
    with pytest.raises(ValueError):
        random_hypercomplex_x0(3, rng)


def test_extract_limit_closed_form():
    f = FamilySampler(lambda t: (X0 + t * I2, t * X0))
    d, diag = extract_limit(f, halving_steps(3, 10))
    assert np.max(np.abs(d.P - I2)) <= 1e-8 and np.max(np.abs(d.Q - X0)) <= 1e-8
    assert abs(diag.residual_slope - 1.0) <= 0.2 and diag.linear
    assert all(b < a for a, b in zip(diag.residuals, diag.residuals[1:]))


def test_extract_limit_constant_family():
    f = FamilySampler(lambda t: (X0, Z2))
    d, diag = extract_limit(f, halving_steps(3, 10))
    assert np.all(d.P == 0) and np.all(d.Q == 0)
    assert max(diag.residuals) <= 1e-12 and diag.linear


def test_extract_limit_sqrt_family():
    f = FamilySampler(lambda t: (X0 + np.sqrt(abs(t)) * I2, Z2))
    with pytest.raises(NoLimit):
        extract_limit(f, halving_steps(3, 12))


def test_extract_limit_bad_inputs():
    with pytest.raises(NotHypercomplexBase):
        extract_limit(FamilySampler(lambda t: (I2, Z2)), halving_steps(3, 8))
    f = FamilySampler(lambda t: (X0, Z2))
    with pytest.raises(ValueError):
        extract_limit(f, [0.1, 0.2, 0.05, 0.01])
    with pytest.raises(ValueError):
        extract_limit(f, [0.1, 0.05])


def test_sampler_table_and_determinism():
    rows = [(t, X0 + t * I2, t * X0) for t in [0.0] + halving_steps(3, 8)]
    f = FamilySampler.from_table(rows)
    assert np.array_equal(f(0.125)[0], f(0.125)[0])
    with pytest.raises(ValueError):
        f(0.3)
    with pytest.raises(ValueError):
        FamilySampler.from_table(rows + rows[:1])
    d, _ = extract_limit(f, sorted(f.ts, reverse=True)[:-1])
    assert np.max(np.abs(d.P - I2)) < 1e-8


@settings(max_examples=10, deadline=None)
@given(st.sampled_from([2, 4]), st.integers(0, 2**31 - 1))
def test_pushforward_closed_form(n, seed):
    d = random_lhc(n, np.random.default_rng(seed))
    for m in range(-4, 5):
        assert pushforward_cohomology(d, m) == pushforward_closed_form(n, m)


def test_pushforward_examples(rng):
    d = random_lhc(2, rng)
    assert pushforward_cohomology(d, 0) == (4, 0)
    assert pushforward_cohomology(d, -2) == (0, 0)
    assert pushforward_cohomology(d, -1) == (2, 0)
    with pytest.raises(ValueError):
        pushforward_cohomology(d, 5)


def test_reconstruct_examples():
    r = reconstruct_A(LHCData(X0, Z2, Z2), 0.3)
    assert r.residual == 0 and np.all(r.A_rec == 0)
    # P chosen so that At(0) = conj(X0) P + ... reduces to diag(1, 2) at zeta0 = 0 via Q
    Q = -np.linalg.solve(X0.T, np.diag([1.0, 2.0]).T).T  # -conj(Q) X0 = diag(1, 2)
    d = LHCData(X0, Z2, Q)
    assert np.allclose(a_tilde(d)(0), np.diag([1.0, 2.0]))
    assert reconstruct_A(d, 0).residual <= 1e-9


def test_reconstruct_jordan_block():
    d = LHCData(X0, Z2, np.array([[-1.0, 0.0], [0.0, 0.0]]))
    assert np.allclose(a_tilde(d)(0), [[0, 1], [0, 0]])
    with pytest.raises(NonSimpleSpectrum):
        reconstruct_A(d, 0)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([2, 4]), st.integers(0, 2**31 - 1))
def test_reconstruct_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    d = random_lhc(n, rng)
    z0 = complex(*rng.standard_normal(2))
    r = reconstruct_A(d, z0)
    assert r.residual <= 1e-9 * max(1, np.max(np.abs(r.A_direct)))
    assert r.anticommutator == 0


def test_support_degrees():
    assert support_degrees(LHCData(X0, I2, Z2)) == (2, 2)
    assert support_degrees(LHCData(X0, Z2, Z2)) == (2, 1)


def test_pushforward_large_data_stays_stable():
    d = random_lhc(4, np.random.default_rng(7), scale=25.0)
    for m in (-4, 0, 4):
        assert pushforward_cohomology(d, m) == pushforward_closed_form(4, m)
