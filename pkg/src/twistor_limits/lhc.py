"""l-hypercomplex data: first-order limits of pencils at a hypercomplex base.

For a family of pencils ``(X_t, Y_t)`` with ``Y_0 = 0`` and
``conj(X_0) X_0 = -I`` the limit data is ``P = lim (X_t - X_0)/t`` and
``Q = lim Y_t / t``.  It defines the quadratic matrix polynomial

    At(zeta) = -conj(Q) X0 + (conj(X0) P + conj(P) X0) zeta + conj(X0) Q zeta**2

whose characteristic curve ``det(w I - At(zeta)) = 0`` lives in the tangent
bundle of P^1 and is the limit of the rescaled characteristic curves of the
family.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._validation import check_cmatrix, check_same_shape, max_norm
from .exceptions import NoLimit, NotHypercomplexBase, TruncationUnstable
from .extrapolation import TAU_LIM, extrapolate_to_zero, loglog_slope
from .pluripencil import PluriPencil, assemble_C
from .polymat import MatPoly2, ScalarPoly2, det2, eval2, numerical_rank, spectral_data
from .sheafcoh import RANK_RTOL, p1_multiplication, window

BASE_TOL = 1e-9

# fixed diagnostic grid for the curve-limit residual
_DIAG_ZETAS = np.array([0.5 + 0.5j, -0.8 + 0.3j, 1.2 - 0.6j, 0.1 - 1.1j])
_DIAG_WS = np.array([0.7 - 0.2j, -0.4 + 0.9j, 1.0 + 0.0j])


def base_defect(X0):
    return max_norm(np.conj(X0) @ X0 + np.eye(X0.shape[0]))


@dataclass(frozen=True, eq=False)
class LHCData:
    X0: np.ndarray
    P: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        mats = [check_cmatrix(getattr(self, k), k, square=True) for k in ("X0", "P", "Q")]
        check_same_shape(*mats, names=("X0", "P", "Q"))
        for k, m in zip(("X0", "P", "Q"), mats):
            m.flags.writeable = False
            object.__setattr__(self, k, m)

    @property
    def n(self):
        return self.X0.shape[0]

    def check_base(self, tol=BASE_TOL):
        d = base_defect(self.X0)
        if d > tol:
            raise NotHypercomplexBase(f"|conj(X0) X0 + I| = {d:.3e} exceeds {tol:.0e}")


@dataclass(frozen=True, eq=False)
class ATilde:
    """``c0 + c1 zeta + c2 zeta**2``; ``base`` is the hypercomplex ``X0`` if known."""

    c0: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    base: np.ndarray | None = None

    def __post_init__(self):
        for k in ("c0", "c1", "c2"):
            object.__setattr__(self, k, check_cmatrix(getattr(self, k), k, square=True))
        check_same_shape(self.c0, self.c1, self.c2, names=("c0", "c1", "c2"))
        if self.base is not None:
            object.__setattr__(self, "base", check_cmatrix(self.base, "base", square=True))

    @property
    def n(self):
        return self.c0.shape[0]

    @property
    def coeffs(self):
        return [self.c0, self.c1, self.c2]

    def __call__(self, zeta):
        return self.c0 + self.c1 * zeta + self.c2 * (zeta * zeta)


def a_tilde(d: LHCData) -> ATilde:
    d.check_base()
    X0, P, Q = d.X0, d.P, d.Q
    X0b = X0.conj()
    return ATilde(-Q.conj() @ X0, X0b @ P + P.conj() @ X0, X0b @ Q, base=X0)


def char_poly_l(d: LHCData) -> ScalarPoly2:
    """``det(w I - At(zeta))`` as a polynomial in ``(zeta, w)``."""
    a = a_tilde(d)
    n = d.n
    pencil = MatPoly2.from_terms(
        {(0, 0): -a.c0, (1, 0): -a.c1, (2, 0): -a.c2, (0, 1): np.eye(n)},
        var_names=("zeta", "w"),
    )
    return det2(pencil, bound=(2 * n, n))


def reality_residual(a: ATilde, samples=16) -> float:
    """Deviation from ``At(-1/conj(z)) = -B^-1 conj(At(z)) B / conj(z)**2``.

    ``B`` is the base ``X0`` carried by ``a`` (identity when absent); it is the
    basis change the real structure induces between the fibres over ``z`` and
    ``-1/conj(z)``.  Sampled on circles of radius 1, 1/2 and 2.
    """
    n = a.n
    B = np.eye(n) if a.base is None else a.base
    Binv = np.linalg.inv(B)
    angles = 2 * np.pi * (np.arange(samples) + 0.25) / samples
    worst = 0.0
    for radius in (1.0, 0.5, 2.0):
        for z in radius * np.exp(1j * angles):
            zb = np.conj(z)
            lhs = a(-1.0 / zb)
            rhs = -Binv @ np.conj(a(z)) @ B / (zb * zb)
            worst = max(worst, max_norm(lhs - rhs))
    return worst


def sigma_exchange_residual(d: LHCData, zetas) -> float:
    """Max distance between the w-roots over ``sigma(z)`` and the images of those over ``z``.

    The real structure on the tangent bundle maps ``w`` to ``-conj(w)/conj(z)**2``.
    """
    a = a_tilde(d)
    worst = 0.0
    for z in np.atleast_1d(zetas):
        roots = np.linalg.eigvals(a(z))
        zb = np.conj(z)
        image = -np.conj(roots) / (zb * zb)
        partner = np.linalg.eigvals(a(-1.0 / zb))
        # match as multisets: every image root has a partner root
        dist = np.abs(image[:, None] - partner[None, :])
        r, c = linear_sum_assignment(dist)
        worst = max(worst, float(dist[r, c].max()) / max(1.0, float(np.abs(partner).max())))
    return worst


def support_degrees(d: LHCData, zeta=0.3141 + 0.2718j, tol=1e-6):
    """``(w-degree, reduced w-degree)`` of the characteristic curve.

    The reduced degree counts distinct w-roots over a fixed generic ``zeta``.
    """
    roots = np.sort_complex(np.linalg.eigvals(a_tilde(d)(zeta)))
    distinct = 1
    for r0, r1 in zip(roots, roots[1:]):
        distinct += abs(r1 - r0) > tol * max(1.0, abs(r0))
    return d.n, int(distinct)


# -- families ------------------------------------------------------------------


class FamilySampler:
    """Deterministic map ``t -> (X_t, Y_t)``.

    Wraps a callable, or a table of samples via :meth:`from_table`.
    """

    def __init__(self, func, interval=(-1.0, 1.0)):
        self._func = func
        self.interval = tuple(interval)

    def __call__(self, t):
        lo, hi = self.interval
        if not lo <= t <= hi:
            raise ValueError(f"t = {t} is outside the sampler interval {self.interval}")
        X, Y = self._func(t)
        return check_cmatrix(X, "X_t", square=True), check_cmatrix(Y, "Y_t", square=True)

    @classmethod
    def from_table(cls, rows):
        """``rows`` is an iterable of ``(t, X_t, Y_t)``; lookups must hit a listed t."""
        table = {}
        for t, X, Y in rows:
            t = float(t)
            if t in table:
                raise ValueError(f"duplicate sample at t = {t}")
            table[t] = (np.array(X, dtype=np.complex128), np.array(Y, dtype=np.complex128))
        if not table:
            raise ValueError("empty family")

        def lookup(t):
            try:
                return table[float(t)]
            except KeyError:
                raise ValueError(f"no sample at t = {t}") from None

        sampler = cls(lookup, (min(table), max(table)))
        sampler.ts = sorted(table)
        return sampler


@dataclass(frozen=True)
class LimitDiagnostics:
    steps: tuple
    residuals: tuple  # r(t) for each step
    residual_slope: float
    quotient_order: float
    spread_P: float
    spread_Q: float

    @property
    def linear(self):
        """Residual decays linearly in t (or vanishes identically)."""
        if max(self.residuals) <= 1e-12:
            return True
        return abs(self.residual_slope - 1.0) <= 0.2


def curve_limit_residual(X, Y, t, a: ATilde, zetas=_DIAG_ZETAS, ws=_DIAG_WS):
    """``max |chi_t(z, z + t w)/t**n - (-1)**n det(w I - At(z))|`` over the grid."""
    p = PluriPencil(X, Y)
    C = assemble_C(p)
    n = p.n
    worst = 0.0
    for z in zetas:
        At = a(z)
        for w in ws:
            lhs = np.linalg.det(eval2(C, z, z + t * w)) / t**n
            rhs = (-1) ** n * np.linalg.det(w * np.eye(n) - At)
            worst = max(worst, abs(lhs - rhs))
    return worst


def extract_limit(f, steps, tau=TAU_LIM):
    """Estimate ``(P, Q)`` of a family by Richardson extrapolation.

    ``steps`` are positive and strictly decreasing (at least four).  Returns the
    :class:`LHCData` and :class:`LimitDiagnostics`.
    """
    steps = [float(t) for t in steps]
    if len(steps) < 4:
        raise ValueError("extract_limit needs at least four steps")
    if any(t <= 0 for t in steps) or any(b >= a for a, b in zip(steps, steps[1:])):
        raise ValueError("steps must be positive and strictly decreasing")
    X0, Y0 = f(0.0)
    if max_norm(Y0) > BASE_TOL or base_defect(X0) > BASE_TOL:
        raise NotHypercomplexBase("family at t = 0 is not hypercomplex")
    samples = [f(t) for t in steps]
    dq_P = [(X - X0) / t for t, (X, _) in zip(steps, samples)]
    dq_Q = [Y / t for t, (_, Y) in zip(steps, samples)]
    try:
        ext_P = extrapolate_to_zero(steps, dq_P, tau=tau)
        ext_Q = extrapolate_to_zero(steps, dq_Q, tau=tau)
    except NoLimit as exc:
        raise NoLimit(f"difference quotients do not converge: {exc}") from None
    data = LHCData(X0, ext_P.value, ext_Q.value)
    a = a_tilde(data)
    residuals = tuple(curve_limit_residual(X, Y, t, a) for t, (X, Y) in zip(steps, samples))
    q_err = [max(max_norm(p - data.P), max_norm(q - data.Q)) for p, q in zip(dq_P, dq_Q)]
    diag = LimitDiagnostics(
        tuple(steps),
        residuals,
        loglog_slope(steps, residuals),
        loglog_slope(steps, q_err),
        ext_P.spread,
        ext_Q.spread,
    )
    return data, diag


# -- cohomology on the tangent bundle --------------------------------------------


def _graded_cohomology(a: ATilde, m, cutoff):
    """Truncated ``(h0, h1)`` with target fibre degrees ``0..cutoff``."""
    n = a.n
    result = []
    ranks = []
    for q in (0, 1):
        src_deg = [m - 1 - 2 * k for k in range(cutoff)]
        tgt_deg = [m + 1 - 2 * k for k in range(cutoff + 1)]
        src_dims = [len(window(c, q)) * n for c in src_deg]
        tgt_dims = [len(window(c, q)) * n for c in tgt_deg]
        so = np.cumsum([0] + src_dims)
        to = np.cumsum([0] + tgt_dims)
        big = np.zeros((to[-1], so[-1]), dtype=np.complex128)
        for k, c in enumerate(src_deg):
            # At: piece k -> piece k
            big[to[k]:to[k + 1], so[k]:so[k + 1]] = p1_multiplication(a.coeffs, c, q)
            # -w: piece k -> piece k+1, the identity on the same line bundle
            big[to[k + 1]:to[k + 2], so[k]:so[k + 1]] = -np.eye(src_dims[k])
        rank = numerical_rank(big, RANK_RTOL) if big.size else 0
        result.append((to[-1], so[-1]))
        ranks.append(rank)
    (t0, s0), (t1, s1) = result
    r0, r1 = ranks
    return int((t0 - r0) + (s1 - r1)), int(t1 - r1)


def pushforward_cohomology(d: LHCData, m: int, cutoff=None):
    """``(h0, h1)`` of ``F(m)`` for ``F = coker(At - w I)`` on the tangent bundle.

    Computed on fibre-degree truncations at ``cutoff`` and ``2 * cutoff``;
    :class:`TruncationUnstable` if they disagree.
    """
    if abs(m) > 4:
        raise ValueError("twist must satisfy |m| <= 4")
    a = a_tilde(d)
    # fibre rescaling w -> s w is a grading-preserving automorphism of the
    # tangent bundle; shrinking At keeps the truncated matrices well conditioned
    s = 0.25 / max(1.0, sum(np.linalg.norm(c, 2) for c in a.coeffs))
    a = ATilde(s * a.c0, s * a.c1, s * a.c2, base=a.base)
    k0 = cutoff if cutoff is not None else max(4, abs(m) + 2)
    first = _graded_cohomology(a, m, k0)
    second = _graded_cohomology(a, m, 2 * k0)
    if first != second:
        raise TruncationUnstable(f"cutoffs {k0} and {2 * k0} give {first} and {second}")
    return first


def pushforward_closed_form(n, m):
    return n * max(m + 2, 0), n * max(-m - 2, 0)


# -- reconstruction of the endomorphism ------------------------------------------


@dataclass(frozen=True, eq=False)
class Reconstruction:
    zeta0: complex
    eigenvalues: list
    A_rec: np.ndarray
    A_direct: np.ndarray
    residual: float
    anticommutator: float


def model_structures(n):
    """``J`` (``+i`` on the first summand) on the complexified model ``C^n + C^n``."""
    return np.block([[1j * np.eye(n), np.zeros((n, n))], [np.zeros((n, n)), -1j * np.eye(n)]])


def model_J_prime(X0):
    """Real complex structure anticommuting with ``J`` that swaps the summands."""
    n = X0.shape[0]
    z = np.zeros((n, n))
    return np.block([[z, X0.conj()], [X0, z]])


def direct_endomorphism(d: LHCData, zeta0):
    """Endomorphism built from ``L(zeta) = P + zeta Q`` at ``zeta0``.

    Off-diagonal blocks ``zeta0 conj(X0) L(zeta0) conj(X0) + conj(Q) - zeta0 conj(P)``
    and its conjugate; it anticommutes with ``J`` by construction.
    """
    X0b = d.X0.conj()
    L = d.P + zeta0 * d.Q
    upper = zeta0 * X0b @ L @ X0b + d.Q.conj() - zeta0 * d.P.conj()
    z = np.zeros_like(upper)
    return np.block([[z, upper], [upper.conj(), z]])


def reconstruct_A(d: LHCData, zeta0, tol=1e-9) -> Reconstruction:
    """Rebuild ``A(zeta0)`` as ``sum_i w_i pi_i(J' v)`` and compare with the direct form.

    ``pi_i`` is the spectral projector of ``At(zeta0)`` on the first summand and
    its conjugate on the second; ``w_i`` acts through ``J`` (so as ``conj(w_i)``
    on the second summand).
    """
    zeta0 = complex(zeta0)
    a = a_tilde(d)
    n = d.n
    A0 = a(zeta0)
    # the zero endomorphism has no simple spectrum but reconstructs trivially
    spec = [] if max_norm(A0) <= tol else spectral_data(A0, tol)
    Jp = model_J_prime(d.X0)
    A_rec = np.zeros((2 * n, 2 * n), dtype=np.complex128)
    z = np.zeros((n, n))
    for w, proj in spec:
        pi = np.block([[proj, z], [z, proj.conj()]])
        scal = np.block([[w * np.eye(n), z], [z, np.conj(w) * np.eye(n)]])
        A_rec += scal @ pi @ Jp
    A_dir = direct_endomorphism(d, zeta0)
    J = model_structures(n)
    return Reconstruction(
        zeta0,
        [w for w, _ in spec] or [0j] * n,
        A_rec,
        A_dir,
        max_norm(A_rec - A_dir),
        max_norm(A_dir @ J + J @ A_dir),
    )


# -- random data -----------------------------------------------------------------


def random_hypercomplex_x0(n, rng, spread=0.3):
    """``g J conj(g)^-1`` with ``J`` the standard model.

    ``g = U diag(s) V`` with Haar-like unitary factors and singular values in
    ``[1 - spread, 1 + spread]``, so the result stays well conditioned.
    """
    if n % 2:
        raise ValueError("hypercomplex bases need even n")
    J = np.kron(np.eye(n // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    U, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    V, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    g = U @ np.diag(rng.uniform(1 - spread, 1 + spread, n)) @ V
    return g @ J @ np.linalg.inv(g.conj())


def random_lhc(n, rng, scale=1.0):
    X0 = random_hypercomplex_x0(n, rng)
    P = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    Q = scale * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return LHCData(X0, P, Q)
