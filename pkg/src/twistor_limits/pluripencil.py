"""Pluricomplex structures in matrix normal form.

A pencil is a pair ``(X, Y)`` of complex n x n matrices.  It defines the
2n x 2n presentation matrix

    M(zeta, eta) = [[X + zeta*Y, -I], [zeta*I, eta*conj(X) - conj(Y)]]

of a sheaf ``F`` on P^1 x P^1 (the characteristic sheaf), whose support is the
characteristic curve ``det C(zeta, eta) = 0`` with

    C(zeta, eta) = (eta*conj(X) - conj(Y)) (X + zeta*Y) + zeta*I.

The pencil is hypercomplex iff ``Y = 0`` and ``conj(X) X = -I``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from ._validation import check_cmatrix, check_same_shape, max_norm
from .exceptions import DegeneratePencil, SingularGauge
from .polymat import MatPoly2, ScalarPoly2, det2, numerical_rank
from .sheafcoh import (
    RANK_RTOL,
    BihomMatrix,
    cokernel_cohomology,
    induced_map,
    product_basis,
)

log = logging.getLogger(__name__)

GAUGE_COND_MAX = 1e12
#: relative size below which the characteristic polynomial counts as identically zero
ZERO_POLY_RTOL = 1e-10
TWISTS = ((0, 0), (-2, 0), (0, -2), (-1, -1))


@dataclass(frozen=True, eq=False)
class PluriPencil:
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = check_cmatrix(self.X, "X", square=True)
        Y = check_cmatrix(self.Y, "Y", square=True)
        check_same_shape(X, Y, names=("X", "Y"))
        X.flags.writeable = False
        Y.flags.writeable = False
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self):
        return self.X.shape[0]

    @classmethod
    def hypercomplex_model(cls, n):
        """``X`` block-diagonal in ``[[0, 1], [-1, 0]]``, ``Y = 0``; ``n`` must be even."""
        if n <= 0 or n % 2:
            raise ValueError("hypercomplex pencils exist only for even n")
        X = np.kron(np.eye(n // 2), np.array([[0.0, 1.0], [-1.0, 0.0]]))
        return cls(X, np.zeros((n, n)))


def assemble_M(p: PluriPencil) -> MatPoly2:
    """Affine presentation matrix as a polynomial in ``(zeta, eta)``."""
    n = p.n
    eye, zero = np.eye(n), np.zeros((n, n))
    Xb, Yb = p.X.conj(), p.Y.conj()
    return MatPoly2.from_terms(
        {
            (0, 0): np.block([[p.X, -eye], [zero, -Yb]]),
            (1, 0): np.block([[p.Y, zero], [eye, zero]]),
            (0, 1): np.block([[zero, zero], [zero, Xb]]),
        }
    )


def assemble_M_h(p: PluriPencil) -> BihomMatrix:
    """Bihomogeneous presentation ``O(-1,0)^n + O(0,-1)^n -> O^2n``.

    Exponent keys are ``(zeta0, zeta1, eta0, eta1)``; affine ``zeta = zeta1/zeta0``.
    """
    n = p.n
    eye, zero = np.eye(n), np.zeros((n, n))
    Xb, Yb = p.X.conj(), p.Y.conj()
    terms = {
        (1, 0, 0, 0): np.block([[p.X, zero], [zero, zero]]),
        (0, 1, 0, 0): np.block([[p.Y, zero], [eye, zero]]),
        (0, 0, 1, 0): np.block([[zero, -eye], [zero, -Yb]]),
        (0, 0, 0, 1): np.block([[zero, zero], [zero, Xb]]),
    }
    src = [(-1, 0)] * n + [(0, -1)] * n
    tgt = [(0, 0)] * (2 * n)
    return BihomMatrix(terms, src, tgt)


def assemble_C(p: PluriPencil) -> MatPoly2:
    """``C(zeta, eta) = (eta*conj(X) - conj(Y))(X + zeta*Y) + zeta*I``."""
    n = p.n
    Xb, Yb = p.X.conj(), p.Y.conj()
    return MatPoly2.from_terms(
        {
            (0, 0): -Yb @ p.X,
            (1, 0): np.eye(n) - Yb @ p.Y,
            (0, 1): Xb @ p.X,
            (1, 1): Xb @ p.Y,
        }
    )


def assemble_C_h(p: PluriPencil) -> BihomMatrix:
    """Bihomogeneous n x n presentation ``O(-1,0)^n -> O(0,1)^n``."""
    n = p.n
    Xb, Yb = p.X.conj(), p.Y.conj()
    terms = {
        (1, 0, 0, 1): Xb @ p.X,
        (0, 1, 0, 1): Xb @ p.Y,
        (1, 0, 1, 0): -Yb @ p.X,
        (0, 1, 1, 0): np.eye(n) - Yb @ p.Y,
    }
    return BihomMatrix(terms, [(-1, 0)] * n, [(0, 1)] * n)


def gauge_act(g, p: PluriPencil) -> PluriPencil:
    """Action ``(X, Y) -> (g X conj(g)^-1, g Y conj(g)^-1)`` of ``GL(n, C)``."""
    g = check_cmatrix(g, "g", square=True)
    if g.shape != p.X.shape:
        raise ValueError(f"gauge has shape {g.shape}, pencil has n = {p.n}")
    if not np.isfinite(np.linalg.cond(g)) or np.linalg.cond(g) >= GAUGE_COND_MAX:
        raise SingularGauge("gauge matrix is singular or too ill-conditioned")
    gbinv = np.linalg.inv(g.conj())
    return PluriPencil(g @ p.X @ gbinv, g @ p.Y @ gbinv)


def _poly_scale(p: PluriPencil):
    return max(1.0, max_norm(p.X), max_norm(p.Y)) ** (2 * p.n)


def char_poly(p: PluriPencil) -> ScalarPoly2:
    """``det C(zeta, eta)``, bidegree at most ``(n, n)``; may be identically zero."""
    poly = det2(assemble_C(p), bound=(p.n, p.n))
    if poly.is_zero(ZERO_POLY_RTOL * _poly_scale(p)):
        return ScalarPoly2(np.zeros((1, 1)))
    return poly


def is_degenerate(p: PluriPencil) -> bool:
    return char_poly(p).is_zero()


def is_hypercomplex(p: PluriPencil, tol=1e-9) -> bool:
    """True iff ``|Y| <= tol`` and ``|conj(X) X + I| <= tol`` in max-norm."""
    return max_norm(p.Y) <= tol and max_norm(p.X.conj() @ p.X + np.eye(p.n)) <= tol


def sphere_grid(size):
    """First ``size`` points of a fixed nested sequence on the Riemann sphere.

    Points are unit-norm homogeneous pairs ``(z0, z1)``; the sequence starts with
    ``zeta = 1``, ``zeta = 0`` and ``zeta = infinity`` and continues with an
    unscrambled Halton sequence, so a larger grid always contains a smaller one.
    """
    if size <= 0:
        raise ValueError("grid size must be positive")
    s = np.sqrt(0.5)
    fixed = np.array([[s, s], [1.0, 0.0], [0.0, 1.0]], dtype=np.complex128)
    pts = fixed[:size]
    extra = size - len(pts)
    if extra > 0:
        uv = qmc.Halton(d=2, scramble=False).random(extra)
        theta = np.arccos(1.0 - 2.0 * uv[:, 0])
        phi = 2.0 * np.pi * uv[:, 1]
        more = np.stack([np.cos(theta / 2), np.sin(theta / 2) * np.exp(1j * phi)], axis=1)
        pts = np.concatenate([pts, more])
    return pts


def eval_homogeneous(poly: ScalarPoly2, bidegree, z0, z1, e0, e1):
    """Bihomogenisation of ``poly`` at ``([z0:z1], [e0:e1])``; broadcasts over arrays."""
    d1, d2 = bidegree
    c = poly.padded(bidegree).coeffs
    z0, z1, e0, e1 = (np.asarray(v, dtype=np.complex128)[..., None] for v in (z0, z1, e0, e1))
    i = np.arange(d1 + 1)
    j = np.arange(d2 + 1)
    zpow = z0 ** (d1 - i) * z1**i
    epow = e0 ** (d2 - j) * e1**j
    out = np.einsum("...i,ij,...j->...", zpow, c, epow)
    return complex(out) if out.ndim == 0 else out


def antidiagonal_clearance(p: PluriPencil, grid=2000) -> float:
    """Minimum of the Fubini-Study normalised ``|det C|`` over the antidiagonal.

    The antidiagonal point over ``[z0 : z1]`` is ``[conj(z1) : -conj(z0)]``; both
    pairs are unit-norm so the value does not depend on the chart.
    """
    poly = char_poly(p)
    if poly.is_zero():
        raise DegeneratePencil("characteristic polynomial vanishes identically")
    pts = sphere_grid(grid)
    z0, z1 = pts[:, 0], pts[:, 1]
    vals = eval_homogeneous(poly, (p.n, p.n), z0, z1, z1.conj(), -z0.conj())
    return float(np.min(np.abs(vals)))


@dataclass(frozen=True)
class TwistCohomology:
    h0: int
    h1: int
    chi: int
    chi_expected: int


@dataclass(frozen=True)
class Criterion:
    matrix: np.ndarray
    det: complex
    cond: float
    rank: int

    @property
    def nonsingular(self):
        return self.rank == self.matrix.shape[0]


@dataclass(frozen=True)
class CohomReport:
    n: int
    twists: dict
    criteria: dict
    injective: bool
    odd_n: bool
    warnings: list = field(default_factory=list)

    @property
    def vanishing(self):
        """All three vanishing twists have zero cohomology."""
        return all(
            self.twists[t].h0 == 0 and self.twists[t].h1 == 0
            for t in ((-2, 0), (0, -2), (-1, -1))
        )


def criterion_matrix(p: PluriPencil, twist):
    """H^1-level criterion matrix of ``F(twist)`` for ``twist`` in {(-2,0), (0,-2)}.

    Columns run over the H^1 window (exponent -1 before -2 of the twisted
    variable's first coordinate), then over the contributing summands; rows over
    the 2n target summands.
    """
    if twist not in ((-2, 0), (0, -2)):
        raise ValueError("criterion matrices exist for (-2, 0) and (0, -2)")
    mat = assemble_M_h(p).twisted(*twist)
    full = induced_map(mat, 1)
    cols = []
    for summand, (c, d) in enumerate(mat.src):
        for k, (q1, i, q2, j) in enumerate(product_basis(c, d, 1)):
            cols.append((-(i + j), summand, k))
    offsets = np.cumsum([0] + [len(product_basis(c, d, 1)) for c, d in mat.src])
    order = sorted(cols)
    idx = [offsets[s] + k for _, s, k in order]
    return full[:, idx]


def cohomology_report(p: PluriPencil) -> CohomReport:
    """Cohomology of the twisted characteristic sheaf from the 2n x 2n presentation."""
    if is_degenerate(p):
        raise DegeneratePencil("presentation is not injective: det M vanishes identically")
    warnings = []
    if p.n % 2:
        warnings.append("odd n: no genuine pluricomplex structure has odd n")
        log.warning("cohomology report requested for odd n = %d", p.n)
    base = assemble_M_h(p)
    twists = {}
    for a, b in TWISTS:
        cc = cokernel_cohomology(base.twisted(a, b))
        if cc.h2:
            raise ArithmeticError(f"H^2 of a curve-supported sheaf came out {cc.h2} at twist {(a, b)}")
        twists[(a, b)] = TwistCohomology(cc.h0, cc.h1, cc.chi, cc.chi_expected)
    criteria = {}
    for t in ((-2, 0), (0, -2)):
        m = criterion_matrix(p, t)
        criteria[t] = Criterion(m, complex(np.linalg.det(m)), float(np.linalg.cond(m)),
                                numerical_rank(m, RANK_RTOL))
    return CohomReport(p.n, twists, criteria, True, bool(p.n % 2), warnings)


def cohomology_f2(p: PluriPencil, twist):
    """``(h0, h1)`` of ``F(twist)`` from the n x n presentation via ``C``."""
    if is_degenerate(p):
        raise DegeneratePencil("presentation is not injective: det C vanishes identically")
    cc = cokernel_cohomology(assemble_C_h(p).twisted(*twist))
    return cc.h0, cc.h1
