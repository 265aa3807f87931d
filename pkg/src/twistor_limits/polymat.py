"""Complex matrices and matrix-valued polynomials in two variables.

A :class:`MatPoly2` stores ``coeffs[i, j]`` as the matrix multiplying
``u**i * v**j``; the array therefore has shape ``(d1 + 1, d2 + 1, rows, cols)``.
:class:`ScalarPoly2` is the 1x1 case with the trailing axes dropped.

Determinants of matrix polynomials are recovered by evaluating on a tensor grid
of roots of unity and inverting with a 2-d FFT, which is exact up to rounding
when the grid has one more node per axis than the degree bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_cmatrix, max_norm
from .exceptions import NonSimpleSpectrum, NonSquare

#: relative threshold below which interpolated coefficients are flushed to zero
CHOP_REL = 1e-10
#: eigenvalue gap threshold, as a multiple of the caller's tolerance
GAP_FACTOR = 1e3


def _frozen(a):
    a = np.array(a, dtype=np.complex128)
    a.flags.writeable = False
    return a


def _trim(c, axes=(0, 1)):
    """Drop trailing all-zero coefficient slabs along the two degree axes."""
    for ax in axes:
        other = tuple(i for i in range(c.ndim) if i != ax)
        nz = np.nonzero(np.any(c != 0, axis=other))[0]
        last = int(nz[-1]) + 1 if nz.size else 1
        c = np.take(c, np.arange(last), axis=ax)
    return c


@dataclass(frozen=True, eq=False)
class MatPoly2:
    """Matrix polynomial ``sum_ij coeffs[i, j] * u**i * v**j``."""

    coeffs: np.ndarray
    var_names: tuple = ("zeta", "eta")

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 4:
            raise ValueError(f"MatPoly2 coefficients need 4 axes, got shape {c.shape}")
        if 0 in c.shape:
            raise ValueError("MatPoly2 needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("MatPoly2 has non-finite coefficients")
        object.__setattr__(self, "coeffs", _frozen(c))
        object.__setattr__(self, "var_names", tuple(self.var_names))

    @classmethod
    def from_terms(cls, terms, shape=None, var_names=("zeta", "eta")):
        """Build from ``{(i, j): matrix}``."""
        mats = {k: check_cmatrix(v, f"coefficient {k}") for k, v in terms.items()}
        if shape is None:
            shapes = {m.shape for m in mats.values()}
            if len(shapes) != 1:
                raise ValueError(f"coefficient matrices disagree in shape: {sorted(shapes)}")
            shape = shapes.pop()
        d1 = max(i for i, _ in mats) if mats else 0
        d2 = max(j for _, j in mats) if mats else 0
        c = np.zeros((d1 + 1, d2 + 1) + tuple(shape), dtype=np.complex128)
        for (i, j), m in mats.items():
            if i < 0 or j < 0:
                raise ValueError("negative exponents are not polynomial")
            if m.shape != tuple(shape):
                raise ValueError(f"coefficient {(i, j)} has shape {m.shape}, expected {shape}")
            c[i, j] = m
        return cls(c, var_names)

    @property
    def shape(self):
        return self.coeffs.shape[2:]

    @property
    def bidegree(self):
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def __call__(self, u, v):
        return eval2(self, u, v)


@dataclass(frozen=True, eq=False)
class ScalarPoly2:
    """Scalar polynomial ``sum_ij coeffs[i, j] * u**i * v**j``."""

    coeffs: np.ndarray
    var_names: tuple = ("zeta", "eta")

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim == 0:
            c = c.reshape(1, 1)
        if c.ndim != 2 or 0 in c.shape:
            raise ValueError(f"ScalarPoly2 coefficients need a non-empty 2-d grid, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("ScalarPoly2 has non-finite coefficients")
        object.__setattr__(self, "coeffs", _frozen(c))
        object.__setattr__(self, "var_names", tuple(self.var_names))

    @property
    def bidegree(self):
        return self.coeffs.shape[0] - 1, self.coeffs.shape[1] - 1

    def __call__(self, u, v):
        u = np.asarray(u, dtype=np.complex128)
        v = np.asarray(v, dtype=np.complex128)
        d1, d2 = self.bidegree
        pu = u[..., None] ** np.arange(d1 + 1)
        pv = v[..., None] ** np.arange(d2 + 1)
        out = np.einsum("...i,...j,ij->...", pu, pv, self.coeffs)
        return complex(out) if out.ndim == 0 else out

    def is_zero(self, atol=0.0):
        return max_norm(self.coeffs) <= atol

    def trimmed(self):
        return ScalarPoly2(_trim(self.coeffs), self.var_names)

    def padded(self, bidegree):
        d1, d2 = bidegree
        c = np.zeros((d1 + 1, d2 + 1), dtype=np.complex128)
        s1, s2 = self.coeffs.shape
        if s1 > d1 + 1 or s2 > d2 + 1:
            raise ValueError(f"cannot pad bidegree {self.bidegree} down to {bidegree}")
        c[:s1, :s2] = self.coeffs
        return ScalarPoly2(c, self.var_names)

    def normalized(self):
        """Scale so the largest-magnitude coefficient (first in row-major order) is 1."""
        flat = self.coeffs.ravel()
        if not np.any(flat):
            return self
        k = int(np.argmax(np.abs(flat)))
        return ScalarPoly2(self.coeffs / flat[k], self.var_names)

    def monomials(self, tol=0.0):
        """Nonzero terms as ``[(i, j, coefficient), ...]`` in (i, j) order."""
        return [
            (i, j, complex(c))
            for (i, j), c in np.ndenumerate(self.coeffs)
            if abs(c) > tol
        ]


def chop_complex(c, thresh):
    """Flush real and imaginary parts below ``thresh`` to exact zero."""
    c = np.array(c, dtype=np.complex128)
    re, im = c.real.copy(), c.imag.copy()
    re[np.abs(re) < thresh] = 0.0
    im[np.abs(im) < thresh] = 0.0
    return re + 1j * im


def _sort_key(vals, quantum):
    # quantise real parts so rounding noise cannot reorder conjugate pairs
    return np.lexsort((vals.imag, np.round(vals.real / quantum)))


def sorted_eigvals(m, tol=1e-9):
    """Eigenvalues ordered by (real, imag) with real parts compared to ``tol * scale``."""
    m = check_cmatrix(m, "m", square=True)
    vals = np.linalg.eigvals(m)
    return vals[_sort_key(vals, tol * max(1.0, max_norm(m)))]


def as_matpoly(p):
    if isinstance(p, MatPoly2):
        return p
    return MatPoly2(p)


def eval2(p: MatPoly2, u, v):
    """Evaluate a matrix polynomial at ``(u, v)``."""
    p = as_matpoly(p)
    d1, d2 = p.bidegree
    u = complex(u)
    v = complex(v)
    pu = u ** np.arange(d1 + 1)
    pv = v ** np.arange(d2 + 1)
    return np.einsum("i,j,ijrc->rc", pu, pv, p.coeffs)


def _eval_grid(p: MatPoly2, us, vs):
    d1, d2 = p.bidegree
    pu = us[:, None] ** np.arange(d1 + 1)
    pv = vs[:, None] ** np.arange(d2 + 1)
    return np.einsum("ai,bj,ijrc->abrc", pu, pv, p.coeffs)


def det2(p: MatPoly2, bound=None, chop=True) -> ScalarPoly2:
    """Determinant of a square matrix polynomial as a :class:`ScalarPoly2`.

    ``bound`` is the output bidegree bound; by default ``(n*d1, n*d2)``.  The
    result is trimmed of trailing zero rows and columns after chopping.
    """
    p = as_matpoly(p)
    rows, cols = p.shape
    if rows != cols:
        raise NonSquare(f"determinant needs square coefficients, got {p.shape}")
    if bound is None:
        d1, d2 = p.bidegree
        bound = (rows * d1, rows * d2)
    n1, n2 = bound[0] + 1, bound[1] + 1
    us = np.exp(2j * np.pi * np.arange(n1) / n1)
    vs = np.exp(2j * np.pi * np.arange(n2) / n2)
    dets = np.linalg.det(_eval_grid(p, us, vs))
    c = np.fft.fft2(dets) / (n1 * n2)
    if chop:
        c = chop_complex(c, CHOP_REL * max_norm(c))
    return ScalarPoly2(_trim(c), p.var_names)


def numerical_rank(m, rtol=1e-9):
    """Rank counting singular values above ``rtol * sigma_max``."""
    m = np.asarray(m, dtype=np.complex128)
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def spectral_data(m, tol=1e-9):
    """Eigenvalues of ``m`` with their spectral projectors.

    Returns ``[(eigenvalue, projector), ...]`` sorted by (real, imag).  The
    projectors sum to the identity, are mutually annihilating idempotents and
    reconstruct ``m``; each identity is checked to ``tol`` (relative to the
    max-norm of ``m`` when that exceeds one).

    Raises :class:`NonSimpleSpectrum` if two eigenvalues are closer than
    ``1e3 * tol`` or the reconstruction fails, which catches defective input.
    """
    m = check_cmatrix(m, "m", square=True)
    n = m.shape[0]
    scale = max(1.0, max_norm(m))
    vals, vecs = np.linalg.eig(m)
    order = _sort_key(vals, tol * scale)
    vals, vecs = vals[order], vecs[:, order]
    if n > 1:
        gaps = np.abs(vals[:, None] - vals[None, :]) + np.diag(np.full(n, np.inf))
        if gaps.min() < GAP_FACTOR * tol * scale:
            raise NonSimpleSpectrum(f"eigenvalue gap {gaps.min():.3e} below threshold")
    try:
        inv = np.linalg.inv(vecs)
    except np.linalg.LinAlgError as exc:
        raise NonSimpleSpectrum("eigenvector matrix is singular") from exc
    projs = [np.outer(vecs[:, i], inv[i]) for i in range(n)]
    eye = np.eye(n)
    err_sum = max_norm(sum(projs) - eye)
    err_rec = max_norm(sum(l * p for l, p in zip(vals, projs)) - m)
    err_idem = max(
        max_norm(projs[i] @ projs[j] - (projs[i] if i == j else 0.0))
        for i in range(n)
        for j in range(n)
    )
    if max(err_sum, err_idem) > tol * scale or err_rec > tol * scale:
        raise NonSimpleSpectrum(
            f"spectral reconstruction residual {max(err_sum, err_rec, err_idem):.3e} exceeds tol"
        )
    return [(complex(l), p) for l, p in zip(vals, projs)]
