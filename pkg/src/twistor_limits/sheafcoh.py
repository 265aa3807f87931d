"""Cohomology of line bundles on P^1 and P^1 x P^1 via Laurent-monomial windows.

On P^1 with homogeneous coordinates ``(x0, x1)`` a class in ``H^q(O(c))`` is a
Laurent monomial ``x0**i * x1**(c - i)`` whose two exponents are both ``>= 0``
(``q = 0``) or both ``<= -1`` (``q = 1``).  Multiplying by a polynomial and
dropping every monomial that leaves the window is the induced map on
cohomology.  On the product, Kunneth gives ``H^q(O(c, d))`` as the span of pairs
of such monomials with ``q1 + q2 = q``; multiplication acts factorwise.

A presentation ``0 -> A -> B -> F -> 0`` with ``A``, ``B`` sums of line bundles is
described by a :class:`BihomMatrix`; :func:`cokernel_cohomology` runs the long
exact sequence with numerical ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np

from .polymat import numerical_rank

RANK_RTOL = 1e-9


def h0(c):
    return max(c + 1, 0)


def h1(c):
    return max(-c - 1, 0)


def window(c, q):
    """Exponents ``i`` of ``x0`` spanning ``H^q(P^1, O(c))``."""
    if q == 0:
        return list(range(0, c + 1))
    if q == 1:
        return list(range(c + 1, 0))
    raise ValueError("P^1 has cohomology only in degrees 0 and 1")


def in_window(i, c, q):
    j = c - i
    return (i >= 0 and j >= 0) if q == 0 else (i <= -1 and j <= -1)


def product_basis(c, d, q):
    """Basis of ``H^q(P^1 x P^1, O(c, d))`` as ``(q1, i, q2, j)`` tuples.

    ``i``/``j`` are the exponents of ``zeta0``/``eta0``; the ``zeta1``/``eta1``
    exponents are ``c - i``/``d - j``.
    """
    basis = []
    for q1 in (0, 1):
        q2 = q - q1
        if q2 not in (0, 1):
            continue
        for i in window(c, q1):
            for j in window(d, q2):
                basis.append((q1, i, q2, j))
    return basis


def euler_char(c, d):
    return (c + 1) * (d + 1)


@dataclass(frozen=True, eq=False)
class BihomMatrix:
    """Matrix of bihomogeneous forms between sums of line bundles on P^1 x P^1.

    ``terms`` maps ``(i0, i1, j0, j1)`` (exponents of ``zeta0, zeta1, eta0,
    eta1``) to a complex coefficient matrix.  Column ``c`` is a map out of
    ``O(src[c])`` and row ``r`` lands in ``O(tgt[r])``; every nonzero entry of a
    term must have degree ``tgt[r] - src[c]``.
    """

    terms: dict
    src: tuple
    tgt: tuple

    def __post_init__(self):
        nr, nc = len(self.tgt), len(self.src)
        clean = {}
        for key, m in self.terms.items():
            m = np.asarray(m, dtype=np.complex128)
            if m.shape != (nr, nc):
                raise ValueError(f"term {key} has shape {m.shape}, expected {(nr, nc)}")
            i0, i1, j0, j1 = key
            if min(key) < 0:
                raise ValueError(f"term {key} has a negative exponent")
            for r, c in zip(*np.nonzero(m)):
                want = (self.tgt[r][0] - self.src[c][0], self.tgt[r][1] - self.src[c][1])
                if (i0 + i1, j0 + j1) != want:
                    raise ValueError(
                        f"entry ({r}, {c}) of term {key} has degree {(i0 + i1, j0 + j1)}, expected {want}"
                    )
            clean[tuple(key)] = m
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "src", tuple(tuple(s) for s in self.src))
        object.__setattr__(self, "tgt", tuple(tuple(t) for t in self.tgt))

    def twisted(self, a, b):
        return BihomMatrix(
            self.terms,
            tuple((s0 + a, s1 + b) for s0, s1 in self.src),
            tuple((t0 + a, t1 + b) for t0, t1 in self.tgt),
        )

    def evaluate(self, z0, z1, e0, e1):
        out = np.zeros((len(self.tgt), len(self.src)), dtype=np.complex128)
        for (i0, i1, j0, j1), m in self.terms.items():
            out += m * (z0**i0 * z1**i1 * e0**j0 * e1**j1)
        return out


def induced_map(mat: BihomMatrix, q):
    """Matrix of ``H^q(sum O(src)) -> H^q(sum O(tgt))`` with its block bases."""
    src_bases = [product_basis(c, d, q) for c, d in mat.src]
    tgt_bases = [product_basis(c, d, q) for c, d in mat.tgt]
    src_off = np.cumsum([0] + [len(b) for b in src_bases])
    tgt_off = np.cumsum([0] + [len(b) for b in tgt_bases])
    tgt_index = [{v: k for k, v in enumerate(b)} for b in tgt_bases]
    out = np.zeros((tgt_off[-1], src_off[-1]), dtype=np.complex128)
    for (i0, i1, j0, j1), m in mat.terms.items():
        rows, cols = np.nonzero(m)
        for r, c in zip(rows, cols):
            tc, td = mat.tgt[r]
            for k, (q1, i, q2, j) in enumerate(src_bases[c]):
                ni, nj = i + i0, j + j0
                if not (in_window(ni, tc, q1) and in_window(nj, td, q2)):
                    continue
                row = tgt_index[r][(q1, ni, q2, nj)]
                out[tgt_off[r] + row, src_off[c] + k] += m[r, c]
    return out


@dataclass(frozen=True)
class CokernelCohomology:
    h0: int
    h1: int
    h2: int
    maps: tuple  # induced maps on H^0, H^1, H^2
    ranks: tuple
    chi_expected: int

    @property
    def chi(self):
        return self.h0 - self.h1 + self.h2


def cokernel_cohomology(mat: BihomMatrix, rtol=RANK_RTOL) -> CokernelCohomology:
    """Cohomology of ``F = coker(mat)`` assuming ``mat`` is injective as a sheaf map."""
    maps = tuple(induced_map(mat, q) for q in (0, 1, 2))
    ranks = tuple(numerical_rank(m, rtol) if m.size else 0 for m in maps)
    dims_a = [m.shape[1] for m in maps]
    dims_b = [m.shape[0] for m in maps]
    coker = [dims_b[q] - ranks[q] for q in range(3)]
    ker = [dims_a[q] - ranks[q] for q in range(3)]
    h0_ = coker[0] + ker[1]
    h1_ = coker[1] + ker[2]
    h2_ = coker[2]
    chi = sum(euler_char(*t) for t in mat.tgt) - sum(euler_char(*s) for s in mat.src)
    return CokernelCohomology(h0_, h1_, h2_, maps, ranks, chi)


# -- P^1 only: graded pieces on the total space of O(2) -------------------------------


def p1_multiplication(coeffs, c_src, q):
    """Matrix of multiplication by ``sum_k coeffs[k] x0**(d-k) x1**k`` on ``H^q(O(c_src))``.

    ``coeffs[k]`` are n x n blocks; the result acts on ``H^q(O(c_src))^n``.
    """
    coeffs = [np.asarray(c, dtype=np.complex128) for c in coeffs]
    d = len(coeffs) - 1
    n = coeffs[0].shape[0]
    src = window(c_src, q)
    tgt = window(c_src + d, q)
    tindex = {v: k for k, v in enumerate(tgt)}
    out = np.zeros((len(tgt) * n, len(src) * n), dtype=np.complex128)
    for col, i in enumerate(src):
        for k, blk in enumerate(coeffs):
            ni = i + (d - k)
            if in_window(ni, c_src + d, q):
                row = tindex[ni]
                out[row * n:(row + 1) * n, col * n:(col + 1) * n] += blk
    return out

