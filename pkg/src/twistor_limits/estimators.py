"""scikit-learn style wrappers around the point/curve correspondence and limit extraction."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .extrapolation import TAU_LIM, halving_steps
from .lhc import FamilySampler, a_tilde, extract_limit
from .minitwistor import Curve11, EuclidCurve1, SpacePoint, curve_to_point, point_to_curve
from .polymat import sorted_eigvals


class PointCurveTransformer(TransformerMixin, BaseEstimator):
    """Map points ``(x, y, z)`` to the coefficients of their curves at parameter ``t``.

    ``t = 0`` gives ``[A00, A10, A11]``; ``t > 0`` gives ``[a00, a10, a01, a11]``.
    """

    def __init__(self, t=0.0):
        self.t = t

    def _check_t(self):
        if not np.isfinite(self.t) or self.t < 0:
            raise ValueError(f"t must be a finite non-negative real, got {self.t}")
        return float(self.t)

    def fit(self, X, y=None):
        check_array(X, ensure_min_features=3)
        self._check_t()
        self.n_features_in_ = 3
        return self

    def transform(self, X):
        check_is_fitted(self, "n_features_in_")
        X = check_array(X)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns (x, y, z), got {X.shape[1]}")
        t = self._check_t()
        out = []
        for x, y, z in X:
            c = point_to_curve(SpacePoint(x, y, z, t))
            out.append([c.A00, c.A10, c.A11] if t == 0 else [c.a00, c.a10, c.a01, c.a11])
        return np.array(out, dtype=np.complex128)

    def inverse_transform(self, C):
        check_is_fitted(self, "n_features_in_")
        C = np.asarray(C, dtype=np.complex128)
        t = self._check_t()
        width = 3 if t == 0 else 4
        if C.ndim != 2 or C.shape[1] != width:
            raise ValueError(f"expected {width} coefficient columns, got shape {C.shape}")
        if t == 0:
            pts = [curve_to_point(EuclidCurve1(*row)) for row in C]
        else:
            pts = [curve_to_point(Curve11(*row, t)) for row in C]
        return np.array([p.as_array() for p in pts])


class LimitExtractor(BaseEstimator):
    """Fit the limit data ``(P, Q)`` of a pencil family; predict the w-roots of ``At``.

    ``fit`` takes a callable ``t -> (X_t, Y_t)`` or a :class:`FamilySampler`.
    """

    def __init__(self, steps=None, tau=TAU_LIM):
        self.steps = steps
        self.tau = tau

    def fit(self, family, y=None):
        steps = self.steps if self.steps is not None else halving_steps(3, 10)
        if not isinstance(family, FamilySampler):
            family = FamilySampler(family, (-np.inf, np.inf))
        data, diag = extract_limit(family, steps, tau=self.tau)
        self.data_ = data
        self.P_, self.Q_ = data.P, data.Q
        self.a_tilde_ = a_tilde(data)
        self.diagnostics_ = diag
        return self

    def predict(self, zetas):
        """Rows of w-roots (sorted by real, imaginary part) over each ``zeta``."""
        check_is_fitted(self, "a_tilde_")
        zetas = np.atleast_1d(np.asarray(zetas, dtype=np.complex128))
        if zetas.ndim != 1:
            raise ValueError("zetas must be a 1-d array")
        return np.array([sorted_eigvals(self.a_tilde_(z)) for z in zetas])
