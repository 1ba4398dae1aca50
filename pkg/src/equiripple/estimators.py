"""scikit-learn style wrappers around design and the grid oracle.

Only ``fit``/``predict`` and parameter handling are provided; there is no
scoring or cloning beyond what ``BaseEstimator`` gives for free.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .bands import BandSystem
from .oracle import GridProblem, differential_correction
from .solutions import design


class BandFilterDesigner(BaseEstimator):
    """Fit a three-band equiripple solution of degree ``n`` and class ``sigma``.

    ``fit`` takes a ``BandSystem`` (or a ``(e_minus, e1_plus, e2_plus)``
    triple of pairs); ``predict`` evaluates the rescaled approximant.
    """

    def __init__(self, n=3, sigma=(1, 0, 0), tol=1e-11):
        self.n = n
        self.sigma = sigma
        self.tol = tol

    def fit(self, bands, y=None):
        if not isinstance(bands, BandSystem):
            bands = BandSystem(*[tuple(b) for b in bands])
        self.solution_ = design(bands, self.n, self.sigma, tol=self.tol)
        self.bands_ = bands
        self.family_ = self.solution_.family
        self.mu_ = self.solution_.mu
        return self

    def predict(self, X):
        if not hasattr(self, "solution_"):
            raise NotFittedError("call fit before predict")
        x = np.asarray(X, dtype=float).ravel()
        return self.solution_.approximant(x)


class DifferentialCorrectionRegressor(RegressorMixin, BaseEstimator):
    """Grid minimax rational regression of type ``(n, n)``.

    Each distinct target value is treated as its own band, so ``y`` is
    expected to be piecewise constant, as for band indicators.
    """

    def __init__(self, n=2, max_iter=60):
        self.n = n
        self.max_iter = max_iter

    def fit(self, X, y):
        x = np.asarray(X, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        if x.shape != y.shape:
            raise ValueError("X and y must have the same length")
        order = np.argsort(x)
        x, y = x[order], y[order]
        _, tags = np.unique(y, return_inverse=True)
        res = differential_correction(GridProblem(x, tags, y, self.n), self.max_iter)
        self.rational_ = res.rational
        self.mu_ = res.mu_grid
        self.converged_ = res.converged
        return self

    def predict(self, X):
        if not hasattr(self, "rational_"):
            raise NotFittedError("call fit before predict")
        return self.rational_(np.asarray(X, dtype=float).ravel())
