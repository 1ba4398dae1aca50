"""Real rational functions in coefficient form."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class FitError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class RationalFunction:
    """``p(y) / q(y)`` with ``y = (x - shift) / scale``.

    Coefficients are stored in ascending powers of ``y``; the denominator is
    normalized so its largest coefficient (in magnitude) is 1.
    """

    numerator: tuple
    denominator: tuple
    shift: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        num = np.trim_zeros(np.asarray(self.numerator, dtype=float), "b")
        den = np.trim_zeros(np.asarray(self.denominator, dtype=float), "b")
        if den.size == 0:
            raise ValueError("zero denominator")
        if num.size == 0:
            num = np.zeros(1)
        c = den[np.argmax(np.abs(den))]
        object.__setattr__(self, "numerator", tuple(num / c))
        object.__setattr__(self, "denominator", tuple(den / c))

    @property
    def degree(self) -> int:
        return max(len(self.numerator), len(self.denominator)) - 1

    def _y(self, x):
        return (np.asarray(x) - self.shift) / self.scale

    def __call__(self, x):
        y = self._y(x)
        return np.polynomial.polynomial.polyval(y, self.numerator) / \
            np.polynomial.polynomial.polyval(y, self.denominator)

    def numerator_roots(self):
        return self.shift + self.scale * np.polynomial.polynomial.polyroots(self.numerator) \
            if len(self.numerator) > 1 else np.array([])

    def poles(self):
        return self.shift + self.scale * np.polynomial.polynomial.polyroots(self.denominator) \
            if len(self.denominator) > 1 else np.array([])

    def derivative_numerator(self):
        """Coefficients (in ``y``) of ``p' q - p q'``."""
        P = np.polynomial.Polynomial(self.numerator)
        Q = np.polynomial.Polynomial(self.denominator)
        W = P.deriv() * Q - P * Q.deriv()
        return np.trim_zeros(W.coef, "b")

    def critical_points(self):
        """Finite critical points and the number of critical points at infinity.

        A degree-n map has 2n - 2 critical points on the sphere counted with
        multiplicity; whatever the finite roots of ``p'q - pq'`` miss sits at
        infinity.
        """
        W = self.derivative_numerator()
        n = self.degree
        if W.size <= 1:
            finite = np.array([], dtype=complex)
        else:
            lead = np.max(np.abs(W))
            W = np.where(np.abs(W) < 1e-14 * lead, 0.0, W)
            W = np.trim_zeros(W, "b")
            finite = self.shift + self.scale * np.polynomial.polynomial.polyroots(W) \
                if W.size > 1 else np.array([], dtype=complex)
        at_inf = max(0, 2 * n - 2 - len(finite))
        return finite, at_inf

    def value_at_infinity(self):
        p, q = len(self.numerator), len(self.denominator)
        if p > q:
            return np.inf
        if p < q:
            return 0.0
        return self.numerator[-1] / self.denominator[-1]

    def to_dict(self):
        return {"numerator": list(self.numerator), "denominator": list(self.denominator),
                "shift": self.shift, "scale": self.scale, "degree": self.degree}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["numerator"]), tuple(d["denominator"]), d.get("shift", 0.0), d.get("scale", 1.0))

    @classmethod
    def from_barycentric(cls, support, values, weights, shift=0.0, scale=1.0):
        """Coefficient form of ``sum w f/(x-z) / sum w/(x-z)``."""
        z = (np.asarray(support, dtype=float) - shift) / scale
        f = np.asarray(values, dtype=float)
        w = np.asarray(weights, dtype=float)
        num = np.zeros(len(z))
        den = np.zeros(len(z))
        for j in range(len(z)):
            others = np.delete(z, j)
            basis = np.polynomial.polynomial.polyfromroots(others) if len(others) else np.ones(1)
            num[: len(basis)] += w[j] * f[j] * basis
            den[: len(basis)] += w[j] * basis
        return cls(tuple(num), tuple(den), shift, scale)
