"""Zolotarev fractions: the degree-n maps with Z_n(x(u|n t)) = x(u|t)."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import EllipticModulus, inverse_x, modulus_from_t, x_map
from .rational import FitError, RationalFunction


@dataclass(frozen=True)
class ZolotarevFraction:
    n: int
    mod_small: EllipticModulus
    mod_big: EllipticModulus

    @property
    def t(self) -> float:
        return self.mod_small.t

    def __call__(self, x):
        if np.ndim(x) == 0:
            return eval_Z(self, x)
        return np.array([eval_Z(self, v) for v in np.ravel(x)]).reshape(np.shape(x))


def zolotarev(n: int, t: float) -> ZolotarevFraction:
    if int(n) != n or n < 1:
        raise ValueError(f"degree must be a positive integer, got {n!r}")
    n = int(n)
    return ZolotarevFraction(n, modulus_from_t(t), modulus_from_t(n * t))


def eval_Z(zf: ZolotarevFraction, x):
    """Z_n(x); real input gives a real result, poles give ``inf``."""
    real_input = np.isrealobj(x)
    x = complex(x)
    if cmath.isinf(x):
        val = x_map(complex(0.0, zf.mod_big.t), zf.mod_small)
        return val.real if real_input else val
    flip = x.imag < 0
    u = inverse_x(x.conjugate() if flip else x, zf.mod_big)
    val = x_map(u, zf.mod_small)
    if cmath.isinf(val):
        return math.inf if real_input else complex(math.inf)
    if flip:
        val = val.conjugate()
    return val.real if real_input else val


def zolotarev_bands(zf: ZolotarevFraction):
    """Stopband and passband ``-[1, 1/k(n t)]`` and ``[1, 1/k(n t)]``."""
    kb = zf.mod_big.kinv
    return (-kb, -1.0), (1.0, kb)


def rescaled_solution(zf: ZolotarevFraction):
    """``(scale, mu)`` with scale = 2k/(k+1) and deviation (1-k)/(1+k)."""
    k = zf.mod_small.k
    return 2 * k / (k + 1), (1 - k) / (1 + k)


def pole_locations(zf: ZolotarevFraction):
    """Poles as images of the tile centres (2j+1) i t of the big rectangle."""
    out = []
    for j in range(zf.n):
        s = (2 * j + 1) * zf.t
        if s < zf.mod_big.t:
            out.append(x_map(complex(0.0, s), zf.mod_big))
        elif math.isclose(s, zf.mod_big.t):
            out.append(complex(math.inf))
    return out


def as_rational(zf: ZolotarevFraction, *, tol: float = 1e-9) -> RationalFunction:
    """Coefficient form by interpolation at Chebyshev points of the real line.

    Z_n is odd, so the numerator carries odd powers and the denominator even
    powers; for odd n the pole at infinity leaves the denominator at degree n-1.
    """
    n = zf.n
    if n == 1:
        return RationalFunction((0.0, 1.0), (1.0,))
    kb = zf.mod_big.kinv
    scale = kb
    num_deg = n if n % 2 else n - 1
    den_deg = n - 1 if n % 2 else n
    num_pows = list(range(1, num_deg + 1, 2))
    den_pows = list(range(0, den_deg + 1, 2))
    m = 2 * n + 2
    xs = kb * np.cos(np.pi * (np.arange(m) + 0.5) / m)
    ys = np.array([eval_Z(zf, x) for x in xs])
    y = xs / scale
    A = np.hstack([y[:, None] ** np.array(num_pows), -ys[:, None] * y[:, None] ** np.array(den_pows)])
    _, _, vt = np.linalg.svd(A)
    coef = vt[-1]
    num = np.zeros(num_deg + 1)
    den = np.zeros(den_deg + 1)
    num[num_pows] = coef[: len(num_pows)]
    den[den_pows] = coef[len(num_pows):]
    rf = RationalFunction(tuple(num), tuple(den), 0.0, scale)
    check = kb * np.cos(np.pi * (np.arange(4 * n) + 0.25) / (4 * n))
    exact = np.array([eval_Z(zf, x) for x in check])
    resid = float(np.max(np.abs(rf(check) - exact) / (1 + np.abs(exact))))
    if resid > tol:
        raise FitError(f"Zolotarev coefficient fit residual {resid:.3g}", residual=resid)
    return rf


def critical_values(zf: ZolotarevFraction, *, cluster: float = 1e-7):
    """Distinct values of Z_n at its critical points."""
    rf = as_rational(zf)
    pts, at_inf = rf.critical_points()
    vals = [eval_Z(zf, complex(p)) for p in pts]
    if at_inf:
        vals.append(eval_Z(zf, complex(math.inf)))
    out = []
    for v in vals:
        v = complex(v)
        if not any(abs(v - w) <= cluster * (1 + abs(w)) for w in out):
            out.append(v)
    return out


def compose(outer: ZolotarevFraction, inner: ZolotarevFraction):
    """``outer o inner`` as a callable on real arrays."""
    if not math.isclose(outer.mod_big.t, inner.mod_small.t, rel_tol=1e-14):
        raise ValueError("moduli do not chain: outer big modulus must equal inner small modulus")
    return lambda x: outer(inner(x))


def genus1_three_band(zf: ZolotarevFraction, m: int, v1: float, v2: float):
    """Three-band set served by Z_n after removing ``1 + (v1, v2) t`` from its passband."""
    from .bands import BandSystem

    n = zf.n
    if not (0 <= m <= n - 1 and m <= v1 < v2 <= m + 1):
        raise ValueError(f"need 0 <= m <= n-1 and m <= v1 < v2 <= m+1, got m={m}, v1={v1}, v2={v2}")
    if v1 == 0 or v2 == n:
        raise ValueError("a passband would collapse to a point")
    big = zf.mod_big
    kb = big.kinv
    x1 = x_map(complex(1.0, v1 * zf.t), big).real
    x2 = x_map(complex(1.0, v2 * zf.t), big).real
    return BandSystem((-kb, -1.0), (1.0, x1), (x2, kb))
