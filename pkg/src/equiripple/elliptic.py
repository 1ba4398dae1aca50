"""Jacobi theta functions and the normalized rectangle map.

Conventions
-----------
Theta functions take their argument in units of pi::

    theta(1, u, q) = 2 sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi u)
    theta(2, u, q) = 2 sum_{n>=0}        q^{(n+1/2)^2} cos((2n+1) pi u)
    theta(3, u, q) = 1 + 2 sum_{n>=1}       q^{n^2}  cos(2n pi u)
    theta(0, u, q) = 1 + 2 sum_{n>=1} (-1)^n q^{n^2}  cos(2n pi u)

``theta(0, ...)`` is the function often written theta_4.  With this
labelling the rectangle map is

    x(u) = sn(K u) = (theta3 / theta2) * theta1(u/2) / theta0(u/2)

and K = (pi/2) theta3(0)^2; both identities are checked against
``scipy.special.ellipj`` in the test-suite.

The rectangle Pi(t) = {-1 < Re u < 1, 0 < Im u < t} is mapped onto the
upper half plane with -1, 0, 1 fixed and the corner 1 + i t sent to 1/k.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import elliprf

# nome bound: outside the regime of interest, series converge too slowly
Q_MAX = 0.9
_TAIL = 1e-16


class EllipticDomainError(ValueError):
    pass


def _check_nome(q):
    if not (0.0 < q < 1.0):
        raise EllipticDomainError(f"nome must lie in (0, 1), got {q!r}")
    if q > Q_MAX:
        raise EllipticDomainError(f"nome {q!r} exceeds supported limit {Q_MAX}")


def theta(j: int, u: complex, q: float) -> complex:
    """Jacobi theta function ``j`` in {0, 1, 2, 3} at ``u`` (pi-scaled)."""
    _check_nome(q)
    if j not in (0, 1, 2, 3):
        raise EllipticDomainError(f"theta index must be 0..3, got {j!r}")
    u = complex(u)
    z = math.pi * u
    if j in (0, 3):
        total = 1.0 + 0j
        sgn = -1.0 if j == 0 else 1.0
        n = 1
        while True:
            term = 2.0 * sgn**n * q ** (n * n) * cmath.cos(2 * n * z)
            total += term
            if abs(term) < _TAIL * (abs(total) + 1.0) and n > 1:
                break
            n += 1
        return total
    total = 0j
    n = 0
    while True:
        c = q ** ((n + 0.5) ** 2)
        if j == 1:
            term = 2.0 * (-1.0) ** n * c * cmath.sin((2 * n + 1) * z)
        else:
            term = 2.0 * c * cmath.cos((2 * n + 1) * z)
        total += term
        if abs(term) < _TAIL * (abs(total) + 1.0) and n > 0:
            break
        n += 1
    return total


@dataclass(frozen=True)
class EllipticModulus:
    """Purely imaginary modulus ``tau = i t`` with its derived constants."""

    t: float
    q: float
    K: float
    kinv: float

    @property
    def k(self) -> float:
        return 1.0 / self.kinv

    @property
    def Kprime(self) -> float:
        return self.K * self.t

    def scaled(self, factor: float) -> "EllipticModulus":
        return modulus_from_t(self.t * factor)


def modulus_from_t(t: float) -> EllipticModulus:
    t = float(t)
    if not t > 0 or not math.isfinite(t):
        raise EllipticDomainError(f"t must be positive and finite, got {t!r}")
    q = math.exp(-math.pi * t)
    _check_nome(q)
    th3 = theta(3, 0, q).real
    th2 = theta(2, 0, q).real
    return EllipticModulus(t=t, q=q, K=0.5 * math.pi * th3**2, kinv=(th3 / th2) ** 2)


def _reduce(u: complex, t: float) -> complex:
    # sn has periods 4K and 2iK', i.e. 4 and 2it in u-units
    re = (u.real + 1.0) % 4.0 - 1.0
    im = u.imag - 2.0 * t * math.floor((u.imag + t) / (2.0 * t))
    return complex(re, im)


def _jacobi_triple(u: complex, mod: EllipticModulus):
    u = _reduce(complex(u), mod.t)
    q = mod.q
    v = u / 2.0
    th0 = theta(0, v, q)
    th1 = theta(1, v, q)
    th2 = theta(2, v, q)
    th3 = theta(3, v, q)
    c0 = theta(0, 0, q).real
    c2 = theta(2, 0, q).real
    c3 = theta(3, 0, q).real
    return th0, (c3 / c2) * th1, (c0 / c2) * th2, (c0 / c3) * th3


def x_map(u: complex, mod: EllipticModulus) -> complex:
    """sn(K u); returns ``complex(inf)`` at a pole."""
    th0, s, _, _ = _jacobi_triple(u, mod)
    if abs(th0) < 1e-300 or abs(s) > 1e300 * abs(th0):
        return complex(math.inf, 0.0)
    val = s / th0
    # beyond 1e15 the value only reflects rounding in theta0 near its zero
    if not cmath.isfinite(val) or abs(val) > 1e15:
        return complex(math.inf, 0.0)
    return val


def x_map_derivative(u: complex, mod: EllipticModulus) -> complex:
    """d/du sn(K u) = K cn dn."""
    th0, _, c, d = _jacobi_triple(u, mod)
    return mod.K * (c / th0) * (d / th0)


def x_map_real(u, mod: EllipticModulus):
    """Vectorized ``x_map`` for real or complex arrays; poles become nan."""
    arr = np.asarray(u, dtype=complex)
    out = np.empty(arr.shape, dtype=complex)
    for idx, val in np.ndenumerate(arr):
        r = x_map(val, mod)
        out[idx] = r if cmath.isfinite(r) else complex(np.nan, np.nan)
    return out


def _clamp_rectangle(u: complex, t: float) -> complex:
    return complex(min(1.0, max(-1.0, u.real)), min(t, max(0.0, u.imag)))


def inverse_x(x: complex, mod: EllipticModulus, *, tol: float = 1e-12) -> complex:
    """Point of the closed rectangle Pi(t) mapped to ``x`` (Im x >= 0).

    The incomplete elliptic integral (Carlson form) gives the start, Newton
    on ``x_map`` polishes it.
    """
    x = complex(x)
    if x.imag < 0:
        # rounding can leave real points a hair below the axis
        if x.imag < -1e-14 * (1 + abs(x)):
            raise EllipticDomainError("inverse_x expects Im x >= 0")
        x = complex(x.real, 0.0)
    t, k = mod.t, mod.k
    if cmath.isinf(x) or abs(x) > 1e300:
        return complex(0.0, t)
    if x.imag == 0.0:
        u0 = _inverse_real(x.real, mod)
    else:
        with np.errstate(all="ignore"):
            F = complex(x * elliprf(1 - x * x, 1 - k * k * x * x, 1.0))
        u0 = _clamp_rectangle(F / mod.K, t)
        # the Carlson form uses the principal branch; reflect if it landed low
        if not cmath.isfinite(u0):
            u0 = complex(0.0, t / 2)
    u = u0
    for _ in range(60):
        fx = x_map(u, mod)
        if cmath.isinf(fx):
            u = u + complex(1e-9, -1e-9)
            continue
        r = fx - x
        if abs(r) <= tol * (1.0 + abs(x)) * 1e-2:
            break
        d = x_map_derivative(u, mod)
        if d == 0:
            break
        step = r / d
        un = _clamp_rectangle(u - step, t)
        u = un
    res = abs(x_map(u, mod) - x)
    if not res <= tol * (1.0 + abs(x)) * 10:
        u = _inverse_by_bisection(x, mod) if x.imag == 0 else u
    if x.imag == 0.0:
        u = complex(u.real, u.imag if abs(u.imag) > 1e-15 else 0.0)
    return u


def _inverse_real(x: float, mod: EllipticModulus) -> complex:
    """Boundary point of Pi(t) over real ``x``."""
    k, t = mod.k, mod.t
    if -1.0 <= x <= 1.0:
        return complex(x * elliprf(1 - x * x, 1 - k * k * x * x, 1.0) / mod.K, 0.0)
    ax = abs(x)
    sgn = 1.0 if x > 0 else -1.0
    if ax <= mod.kinv:
        # vertical side: sn(K + i s K') = 1/dn(s K', k'), solve by the
        # complementary integral
        kp2 = 1.0 - k * k
        # dn(w, k') = 1/ax, dn^2 = 1 - k'^2 sn^2 -> sn^2 = (1 - 1/ax^2)/k'^2
        s2 = min(1.0, (1.0 - 1.0 / (ax * ax)) / kp2)
        s = math.sqrt(s2)
        w = s * elliprf(1 - s2, 1 - kp2 * s2, 1.0)
        return complex(sgn, w / mod.K)
    # top side: sn(u + i K') = 1/(k sn u)
    y = 1.0 / (k * x)
    return complex(y * elliprf(1 - y * y, 1 - k * k * y * y, 1.0) / mod.K, t)


def _inverse_by_bisection(x: complex, mod: EllipticModulus) -> complex:
    from scipy.optimize import brentq

    xr = x.real
    t = mod.t
    if -1 <= xr <= 1:
        f = lambda s: x_map(s, mod).real - xr
        return complex(brentq(f, -1.0, 1.0, xtol=1e-15), 0.0)
    if 1 < abs(xr) <= mod.kinv:
        sg = math.copysign(1.0, xr)
        f = lambda s: abs(x_map(complex(sg, s), mod).real) - abs(xr)
        return complex(sg, brentq(f, 0.0, t, xtol=1e-15))
    f = lambda s: 1.0 / x_map(complex(s, t), mod).real - 1.0 / xr
    lo, hi = (0.0, 1.0) if xr > 0 else (-1.0, 0.0)
    return complex(brentq(f, lo + 1e-300, hi, xtol=1e-15), t)
