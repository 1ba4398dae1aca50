import cmath
import math

import mpmath
import numpy as np
import pytest
from scipy.special import ellipj, ellipk

from equiripple.elliptic import (EllipticDomainError, inverse_x, modulus_from_t, theta, x_map,
                                 x_map_derivative)


def mp_theta(j, u, q):
    # mpmath uses radians and labels our theta_0 as theta_4
    return complex(mpmath.jtheta(4 if j == 0 else j, mpmath.pi * u, q))


@pytest.mark.parametrize("j", [0, 1, 2, 3])
@pytest.mark.parametrize("u", [0.0, 0.37, 0.2 + 0.3j, -1.1 + 0.05j])
@pytest.mark.parametrize("q", [0.05, 0.3, 0.8])
def test_theta_matches_mpmath(j, u, q):
    assert abs(theta(j, u, q) - mp_theta(j, u, q)) < 1e-13 * (1 + abs(mp_theta(j, u, q)))


def test_theta_series_values():
    assert theta(1, 0, 0.3) == 0
    partial = 1 + 2 * sum(0.1 ** (n * n) for n in range(1, 7))
    assert theta(3, 0, 0.1).real == pytest.approx(partial, abs=1e-15)
    assert theta(3, 0, 0.1).real == pytest.approx(1.200200002, abs=1e-15)
    assert theta(1, -0.37, 0.2) == pytest.approx(-theta(1, 0.37, 0.2), abs=1e-16)


@pytest.mark.parametrize("q", [0.05, 0.1, 0.3])
def test_jacobi_identity(q):
    lhs = theta(3, 0, q).real ** 4
    rhs = theta(2, 0, q).real ** 4 + theta(0, 0, q).real ** 4
    assert abs(lhs - rhs) < 1e-13


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 0.95])
def test_nome_domain(bad):
    with pytest.raises(EllipticDomainError):
        theta(3, 0, bad)


def test_modulus_fields():
    mod = modulus_from_t(1.0)
    assert mod.q == pytest.approx(math.exp(-math.pi))
    assert mod.kinv == pytest.approx(math.sqrt(2.0), abs=1e-14)
    assert mod.K == pytest.approx(ellipk(0.5), abs=1e-14)
    big = modulus_from_t(10.0)
    assert big.kinv == pytest.approx(1 / (4 * math.sqrt(big.q)), rel=1e-12)
    assert big.K == pytest.approx(math.pi / 2, abs=1e-12)
    ks = [modulus_from_t(t).kinv for t in np.linspace(0.2, 4, 30)]
    assert np.all(np.diff(ks) > 0)
    with pytest.raises(EllipticDomainError):
        modulus_from_t(0.0)


@pytest.mark.parametrize("t", [0.3, 0.6, 1.5])
def test_x_map_against_scipy_sn(t):
    mod = modulus_from_t(t)
    assert mod.K == pytest.approx(ellipk(mod.k ** 2), rel=1e-13)
    for u in np.linspace(-0.99, 0.99, 23):
        sn = ellipj(mod.K * u, mod.k ** 2)[0]
        assert x_map(u, mod).real == pytest.approx(sn, abs=1e-13)


def test_x_map_normalization():
    mod = modulus_from_t(0.7)
    assert abs(x_map(0, mod)) < 1e-16
    assert x_map(1, mod) == pytest.approx(1, abs=1e-14)
    assert x_map(-1, mod) == pytest.approx(-1, abs=1e-14)
    assert x_map(complex(1, mod.t), mod) == pytest.approx(mod.kinv, abs=1e-12)
    assert cmath.isinf(x_map(complex(0, mod.t), mod))
    assert x_map(0.5, modulus_from_t(12.0)).real == pytest.approx(math.sin(math.pi / 4), abs=1e-12)


def test_x_map_increasing_and_periodic():
    mod = modulus_from_t(0.5)
    u = np.linspace(-0.999, 0.999, 1000)
    d = np.array([x_map_derivative(v, mod).real for v in u])
    assert np.all(d > 0)
    rng = np.random.default_rng(3)
    for _ in range(10):
        v = complex(rng.uniform(-1, 1), rng.uniform(0, 0.4))
        assert abs(x_map(v + 4, mod) - x_map(v, mod)) < 1e-12
        assert abs(x_map(v + 2j * mod.t, mod) - x_map(v, mod)) < 1e-12
        assert abs(x_map(v + 2, mod) + x_map(v, mod)) < 1e-12


def test_inverse_corners_and_round_trip():
    mod = modulus_from_t(0.45)
    assert abs(inverse_x(0, mod)) < 1e-15
    assert abs(inverse_x(1, mod) - 1) < 1e-12
    assert abs(inverse_x(-1, mod) + 1) < 1e-12
    assert abs(inverse_x(mod.kinv, mod) - complex(1, mod.t)) < 1e-9
    xs = np.random.default_rng(0).uniform(-1, 1, 100)
    worst = max(abs(x_map(inverse_x(x, mod), mod) - x) / (1 + abs(x)) for x in xs)
    assert worst < 1e-12
