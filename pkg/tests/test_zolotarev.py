import math

import numpy as np
import pytest

from equiripple.bands import BandSystem
from equiripple.rational import RationalFunction
from equiripple.zolotarev import (as_rational, compose, critical_values, eval_Z,
                                  genus1_three_band, pole_locations, rescaled_solution, zolotarev,
                                  zolotarev_bands)
from equiripple.verify import alternation_points, sup_error, topological_class


def test_degree_one_is_identity():
    zf = zolotarev(1, 0.5)
    for x in (-3.0, -0.4, 0.0, 0.7, 2.5):
        assert eval_Z(zf, x) == pytest.approx(x, abs=1e-12)
    rf = as_rational(zf)
    assert rf.numerator == (0.0, 1.0) and rf.denominator == (1.0,)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_corner_values(n):
    zf = zolotarev(n, 0.35)
    assert eval_Z(zf, 1.0) == pytest.approx(1.0, abs=1e-12)
    assert eval_Z(zf, -1.0) == pytest.approx(-1.0, abs=1e-12)
    expected = zf.mod_small.kinv if n % 2 else 1.0
    assert eval_Z(zf, zf.mod_big.kinv) == pytest.approx(expected, abs=1e-10)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_odd_symmetry(n):
    zf = zolotarev(n, 0.4)
    xs = np.linspace(-3.0, 3.0, 41)
    vals = zf(xs)
    assert np.allclose(vals, -zf(-xs), rtol=1e-10, atol=1e-10)


def test_bands_symmetric_and_growing():
    zf = zolotarev(1, 1.0)
    em, ep = zolotarev_bands(zf)
    assert ep[1] == pytest.approx(math.sqrt(2.0), abs=1e-14)
    assert em == (-ep[1], -ep[0])
    for n in (2, 3, 4):
        z = zolotarev(n, 1.0)
        assert z.mod_big.kinv > z.mod_small.kinv


def test_rescaled_deviation_t1_n3():
    zf = zolotarev(3, 1.0)
    scale, mu = rescaled_solution(zf)
    em, ep = zolotarev_bands(zf)
    bands = _two_band(em, ep)
    R = lambda x: scale * zf(x)
    err = sup_error(R, bands)
    assert err == pytest.approx(mu, abs=1e-8)
    assert alternation_points(R, bands, err).count == 8
    mus = [rescaled_solution(zolotarev(3, t))[1] for t in (0.05, 0.2, 0.6)]
    assert mus[0] < mus[1] < mus[2]


def _two_band(em, ep):
    # two bands embedded as a three-band set with a vanishing lacuna
    mid = 0.5 * (ep[0] + ep[1])
    return BandSystem(em, (ep[0], mid), (math.nextafter(mid, math.inf), ep[1]))


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_as_rational_structure(n):
    zf = zolotarev(n, 0.3)
    rf = as_rational(zf)
    assert rf.degree == n
    num, den = np.array(rf.numerator), np.array(rf.denominator)
    assert np.all(num[0::2] == 0) and np.all(den[1::2] == 0)
    # poles lie on the imaginary axis in conjugate pairs
    upper = [p for p in pole_locations(zf) if np.isfinite(abs(p))]
    expected = sorted([p.imag for p in upper] + [-p.imag for p in upper])
    poles = rf.poles()
    assert np.all(np.abs(poles.real) < 1e-8)
    assert np.allclose(sorted(poles.imag), expected, atol=1e-8)


def test_n2_has_one_symmetric_pole_pair():
    rf = as_rational(zolotarev(2, 0.6))
    poles = rf.poles()
    assert len(poles) == 2 and abs(poles[0] + poles[1]) < 1e-8
    assert abs(poles[0] - poles[1].conjugate()) < 1e-8


@pytest.mark.parametrize("n", [3, 4, 5])
def test_critical_values_four(n):
    zf = zolotarev(n, 0.4)
    vals = sorted(critical_values(zf), key=lambda v: v.real)
    kinv = zf.mod_small.kinv
    assert len(vals) == 4
    assert np.allclose([v.real for v in vals], [-kinv, -1, 1, kinv], atol=1e-7)


def test_composition():
    t = 0.25
    inner = zolotarev(3, 2 * t)
    outer = zolotarev(2, t)
    f = compose(outer, inner)
    z6 = zolotarev(6, t)
    xs = np.linspace(1.0, z6.mod_big.kinv, 50)
    assert np.max(np.abs(f(xs) - z6(xs))) < 1e-9
    with pytest.raises(ValueError):
        compose(zolotarev(2, t), zolotarev(3, t))


def test_genus1_three_band():
    zf = zolotarev(4, 0.4)
    bands = genus1_three_band(zf, 1, 1.0, 2.0)
    scale, mu = rescaled_solution(zf)
    R = lambda x: scale * zf(x)
    err = sup_error(R, bands)
    assert err == pytest.approx(mu, abs=1e-9)
    assert alternation_points(R, bands, err).count == 10
    rf = as_rational(zf)
    scaled = RationalFunction(tuple(scale * c for c in rf.numerator), rf.denominator, rf.shift, rf.scale)
    assert topological_class(scaled, bands) == (1, 0, 1)
    with pytest.raises(ValueError):
        genus1_three_band(zf, 1, 1.5, 1.5)
    with pytest.raises(ValueError):
        genus1_three_band(zf, 0, 0.0, 0.5)
    with pytest.raises(ValueError):
        genus1_three_band(zf, 3, 3.5, 4.0)
