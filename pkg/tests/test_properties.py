"""Property-based checks of the kernel invariants."""
import json
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from equiripple.bands import BandSystem, Mobius, mobius_to
from equiripple.cli import dumps
from equiripple.elliptic import inverse_x, modulus_from_t, theta, x_map
from equiripple.rational import RationalFunction
from equiripple.verify import rational_fit, sup_error
from equiripple.zolotarev import eval_Z, zolotarev

ts = st.floats(0.15, 2.0)
nomes = st.floats(0.01, 0.85)


@given(nomes)
def test_jacobi_identity(q):
    lhs = theta(3, 0, q).real ** 4
    rhs = theta(2, 0, q).real ** 4 + theta(0, 0, q).real ** 4
    assert abs(lhs - rhs) < 1e-13 * lhs


@given(st.integers(0, 3), st.floats(-2, 2), st.floats(-0.3, 0.3), nomes)
def test_theta_parity(j, a, b, q):
    u = complex(a, b)
    sign = -1 if j == 1 else 1
    assert abs(theta(j, -u, q) - sign * theta(j, u, q)) < 1e-12 * (1 + abs(theta(j, u, q)))


@given(ts, st.floats(-0.999, 0.999), st.floats(0.0, 1.0))
def test_inverse_round_trip(t, re, frac):
    mod = modulus_from_t(t)
    u = complex(re, frac * t * 0.98)
    x = x_map(u, mod)
    back = x_map(inverse_x(x, mod), mod)
    assert abs(back - x) <= 1e-12 * (1 + abs(x))


@given(ts, st.floats(-0.99, 0.99))
def test_x_map_real_and_bounded_on_axis(t, u):
    v = x_map(u, modulus_from_t(t))
    assert abs(v.imag) < 1e-14 and -1 <= v.real <= 1


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.floats(0.2, 1.0), st.floats(-3, 3))
def test_zolotarev_intertwines(n, t, s):
    zf = zolotarev(n, t)
    # Z_n(x(u | n t)) = x(u | t) on the real axis
    u = math.tanh(s)
    x = x_map(u, zf.mod_big).real
    assert abs(eval_Z(zf, x) - x_map(u, zf.mod_small).real) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.floats(0.2, 0.8), st.floats(-3, 3))
def test_zolotarev_odd(n, t, x):
    zf = zolotarev(n, t)
    a, b = eval_Z(zf, x), eval_Z(zf, -x)
    if math.isfinite(a):
        assert abs(a + b) < 1e-9 * (1 + abs(a))


endpoints = st.lists(st.floats(-50, 50, allow_nan=False), min_size=6, max_size=6, unique=True)


@given(endpoints, st.floats(0.5, 3), st.floats(-2, 2))
def test_cross_ratios_invariant(pts, a, b):
    p = sorted(pts)
    if min(np.diff(p)) < 1e-3:
        return
    bands = BandSystem((p[0], p[1]), (p[2], p[3]), (p[4], p[5]))
    moved = bands.apply(Mobius(a, b, 0.0, 1.0))
    assert np.allclose(moved.cross_ratios(), bands.cross_ratios(), atol=1e-9)


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3, unique=True),
       st.lists(st.floats(-5, 5), min_size=3, max_size=3, unique=True))
def test_mobius_to_hits_targets(src, dst):
    src, dst = sorted(src), sorted(dst)
    if min(np.diff(src)) < 1e-2 or min(np.diff(dst)) < 1e-2:
        return
    mob = mobius_to(*src, *dst)
    for s, d in zip(src, dst):
        assert abs(mob(s) - d) < 1e-8 * (1 + abs(d))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3),
       st.lists(st.floats(-0.4, 0.4), min_size=2, max_size=2))
def test_rational_fit_recovers_degree_two(num, den):
    rf = RationalFunction(tuple(num), (1.0, den[0], den[1]))
    xs = np.linspace(-1, 1, 30)
    ys = rf(xs)
    _, resid = rational_fit(np.column_stack([xs, ys]), 2)
    assert resid < 1e-8


@given(st.floats(-0.9, 0.9))
def test_sup_error_of_constants(c):
    bands = BandSystem((-3.0, -1.0), (1.0, 2.0), (3.0, 4.0))
    assert abs(sup_error(lambda x: np.full_like(x, c), bands) - (1 + abs(c))) < 1e-15


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
records = st.recursive(st.none() | st.booleans() | finite | st.integers(-10**6, 10**6) | st.text(max_size=5),
                       lambda kids: st.lists(kids, max_size=4) | st.dictionaries(st.text(max_size=4), kids, max_size=4),
                       max_leaves=12)


@given(records)
def test_json_round_trip(obj):
    assert json.loads(dumps(obj)) == obj
