import math

import numpy as np
import pytest

from conftest import forward, report
from equiripple.bands import BandSystem
from equiripple.rational import FitError, RationalFunction
from equiripple.solutions import GENUS1, GENUS2, OCTAGON, TWOSLIT, forward_construct
from equiripple.verify import (VerificationReport, alternation_points, check_theorem1,
                               extended_bands, extremality_number, rational_fit, sup_error,
                               topological_class, verify_solution)
from equiripple.zolotarev import as_rational, genus1_three_band, rescaled_solution, zolotarev

BANDS = BandSystem((-3.0, -1.0), (1.0, 2.0), (3.0, 4.0))


def _scaled_zolotarev(n, t):
    zf = zolotarev(n, t)
    scale, mu = rescaled_solution(zf)
    rf = as_rational(zf)
    return zf, RationalFunction(tuple(scale * c for c in rf.numerator), rf.denominator,
                                rf.shift, rf.scale), mu


def test_sup_error_basics():
    assert sup_error(lambda x: np.zeros_like(x), BANDS) == 1.0
    with pytest.raises(ValueError):
        sup_error(lambda x: np.zeros_like(x), BANDS, grid_density=32)
    # a pole inside the passband
    assert sup_error(lambda x: 1.0 / (np.asarray(x) - 1.5), BANDS) == math.inf


def test_sup_error_grid_refinement():
    sol, bands = forward(GENUS2)
    a = sup_error(sol.approximant, bands, 64)
    b = sup_error(sol.approximant, bands, 128)
    assert abs(a - b) < 1e-10


def test_constant_function_alternation():
    alt = alternation_points(lambda x: np.zeros_like(x), BANDS, 1.0)
    assert alt.count <= 2


def test_topological_class_requires_small_deviation():
    rf = RationalFunction((0.0,), (1.0,))
    with pytest.raises(ValueError):
        topological_class(rf, BANDS)


def test_topological_class_sum_rule(family):
    sol, _ = forward(family)
    sigma = report(family).sigma
    assert sum(sigma) % 2 == sol.n % 2


@pytest.mark.parametrize("n", [3, 4])
def test_extremality_of_zolotarev(n):
    zf, rf, _ = _scaled_zolotarev(n, 0.4)
    assert extremality_number(rf, zf.mod_small, scale=rescaled_solution(zf)[0]) == 1


@pytest.mark.parametrize("fam,g", [(GENUS2, 2), (TWOSLIT, 3), (OCTAGON, 3)])
def test_extremality_of_families(fam, g):
    assert report(fam).extremality == g


def test_extended_bands_shapes(family):
    rep = report(family)
    sol, bands = forward(family)
    segs = rep.extended_segments
    expected = {GENUS1: 2, GENUS2: 3}.get(family, 4)
    assert len(segs) == expected
    for a, b in bands.bands:
        assert any(s[0] <= a + 1e-9 and b - 1e-9 <= s[1] for s in segs)


def test_genus1_lacuna_disappears():
    rep = report(GENUS1)
    _, bands = forward(GENUS1)
    segs = sorted(rep.extended_segments)
    assert segs[1][0] == pytest.approx(bands.e1plus[0], abs=1e-9)
    assert segs[1][1] == pytest.approx(bands.e2plus[1], abs=1e-9)


def test_stiefel_moves_one_lacuna_end():
    sol, bands = forward_construct(GENUS2, 0.4, 5, 2, {"h": 0.3, "v": 2.5})
    rep = verify_solution(sol, bands)
    assert len(rep.extended_segments) == 3
    lo, hi = bands.gaps["T12"]
    segs = rep.extended_segments
    right_of_e1 = next(b for a, b in segs if a <= bands.e1plus[0] + 1e-9 <= b)
    left_of_e2 = next(a for a, b in segs if a <= bands.e2plus[1] - 1e-9 <= b)
    moved = [abs(right_of_e1 - lo) > 1e-9, abs(left_of_e2 - hi) > 1e-9]
    assert moved.count(True) == 1
    assert lo <= right_of_e1 and left_of_e2 <= hi and right_of_e1 < left_of_e2


def test_theorem1_violation_detected():
    # the rescaled Z_4 on a shrunken stopband: the removed piece reappears inside T1
    zf = zolotarev(4, 0.4)
    full = genus1_three_band(zf, 1, 1.3, 1.7)
    cut = -1.0 - 0.3 * (full.eminus[1] - full.eminus[0])
    bands = BandSystem((full.eminus[0], cut), full.e1plus, full.e2plus)
    scale, _ = rescaled_solution(zf)
    R = lambda x: scale * zf(np.asarray(x, dtype=float))
    ext = extended_bands(R, bands, rf=as_rational(zf))
    assert not check_theorem1(ext, bands)
    assert check_theorem1([tuple(b) for b in bands.bands], bands)


def test_rational_fit_exact_and_overfit():
    rf = RationalFunction((0.3, -1.0, 0.5), (1.0, 0.2, 0.4))
    xs = np.linspace(-2, 2, 30)
    fit, resid = rational_fit(np.column_stack([xs, rf(xs)]), 2)
    assert resid < 1e-9
    higher = RationalFunction((0.3, -1.0, 0.5, 0.7), (1.0, 0.2, 0.4, 0.1))
    xs = np.linspace(-1, 1, 40)
    _, resid = rational_fit(np.column_stack([xs, higher(xs)]), 2)
    assert resid > 1e-5
    with pytest.raises(FitError):
        rational_fit(np.column_stack([xs[:4], higher(xs[:4])]), 2)


def test_rational_fit_zolotarev_samples():
    zf = zolotarev(5, 0.3)
    xs = np.linspace(-2.5, 2.5, 28)
    ys = zf(xs)
    keep = np.abs(ys) < 1e8
    _, resid = rational_fit(np.column_stack([xs[keep], ys[keep]]), 5)
    assert resid < 1e-7


def test_report_round_trip():
    rep = report(GENUS2)
    back = VerificationReport.from_dict(rep.to_dict())
    assert back.to_dict() == rep.to_dict()
    assert rep.alternation_count == len(rep.alternation_points)
    assert all(a != b for a, b in zip(rep.alternation_signs, rep.alternation_signs[1:]))
