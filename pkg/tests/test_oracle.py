import numpy as np
import pytest
from scipy.optimize import linprog

from equiripple.bands import BandSystem
from equiripple.oracle import (GridProblem, LPError, differential_correction, linprog_ineq,
                               simplex, validate_against)
from equiripple.solutions import GENUS2, forward_construct
from equiripple.zolotarev import rescaled_solution, zolotarev, zolotarev_bands


@pytest.mark.parametrize("seed", range(5))
def test_inequality_lp_matches_scipy(seed):
    rng = np.random.default_rng(seed)
    m, n = 14, 4
    A = rng.normal(size=(m, n))
    x0 = rng.normal(size=n)
    b = A @ x0 + rng.uniform(0.1, 1.0, m)
    A = np.vstack([A, np.eye(n), -np.eye(n)])
    b = np.concatenate([b, np.full(2 * n, 5.0)])
    c = rng.normal(size=n)
    ours = linprog_ineq(c, A, b)
    ref = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
    assert c @ ours == pytest.approx(ref.fun, abs=1e-8)
    assert np.all(A @ ours <= b + 1e-8)


def test_simplex_infeasible():
    with pytest.raises(LPError):
        simplex([1.0, 1.0], [[1.0, 1.0]], [-1.0])


def _zolotarev_grid(n, t, per_band=None):
    em, ep = zolotarev_bands(zolotarev(n, t))
    return GridProblem.from_bands([em, ep], [-1.0, 1.0], n, per_band)


def test_constant_approximation():
    em, ep = zolotarev_bands(zolotarev(2, 0.6))
    res = differential_correction(GridProblem.from_bands([em, ep], [-1.0, 1.0], 0))
    assert res.mu_grid == pytest.approx(1.0, abs=1e-9)


def test_zolotarev_n2():
    res = differential_correction(_zolotarev_grid(2, 0.6))
    _, mu = rescaled_solution(zolotarev(2, 0.6))
    assert abs(res.mu_grid - mu) < 2e-3
    assert res.mu_grid <= mu + 1e-12
    assert all(b <= a + 1e-12 for a, b in zip(res.deltas, res.deltas[1:]))
    x = np.linspace(1.0, zolotarev(2, 0.6).mod_big.kinv, 50)
    assert np.all(np.real(res.rational(x)) > 0)


def test_nested_grid_never_lowers_mu():
    coarse = _zolotarev_grid(2, 0.5)
    extra = np.linspace(coarse.grid[0], coarse.grid[-1], 400)
    bands = BandSystem((coarse.grid[0], -1.0), (1.0, 0.5 * (1 + coarse.grid[-1])),
                       (np.nextafter(0.5 * (1 + coarse.grid[-1]), 2.0), coarse.grid[-1]))
    extra = extra[bands.contains(extra)]
    x = np.union1d(coarse.grid, extra)
    s = np.where(x < 0, -1.0, 1.0)
    fine = GridProblem(x, (s > 0).astype(int), s, 2)
    assert differential_correction(fine).mu_grid >= differential_correction(coarse).mu_grid - 1e-9


def test_refinement_invariance():
    a = differential_correction(_zolotarev_grid(2, 0.5)).mu_grid
    b = differential_correction(_zolotarev_grid(2, 0.5, per_band=96)).mu_grid
    assert abs(a - b) < 1e-3


def test_grid_validation():
    with pytest.raises(ValueError):
        _zolotarev_grid(2, 0.5, per_band=10)
    with pytest.raises(ValueError):
        differential_correction(_zolotarev_grid(7, 0.5))


def test_perturbed_solution_loses_local_optimality():
    sol, bands = forward_construct(GENUS2, 0.5, 3, 1, {"h": 0.2, "v": 1})
    good = validate_against(sol, bands, 3)
    assert good.local_opt and good.consistent
    moved, _ = forward_construct(GENUS2, 0.5, 3, 1, {"h": 0.21, "v": 1})
    bad = validate_against(moved, bands, 3)
    assert not bad.local_opt
