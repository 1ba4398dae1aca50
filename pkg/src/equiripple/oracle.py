"""Brute-force minimax rational approximation of a band indicator on a grid.

Differential correction: each step solves a small linear program with a
dense two-phase simplex (Bland's rule), so the iteration is independent of
the elliptic machinery it is used to check.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .bands import BandSystem
from .rational import RationalFunction

log = logging.getLogger(__name__)

_EPS = 1e-9


class LPError(RuntimeError):
    pass


def simplex(c, A, b, *, max_pivots: int = 20000):
    """Minimize ``c @ y`` subject to ``A @ y = b``, ``y >= 0``.

    Two-phase revised simplex on a dense constraint matrix with Bland's
    anti-cycling rule; the basis is refactored at every pivot, which is cheap
    because the row count stays small here.  Returns ``(y, basis)`` and raises
    ``LPError`` when infeasible or unbounded.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    # a small staggered right-hand-side shift keeps pivots off degenerate vertices
    shift = 1e-9 * (1.0 + np.abs(b).max()) * (1.0 + np.arange(m)) / m
    full = np.hstack([A, np.eye(m)])
    cost1 = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    basis = _revised_loop(full, b + shift, cost1, basis, n + m, max_pivots)
    xB = np.linalg.solve(full[:, basis], b)
    if cost1[basis] @ xB > 1e-9 * max(1.0, np.abs(b).max()):
        raise LPError("linear program is infeasible")
    # drive artificials out; rows where that is impossible are redundant
    rows = list(range(m))
    for r in range(m):
        if basis[r] < n:
            continue
        Binv_row = np.linalg.solve(full[:, basis].T, np.eye(m)[r])
        cand = [j for j in range(n) if j not in basis and abs(Binv_row @ A[:, j]) > _EPS]
        if cand:
            basis[r] = cand[0]
        else:
            rows.remove(r)
    keep = [k for k in range(m) if k in rows]
    A, b, shift = A[keep], b[keep], shift[keep]
    basis = [basis[k] for k in keep]
    basis = _revised_loop(A, b + shift, c, basis, n, max_pivots)
    y = np.zeros(n)
    y[basis] = np.linalg.solve(A[:, basis], b)
    return y, basis


def _revised_loop(A, b, cost, basis, ncols, max_pivots):
    tol = _EPS * max(1.0, float(np.abs(cost).max()))
    for _ in range(max_pivots):
        B = A[:, basis]
        xB = np.linalg.solve(B, b)
        pi = np.linalg.solve(B.T, cost[basis])
        d = cost[:ncols] - A[:, :ncols].T @ pi
        d[[j for j in basis if j < ncols]] = 0.0
        entering = np.flatnonzero(d < -tol)
        if len(entering) == 0:
            return basis
        j = int(entering[0])
        u = np.linalg.solve(B, A[:, j])
        rows = np.flatnonzero(u > _EPS)
        if len(rows) == 0:
            raise LPError("linear program is unbounded")
        ratios = np.maximum(xB[rows], 0.0) / u[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        r = int(min(ties, key=lambda k: basis[k]))
        basis[r] = j
    raise LPError("simplex pivot limit reached")


def linprog_ineq(c, A_ub, b_ub):
    """Minimize ``c @ v`` over free ``v`` with ``A_ub @ v <= b_ub``, via the dual in standard form."""
    A_ub = np.asarray(A_ub, dtype=float)
    b_ub = np.asarray(b_ub, dtype=float)
    c = np.asarray(c, dtype=float)
    # dual: min b @ y  s.t.  A^T y = -c, y >= 0; the primal point is the dual's multiplier vector
    y, basis = simplex(b_ub, A_ub.T, -c)
    B = A_ub.T[:, basis]
    v = np.linalg.lstsq(B.T, b_ub[basis], rcond=None)[0]
    return v


@dataclass
class GridProblem:
    """Discretized bands: points, band tags, targets and degree."""

    grid: np.ndarray
    tags: np.ndarray
    target: np.ndarray
    n: int
    weights: np.ndarray | None = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.tags = np.asarray(self.tags, dtype=int)
        self.target = np.asarray(self.target, dtype=float)
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        for tag in np.unique(self.tags):
            if np.count_nonzero(self.tags == tag) < 8 * (self.n + 1):
                raise ValueError(f"band {tag} needs at least {8 * (self.n + 1)} points")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float)
            if np.any(self.weights <= 0):
                raise ValueError("weights must be positive")

    @classmethod
    def from_bands(cls, intervals, targets, n: int, per_band: int | None = None):
        """Chebyshev-extremal points (endpoints included) on each interval."""
        per_band = per_band or 16 * (n + 1)
        xs, tags, ts = [], [], []
        for tag, ((a, b), s) in enumerate(zip(intervals, targets)):
            k = np.arange(per_band)
            pts = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * k / (per_band - 1))
            xs.append(pts)
            tags.append(np.full(per_band, tag))
            ts.append(np.full(per_band, float(s)))
        x = np.concatenate(xs)
        order = np.argsort(x)
        return cls(x[order], np.concatenate(tags)[order], np.concatenate(ts)[order], n)

    @classmethod
    def from_band_system(cls, bands: BandSystem, n: int, per_band: int | None = None):
        return cls.from_bands(bands.bands, bands.targets, n, per_band)


@dataclass
class OracleResult:
    rational: RationalFunction
    mu_grid: float
    deltas: list
    converged: bool


def _cheb_matrix(y, n):
    return np.polynomial.chebyshev.chebvander(y, n)


def differential_correction(gp: GridProblem, max_iter: int = 60, *, tol: float = 1e-9,
                            qmin: float = 1e-6) -> OracleResult:
    """Grid minimax rational of type ``(n, n)`` for the targets of ``gp``.

    Each step minimizes ``z`` subject to
    ``|p - f q| - delta_k q <= z q_k`` at every grid point, with Chebyshev
    coefficients of ``q`` bounded by 1 and ``q >= qmin`` on the grid.  The
    deviations ``delta_k`` are non-increasing; this is asserted.
    """
    n = gp.n
    if n > 6:
        raise ValueError("the oracle is meant for n <= 6")
    x, f = gp.grid, gp.target
    w = gp.weights if gp.weights is not None else np.ones_like(x)
    shift = 0.5 * (x[0] + x[-1])
    scale = max(0.5 * (x[-1] - x[0]), 1e-300)
    V = _cheb_matrix((x - shift) / scale, n)
    N = len(x)
    pc = np.zeros(n + 1)
    qc = np.zeros(n + 1)
    qc[0] = 1.0
    q_k = V @ qc
    delta = float(np.max(w * np.abs(V @ pc / q_k - f)))
    deltas = [delta]
    converged = False
    for it in range(max_iter):
        # variables: p (n+1), q (n+1), z
        nv = 2 * n + 3
        rows, rhs = [], []
        for sgn in (1.0, -1.0):
            blk = np.zeros((N, nv))
            blk[:, :n + 1] = sgn * V * w[:, None]
            blk[:, n + 1:2 * n + 2] = (-sgn * f[:, None] * w[:, None] - delta) * V
            blk[:, -1] = -q_k
            rows.append(blk)
            rhs.append(np.zeros(N))
        pos = np.zeros((N, nv))
        pos[:, n + 1:2 * n + 2] = -V
        rows.append(pos)
        rhs.append(np.full(N, -qmin))
        box = np.zeros((2 * (n + 1), nv))
        box[: n + 1, n + 1:2 * n + 2] = np.eye(n + 1)
        box[n + 1:, n + 1:2 * n + 2] = -np.eye(n + 1)
        rows.append(box)
        rhs.append(np.ones(2 * (n + 1)))
        zrow = np.zeros((1, nv))
        zrow[0, -1] = -1.0
        rows.append(zrow)
        rhs.append(np.array([1.0]))
        A = np.vstack(rows)
        b = np.concatenate(rhs)
        c = np.zeros(nv)
        c[-1] = 1.0
        v = linprog_ineq(c, A, b)
        z = v[-1]
        if z > -tol:
            converged = True
            break
        p_new, q_new = v[:n + 1], v[n + 1:2 * n + 2]
        qv = V @ q_new
        if np.any(qv <= 0):
            raise LPError("denominator lost positivity on the grid")
        d_new = float(np.max(w * np.abs(V @ p_new / qv - f)))
        assert d_new <= delta + 1e-12, "differential correction deviation increased"
        improved = delta - d_new
        pc, qc, q_k, delta = p_new, q_new, qv, d_new
        deltas.append(delta)
        log.debug("differential correction step %d: delta %.12g", it, delta)
        if improved < tol * max(1.0, delta):
            converged = True
            break
    cheb2poly = np.polynomial.chebyshev.cheb2poly
    rf = RationalFunction(tuple(cheb2poly(pc)), tuple(cheb2poly(qc)), shift, scale)
    return OracleResult(rf, delta, deltas, converged)


@dataclass
class Comparison:
    mu_constructed: float
    mu_grid: float
    alternation_count: int
    local_opt: bool
    consistent: bool
    grid_tolerance: float

    def to_dict(self):
        return dict(self.__dict__)


def validate_against(sol, bands: BandSystem, n: int, *, grid_tolerance: float = 2e-3,
                     per_band: int | None = None) -> Comparison:
    """Compare a constructed solution with the grid oracle on the same bands.

    ``consistent`` holds when the grid optimum does not exceed the
    constructed deviation by more than ``grid_tolerance``.
    """
    from .verify import alternation_points, sup_error

    if n > 4:
        raise ValueError("oracle comparison is meant for n <= 4")
    R = sol.approximant
    mu_c = sup_error(R, bands)
    alt = alternation_points(R, bands, mu_c)
    res = differential_correction(GridProblem.from_band_system(bands, n, per_band))
    return Comparison(mu_constructed=mu_c, mu_grid=res.mu_grid, alternation_count=alt.count,
                      local_opt=alt.count == 2 * n + 2,
                      consistent=res.mu_grid <= mu_c + grid_tolerance,
                      grid_tolerance=grid_tolerance)
