"""Three-band equiripple solutions: forward construction, evaluation and design.

A solution is stored as the polygon map ``x -> zeta(x)`` of a rectilinear
Schwarz-Christoffel problem; the approximant is ``R(x) = x_map(zeta(x))``
scaled by ``2k/(k+1)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import elliptic
from .bands import BandError, BandSystem, Mobius, cross_ratio, mobius_to, normalize_bands
from .conformal import (ConformalError, HyperellipticData, PolygonSpec, _normalize_scale,
                        sc_solve_forward, segment_integral)
from .zolotarev import eval_Z, zolotarev

log = logging.getLogger(__name__)

GENUS1 = "Genus1Zolotarev"
GENUS2 = "Genus2Stiefel"
TWOSLIT = "Genus3TwoSlit"
OCTAGON = "Genus3Octagon"
DECAGON_PLUS = "Genus3DecagonPlus"
DECAGON_MINUS = "Genus3DecagonMinus"
FAMILIES = (GENUS1, GENUS2, TWOSLIT, OCTAGON, DECAGON_PLUS, DECAGON_MINUS)

_POLYGON = {GENUS2: "SlitRect", TWOSLIT: "TwoSlitRect", OCTAGON: "BranchedOctagon",
            DECAGON_PLUS: "DecagonPlus", DECAGON_MINUS: "DecagonMinus"}
_GENUS = {GENUS1: 1, GENUS2: 2}

# parameter names per family, in the order used by design
PARAMS = {GENUS1: ("t", "v1", "v2"), GENUS2: ("t", "h", "v"), TWOSLIT: ("t", "h1", "h2"),
          OCTAGON: ("t", "c_re", "c_im"), DECAGON_PLUS: ("t", "h1", "h2"),
          DECAGON_MINUS: ("t", "h1", "h2")}


class DesignError(RuntimeError):
    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals or {}


IDENTITY = Mobius(1.0, 0.0, 0.0, 1.0)


def family_genus(family: str) -> int:
    return _GENUS.get(family, 3)


def family_sigma(family: str, n: int) -> tuple:
    if family in (GENUS1, GENUS2, TWOSLIT):
        return (1, 0, (n + 1) % 2)
    return (1, 1, n % 2)


def phase_shift(anchor_value: float, mod: elliptic.EllipticModulus) -> complex:
    """Rectangle offset ``A`` with ``x_map(A) = anchor_value``."""
    v = float(anchor_value)
    tol = 1e-9 * (1 + abs(v))
    for target, off in ((1.0, 1.0), (-1.0, -1.0), (mod.kinv, complex(1.0, mod.t)),
                        (-mod.kinv, complex(-1.0, mod.t))):
        if abs(v - target) <= tol:
            return complex(off)
    raise ValueError(f"anchor value {v} is not one of +-1, +-1/k")


@dataclass
class FilterSolution:
    """Chebyshev Ansatz ``R(x) = x_map(A + int_anchor^x dzeta)`` for one family.

    ``prevertices`` and ``corners`` list the boundary critical points in
    increasing order with their polygon coordinates.  ``chart`` maps the
    user's coordinate to the construction chart.
    """

    family: str
    n: int
    m: int
    mod: elliptic.EllipticModulus
    hd: HyperellipticData
    params: dict
    bands: BandSystem
    prevertices: list = field(default_factory=list)
    corners: list = field(default_factory=list)
    phase: complex = -1.0
    anchor: float = -1.0
    chart: Mobius = IDENTITY

    @property
    def t(self) -> float:
        return self.mod.t

    @property
    def genus(self) -> int:
        return family_genus(self.family)

    @property
    def sigma(self) -> tuple:
        return family_sigma(self.family, self.n)

    @property
    def mu(self) -> float:
        k = self.mod.k
        return (1 - k) / (1 + k)

    @property
    def scale(self) -> float:
        k = self.mod.k
        return 2 * k / (1 + k)

    @property
    def user_bands(self) -> BandSystem:
        """Bands in the user's chart."""
        if self.chart == IDENTITY:
            return self.bands
        inv = _inverse(self.chart)
        return self.bands.apply(inv)

    def __call__(self, x):
        return eval_solution(self, x)

    def approximant(self, x):
        """Rescaled function ``2k/(k+1) R`` whose deviation from the target is ``mu``."""
        return self.scale * eval_solution(self, x)

    def to_dict(self):
        return {
            "family": self.family, "n": self.n, "m": self.m, "t": self.t,
            "params": dict(self.params), "sigma": list(self.sigma), "mu": self.mu,
            "scale": self.scale, "genus": self.genus,
            "phase": [self.phase.real, self.phase.imag], "anchor": self.anchor,
            "branchpoints": list(self.hd.branchpoints),
            "zeros": [list(z) if isinstance(z, tuple) else z for z in self.hd.zeros],
            "differential_scale": self.hd.scale,
            "prevertices": list(self.prevertices),
            "corners": [[z.real, z.imag] for z in self.corners],
            "bands": self.bands.to_dict(),
            "chart": [self.chart.a, self.chart.b, self.chart.c, self.chart.d],
        }

    @classmethod
    def from_dict(cls, d):
        zeros = tuple(tuple(z) if isinstance(z, list) else z for z in d["zeros"])
        hd = HyperellipticData(tuple(d["branchpoints"]), zeros, d["differential_scale"])
        return cls(family=d["family"], n=int(d["n"]), m=int(d["m"]),
                   mod=elliptic.modulus_from_t(d["t"]), hd=hd, params=dict(d["params"]),
                   bands=BandSystem.from_dict(d["bands"]),
                   prevertices=list(d["prevertices"]),
                   corners=[complex(a, b) for a, b in d["corners"]],
                   phase=complex(*d["phase"]), anchor=d["anchor"], chart=Mobius(*d["chart"]))


def _inverse(mob: Mobius) -> Mobius:
    return Mobius(mob.d, -mob.b, -mob.c, mob.a)


# ---------------------------------------------------------------------------
# evaluation

def _zeta_on_side(hd, x0, z0, x1, z1, xs):
    """Polygon coordinates of sorted points ``xs`` on the side from ``(x0, z0)`` to ``(x1, z1)``.

    ``x1 < x0`` marks the side through infinity.  Points are reached by
    accumulating short integrals from the nearer corner.
    """
    d = z1 - z0
    u = d / abs(d)
    out = np.empty(len(xs), dtype=complex)
    if x1 < x0:
        right = [i for i, x in enumerate(xs) if x > x0]
        left = [i for i, x in enumerate(xs) if x <= x0]
        acc, prev = 0.0, x0
        for i in right:
            acc += segment_integral(hd, prev, xs[i])
            prev = xs[i]
            out[i] = z0 + u * acc
        acc, prev = 0.0, x1
        for i in reversed(left):
            acc += segment_integral(hd, xs[i], prev)
            prev = xs[i]
            out[i] = z1 - u * acc
        return out
    mid = 0.5 * (x0 + x1)
    acc, prev = 0.0, x0
    for i, x in enumerate(xs):
        if x > mid:
            break
        acc += segment_integral(hd, prev, x) if x > prev else 0.0
        prev = x
        out[i] = z0 + u * acc
    acc, prev = 0.0, x1
    for i in range(len(xs) - 1, -1, -1):
        x = xs[i]
        if x <= mid:
            break
        acc += segment_integral(hd, x, prev) if x < prev else 0.0
        prev = x
        out[i] = z1 - u * acc
    return out


def boundary_zeta(sol: FilterSolution, x):
    """Polygon coordinate ``A + int_anchor^x dzeta`` of real points in the construction chart."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.shape, dtype=complex)
    pv = sol.prevertices
    zs = sol.corners
    order = np.argsort(x)
    xs = x[order]
    res = np.empty(len(xs), dtype=complex)
    L = len(pv)
    # side j runs from pv[j] to pv[j+1]; the last wraps through infinity
    idx = np.searchsorted(pv, xs, side="right") - 1
    buckets = {}
    for i, j in enumerate(idx):
        j = L - 1 if j < 0 else j
        buckets.setdefault(int(j), []).append(i)
    for j, members in buckets.items():
        k = (j + 1) % L
        pts = [xs[i] for i in members]
        if j == L - 1:
            # ordered by position along the side: right tail first, then left tail
            tails = sorted(range(len(pts)), key=lambda i: (pts[i] < pv[-1], pts[i]))
            vals = _zeta_on_side(sol.hd, pv[j], zs[j], pv[k], zs[k], [pts[i] for i in tails])
            for pos, i in enumerate(tails):
                res[members[i]] = vals[pos]
        else:
            vals = _zeta_on_side(sol.hd, pv[j], zs[j], pv[k], zs[k], pts)
            for i, v in zip(members, vals):
                res[i] = v
    out[order] = res
    return sol.phase - _anchor_zeta(sol) + out


def _anchor_zeta(sol):
    j = int(np.argmin([abs(p - sol.anchor) for p in sol.prevertices]))
    return sol.corners[j]


def eval_solution(sol: FilterSolution, x):
    """Ansatz value ``R(x)`` at real ``x`` (user chart); poles give ``inf``."""
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if sol.chart != IDENTITY:
        xa = np.array([sol.chart(v) for v in xa])
    if sol.family == GENUS1:
        zf = zolotarev(sol.n, sol.t)
        vals = np.array([eval_Z(zf, v) for v in xa], dtype=float)
        if sol.phase.real > 0:
            vals = -vals
    else:
        finite = np.isfinite(xa)
        vals = np.empty(xa.shape)
        if np.any(finite):
            zeta = boundary_zeta(sol, xa[finite])
            r = np.array([elliptic.x_map(z, sol.mod) for z in zeta])
            r = np.where(np.abs(r) > 1e15, math.inf, r.real)
            vals[finite] = r
        if np.any(~finite):
            vals[~finite] = _value_at_infinity(sol)
    return float(vals[0]) if scalar else vals


def _value_at_infinity(sol):
    # infinity is the midpoint of the top side
    j = len(sol.prevertices) - 2
    z = 0.5 * (sol.corners[j] + sol.corners[j + 1]) + sol.phase - _anchor_zeta(sol)
    v = elliptic.x_map(z, sol.mod)
    return math.inf if abs(v) > 1e15 else v.real


# ---------------------------------------------------------------------------
# forward construction

def _spec(family, t, n, m, extra):
    poly = _POLYGON[family]
    if family == GENUS2:
        return PolygonSpec(poly, t, n, m, h=extra["h"])
    if family == OCTAGON:
        return PolygonSpec(poly, t, n, m, c=complex(extra["c_re"], extra["c_im"]))
    return PolygonSpec(poly, t, n, m, h1=extra["h1"], h2=extra["h2"])


def _wall_point(hd, x0, z0, x1, z1, target):
    """Point between corners ``x0 < x1`` whose polygon coordinate is ``target``."""
    frac = abs(target - z0) / abs(z1 - z0)
    if frac <= 0:
        return x0
    if frac >= 1:
        return x1
    total = abs(z1 - z0)
    f = lambda x: segment_integral(hd, x0, x) - frac * total
    return brentq(f, x0, x1, xtol=1e-15 * (1 + abs(x1)), rtol=1e-15, maxiter=200)


def _bands_from_polygon(family, sc, extra):
    xs = sc.prevertices
    zs = [z for _, z in sc.spec.vertices()]
    t, m = sc.spec.t, sc.spec.m
    eminus = (xs[-1], -1.0)
    if family == GENUS2:
        v = extra["v"]
        if v >= m:
            e1 = (1.0, xs[2])
            x = xs[5] if v == sc.spec.n else _wall_point(sc.hd, xs[4], zs[4], xs[5], zs[5], complex(1, v * t))
            e2 = (x, xs[5])
        else:
            x = _wall_point(sc.hd, xs[1], zs[1], xs[2], zs[2], complex(1, v * t))
            e1 = (1.0, x)
            e2 = (xs[4], xs[5])
        return BandSystem(eminus, e1, e2)
    if family == TWOSLIT:
        return BandSystem(eminus, (1.0, xs[2]), (xs[7], xs[8]))
    if family == OCTAGON:
        return BandSystem(eminus, (1.0, xs[2]), (xs[5], xs[6]))
    return BandSystem(eminus, (1.0, xs[2]), (xs[7], xs[8]))


def _check_extra(family, n, m, extra):
    need = PARAMS[family][1:]
    missing = [k for k in need if k not in extra]
    if missing:
        raise ValueError(f"{family} needs parameters {', '.join(need)}; missing {', '.join(missing)}")
    if family == GENUS2:
        v = extra["v"]
        if not (0 < v <= n and abs(v - m) <= 1):
            raise ValueError(f"v must satisfy 0 < v <= n and |v - m| <= 1, got v={v}")
        if v == n and m != n - 1:
            raise ValueError("v = n needs m = n - 1")


def forward_construct(family: str, t: float, n: int, m: int, extra: dict | None = None,
                      *, x0=None, continuation: bool = True) -> tuple[FilterSolution, BandSystem]:
    """Build the solution of ``family`` from its polygon parameters.

    ``extra`` holds ``h, v`` (Genus2Stiefel), ``h1, h2`` (TwoSlit and the
    decagons), ``c_re, c_im`` (Octagon) or ``v1, v2`` (Genus1Zolotarev).
    """
    extra = dict(extra or {})
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n, m = int(n), int(m)
    _check_extra(family, n, m, extra)
    mod = elliptic.modulus_from_t(t)
    if family == GENUS1:
        from .zolotarev import genus1_three_band

        zf = zolotarev(n, t)
        bands = genus1_three_band(zf, m, extra["v1"], extra["v2"])
        kb = zf.mod_big.kinv
        hd = _normalize_scale(HyperellipticData((-kb, -1.0, 1.0, kb)))
        N = complex(0, n * t)
        sol = FilterSolution(family, n, m, mod, hd, {"t": t, **extra}, bands,
                             prevertices=[-kb, -1.0, 1.0, kb],
                             corners=[-1 + N, -1 + 0j, 1 + 0j, 1 + N])
        return sol, bands
    spec = _spec(family, t, n, m, extra)
    sc = sc_solve_forward(spec, x0=x0, continuation=continuation)
    bands = _bands_from_polygon(family, sc, extra)
    xs = sc.prevertices
    zs = [z for _, z in spec.vertices()]
    order = np.argsort(xs)
    sol = FilterSolution(family, n, m, mod, sc.hd, {"t": t, **extra}, bands,
                         prevertices=[float(xs[i]) for i in order],
                         corners=[complex(zs[i]) for i in order])
    sol.sc = sc
    return sol, bands


# ---------------------------------------------------------------------------
# classification and design

def classify(bands: BandSystem, n: int, sigma) -> list:
    """Candidate families for class ``sigma``, most likely first."""
    s = tuple(int(v) % 2 for v in sigma)
    if len(s) != 3:
        raise ValueError("sigma must have three components")
    if sum(s) % 2 != n % 2:
        raise ValueError(f"sigma components must sum to n mod 2, got {s} with n={n}")
    if s == (1, 0, (n + 1) % 2):
        out = [GENUS2, GENUS1, TWOSLIT]
    elif s == (1, 1, n % 2):
        out = [OCTAGON, DECAGON_PLUS, DECAGON_MINUS]
    else:
        return []
    return [f for f in out if _level_range(f, n)]


def _level_range(family, n):
    if family == GENUS1:
        return list(range(0, n))
    if family == GENUS2:
        return list(range(1, n))
    if family in (TWOSLIT, OCTAGON, DECAGON_PLUS):
        return list(range(1, n - 1))
    return list(range(0, n - 2))


def _genus1_estimate(bands: BandSystem, n: int):
    """``t`` and lacuna height from the two-band Zolotarev fit to the band hull."""
    p = bands.endpoints
    target = cross_ratio(p[0], p[1], p[2], p[5])

    def cr(tb):
        kb = elliptic.modulus_from_t(tb).kinv
        return cross_ratio(-kb, -1.0, 1.0, kb)

    # cross ratio grows with the big-rectangle height; bracket in log space
    lo, hi = 1e-3, 30.0
    f = lambda lt: math.log(cr(math.exp(lt))) - math.log(target)
    try:
        tb = math.exp(brentq(f, math.log(lo), math.log(hi), xtol=1e-14))
    except ValueError:
        tb = n * 0.5
    zf = zolotarev(n, tb / n)
    kb = zf.mod_big.kinv
    mob = mobius_to(p[0], p[1], p[2], -kb, -1.0, 1.0)
    heights = []
    for q in (p[3], p[4]):
        y = mob(q)
        u = elliptic.inverse_x(complex(min(max(y, 1.0), kb)), zf.mod_big)
        heights.append(u.imag / (tb / n))
    return tb / n, heights


def _initial(family, t0, m, heights):
    if family == GENUS1:
        return [t0, max(m + 0.25, min(heights[0], m + 0.5)), min(m + 0.75, max(heights[1], m + 0.5))]
    if family == GENUS2:
        return [t0, 0.0, float(m)]
    if family == OCTAGON:
        return [t0, 0.0, (m + 0.5) * t0]
    if family == DECAGON_PLUS or family == DECAGON_MINUS:
        return [t0, -0.3, 0.3]
    return [t0, 0.0, 0.0]


def _extra_from(family, p):
    names = PARAMS[family][1:]
    return {k: float(v) for k, v in zip(names, p[1:])}


def _project(family, m, n, p, variant):
    p = list(p)
    p[0] = max(p[0], 1e-3)
    if family == GENUS1:
        p[1] = min(max(p[1], m + 1e-6), m + 1 - 2e-6)
        p[2] = min(max(p[2], p[1] + 1e-6), m + 1)
        if m == 0:
            p[1] = max(p[1], 1e-6)
        p[2] = min(p[2], n - 1e-6)
    elif family == GENUS2:
        p[1] = min(max(p[1], -0.999), 0.999)
        lo, hi = (m, min(m + 1, n)) if variant > 0 else (max(m - 1, 1e-6), m)
        p[2] = min(max(p[2], lo), hi)
    elif family == OCTAGON:
        p[1] = min(max(p[1], -0.999), 0.999)
        p[2] = min(max(p[2], (m + 0.001) * p[0]), (m + 0.999) * p[0])
    else:
        p[1] = min(max(p[1], -0.999), 0.999)
        p[2] = min(max(p[2], -0.999), 0.999)
        if family != TWOSLIT and p[2] <= p[1] + 1e-4:
            mid = 0.5 * (p[1] + p[2])
            p[1], p[2] = mid - 5e-5, mid + 5e-5
    return np.array(p)


def _solve_candidate(family, n, m, target, p0, variant, *, tol=1e-12, max_iter=40, x0=None,
                     min_lam=1e-4):
    """Projected damped Newton on the three cross-ratio invariants.

    Returns ``(params, residual, solution, sc_state)``; ``sc_state`` warm-starts
    a later call.
    """
    cache = {"x0": x0}

    def residual(p):
        extra = _extra_from(family, p)
        # with a warm start, a failed Newton solve is reported instead of rescued
        sol, bands = forward_construct(family, p[0], n, m, extra, x0=cache["x0"],
                                       continuation=cache["x0"] is None)
        if hasattr(sol, "sc"):
            cache["x0"] = sol.sc.params
        return bands.cross_ratios() - target, sol

    p = _project(family, m, n, p0, variant)
    r, sol = residual(p)
    nr = np.linalg.norm(r, np.inf)
    for _ in range(max_iter):
        if nr < tol:
            break
        J = np.empty((3, 3))
        base = cache["x0"]
        for i in range(3):
            h = 1e-7 * max(1.0, abs(p[i]))
            q = p.copy()
            q[i] += h
            qp = _project(family, m, n, q, variant)
            if qp[i] == p[i]:
                q[i] = p[i] - h
                qp = _project(family, m, n, q, variant)
            cache["x0"] = base
            try:
                ri = residual(qp)[0]
            except (ConformalError, ArithmeticError):
                q[i] = 2 * p[i] - q[i]
                qp = _project(family, m, n, q, variant)
                cache["x0"] = base
                ri = residual(qp)[0]
            if qp[i] == p[i]:
                # pinned by the projection on both sides: no motion along this axis
                J[:, i] = 0.0
            else:
                J[:, i] = (ri - r) / (qp[i] - p[i])
        cache["x0"] = base
        if not np.all(np.isfinite(J)):
            break
        step = np.linalg.lstsq(J, r, rcond=None)[0]
        lam = 1.0
        while lam > min_lam:
            q = _project(family, m, n, p - lam * step, variant)
            try:
                rq, sq = residual(q)
                nq = np.linalg.norm(rq, np.inf)
            except (ConformalError, BandError, ValueError, ArithmeticError):
                nq = math.inf
                cache["x0"] = base
            if nq < nr:
                p, r, nr, sol = q, rq, nq, sq
                break
            lam *= 0.5
        else:
            break
    if family == GENUS2 and p[2] != m and abs(p[2] - m) < 1e-3:
        # the split sits at the slit-end quantum, where v is poorly conditioned
        q = p.copy()
        q[2] = float(m)
        try:
            rq, sq = residual(q)
            if np.linalg.norm(rq, np.inf) <= max(nr, tol):
                p, r, nr, sol = q, rq, np.linalg.norm(rq, np.inf), sq
        except (ConformalError, BandError, ValueError, ArithmeticError):
            pass
    return p, nr, sol, cache["x0"]


def design(bands: BandSystem, n: int, sigma, *, tol: float = 1e-11, verify_fn=None,
           screen_iter: int = 4, rescreen: float = 1e-3) -> FilterSolution:
    """Solve for the polygon parameters whose bands match ``bands`` up to a Mobius map.

    Every candidate from ``classify`` (family, level ``m`` and for Stiefel
    the side of the passband split) gets a short screening run; full solves
    then proceed in order of screening residual.  The first candidate meeting
    the invariants to ``tol`` and passing ``verify_fn`` (default: 2n+2
    alternation points) wins, unless a higher-priority family that screened
    below ``rescreen`` also converges.
    """
    if verify_fn is None:
        from .verify import alternation_count_ok as verify_fn
    cands = classify(bands, n, sigma)
    if not cands:
        raise DesignError(f"no family realizes class {tuple(sigma)} at degree {n}")
    norm, _ = normalize_bands(bands.eminus, bands.e1plus, bands.e2plus)
    target = norm.cross_ratios()
    t0, heights = _genus1_estimate(norm, n)
    report = {}
    runs = []
    for rank, family in enumerate(cands):
        variants = (1, -1) if family == GENUS2 else (1,)
        for m in _level_range(family, n):
            for variant in variants:
                key = f"{family}[m={m}" + ("" if len(variants) == 1 else
                                           (",v>=m" if variant > 0 else ",v<=m")) + "]"
                try:
                    p, nr, sol, state = _solve_candidate(family, n, m, target,
                                                         _initial(family, t0, m, heights),
                                                         variant, max_iter=screen_iter,
                                                         min_lam=0.05)
                except (ConformalError, BandError, ValueError, ArithmeticError) as exc:
                    report[key] = f"failed: {exc}"
                    continue
                report[key] = nr
                runs.append((nr, rank, key, family, m, variant, p, sol, state))
    runs.sort(key=lambda r: r[0])

    def finish(run):
        nr, rank, key, family, m, variant, p, sol, state = run
        if nr > tol:
            try:
                p, nr, sol, _ = _solve_candidate(family, n, m, target, p, variant, x0=state)
            except (ConformalError, BandError, ValueError, ArithmeticError) as exc:
                report[key] = f"failed: {exc}"
                return None
        report[key] = nr
        log.info("design candidate %s residual %.3g params %s", key, nr, p)
        if nr > tol:
            return None
        ub, sb = bands.endpoints, sol.bands.endpoints
        sol.chart = mobius_to(ub[0], ub[1], ub[2], sb[0], sb[1], sb[2])
        if not verify_fn(sol, bands, n):
            report[key] = f"residual {nr:.3g} but verification failed"
            return None
        sol.params = {"t": float(p[0]), **_extra_from(family, p)}
        sol.design_residuals = report
        return rank, key, sol

    winner = None
    for run in runs:
        winner = finish(run)
        if winner is not None:
            break
    if winner is None:
        raise DesignError("no solution found; per-family residuals: " +
                          "; ".join(f"{k}: {v if isinstance(v, str) else format(v, '.3g')}"
                                    for k, v in report.items()), report)
    for run in runs:
        if run[1] < winner[0] and run[0] < rescreen:
            other = finish(run)
            if other is not None and other[0] < winner[0]:
                log.info("design tie: %s and %s both verify; keeping %s", other[1], winner[1], other[1])
                winner = other
    return winner[2]
