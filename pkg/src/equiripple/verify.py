"""Certification of candidate approximants on a three-band set."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bands import BandSystem
from .elliptic import EllipticModulus
from .rational import FitError, RationalFunction

ENVELOPE_TOL = 1e-6
_GOLD = 0.5 * (math.sqrt(5.0) - 1.0)


def _evaluate(R, x):
    with np.errstate(all="ignore"):
        return np.asarray(R(np.asarray(x, dtype=float)), dtype=float)


def _band_grid(a, b, density):
    k = np.arange(density)
    inner = 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * (k + 0.5) / density)
    return np.concatenate([[a], inner, [b]])


def _golden_max(f, a, b, tol):
    """Maximize unimodal ``f`` on ``[a, b]``."""
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def _pole_between(R, a, b):
    """Bisect a sign change of ``R``; a pole shows up as blow-up, a zero does not."""
    fa = float(_evaluate(R, a))
    for _ in range(80):
        c = 0.5 * (a + b)
        fc = float(_evaluate(R, c))
        if not math.isfinite(fc):
            return True
        if (fc > 0) == (fa > 0):
            a, fa = c, fc
        else:
            b = c
    return min(abs(fa), abs(float(_evaluate(R, b)))) > 1e10


def band_extrema(R, bands: BandSystem, grid_density: int = 64):
    """Local maxima of ``|R - S_E|`` on every band as ``(x, delta)`` pairs, polished.

    Returns ``None`` when ``R`` has a pole on a band.
    """
    out = []
    for (a, b), s in zip(bands.bands, bands.targets):
        xs = _band_grid(a, b, grid_density)
        d = _evaluate(R, xs) - s
        if not np.all(np.isfinite(d)):
            return None
        r = d + s
        for i in np.flatnonzero(r[:-1] * r[1:] < 0):
            if _pole_between(R, xs[i], xs[i + 1]):
                return None
        ad = np.abs(d)
        tol = 1e-12 * max(1.0, abs(a), abs(b))
        for i in range(len(xs)):
            left = ad[i - 1] if i > 0 else -1.0
            right = ad[i + 1] if i + 1 < len(xs) else -1.0
            if ad[i] < left or ad[i] < right:
                continue
            if 0 < i < len(xs) - 1:
                f = lambda x: abs(float(_evaluate(R, x)) - s)
                x, _ = _golden_max(f, xs[i - 1], xs[i + 1], tol)
                dx = float(_evaluate(R, x)) - s
                if abs(dx) < ad[i]:
                    x, dx = xs[i], d[i]
                out.append((float(x), float(dx)))
            else:
                out.append((float(xs[i]), float(d[i])))
    out.sort()
    return out


def sup_error(R, bands: BandSystem, grid_density: int = 64) -> float:
    """``max |R - S_E|`` over the bands; ``inf`` flags a pole on a band."""
    if grid_density < 64:
        raise ValueError("grid_density must be at least 64 per band")
    ext = band_extrema(R, bands, grid_density)
    if ext is None:
        return math.inf
    return max(abs(d) for _, d in ext)


@dataclass
class Alternation:
    points: list
    signs: list
    alternates: bool
    merged: int = 0

    @property
    def count(self) -> int:
        return len(self.points)


def alternation_points(R, bands: BandSystem, mu: float, *, rel_tol: float = ENVELOPE_TOL,
                       grid_density: int = 64) -> Alternation:
    """Envelope touches ``|delta| >= (1 - rel_tol) mu`` reduced to an alternating sequence.

    Neighbouring touches of equal sign are merged into one representative,
    so the count is the length of the longest alternating run.
    """
    ext = band_extrema(R, bands, grid_density)
    if ext is None or not math.isfinite(mu) or mu <= 0:
        return Alternation([], [], False, 0)
    touches = [(x, d) for x, d in ext if abs(d) >= (1 - rel_tol) * mu]
    pts, signs, best = [], [], []
    for x, d in touches:
        s = 1 if d > 0 else -1
        if signs and signs[-1] == s:
            if abs(d) > best[-1]:
                pts[-1], best[-1] = x, abs(d)
            continue
        pts.append(x)
        signs.append(s)
        best.append(abs(d))
    return Alternation(pts, signs, len(pts) >= 2, len(touches) - len(pts))


# ---------------------------------------------------------------------------
# topology of the fitted rational function

def _homogeneous(rf: RationalFunction, poly, phi):
    """Sign-carrying form ``Y^n p(X/Y)`` on the circle ``(X, Y) = (sin, cos)`` of the chart."""
    n = rf.degree
    s, c = np.sin(phi), np.cos(phi)
    out = np.zeros_like(phi)
    for k, a in enumerate(poly):
        out = out + a * s**k * c ** (n - k)
    return out


def _chart_angle(rf, x):
    return math.atan((x - rf.shift) / rf.scale)


def _gap_arcs(rf, bands):
    p = bands.endpoints
    ang = [_chart_angle(rf, v) for v in p]
    return {"T1": (ang[1], ang[2]), "T12": (ang[3], ang[4]), "T2": (ang[5], ang[0] + math.pi)}


def _sign_changes(values):
    sg = np.sign(values)
    sg = sg[sg != 0]
    return int(np.count_nonzero(sg[1:] != sg[:-1]))


def topological_class(rf: RationalFunction, bands: BandSystem, *, density: int | None = None) -> tuple:
    """Parities of the zero counts of ``rf`` in T1, T12 and T2.

    Zeros at infinity are included through the homogeneous form of the
    numerator, so the gap containing infinity is handled like any other.
    """
    dev = sup_error(rf, bands)
    if not dev < 1:
        raise ValueError(f"class undefined: deviation {dev:.3g} is not below 1")
    density = density or 32 * max(rf.degree, 1) * 16
    out = []
    for name, (lo, hi) in _gap_arcs(rf, bands).items():
        phi = np.linspace(lo, hi, density + 2)[1:-1]
        out.append(_sign_changes(_homogeneous(rf, rf.numerator, phi)) % 2)
    return tuple(out)


def _cluster(points, radius):
    groups = []
    for p in points:
        for g in groups:
            if abs(p - g[0]) <= radius * (1 + abs(g[0])):
                g.append(p)
                break
        else:
            groups.append([p])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def extremality_number(rf: RationalFunction, mod: EllipticModulus, *, scale: float = 1.0,
                       value_tol: float = 1e-7, cluster: float = 1e-5) -> int:
    """``1 + sum_{R not in Q} ord dR + sum_{R in Q} floor(ord dR / 2)`` over the sphere.

    ``Q = scale * {+-1, +-1/k}``; pass the rescaling factor when ``rf`` is the
    rescaled approximant.
    """
    if rf.degree < 1:
        raise ValueError("extremality number needs a nonconstant function")
    Q = [scale * v for v in (1.0, -1.0, mod.kinv, -mod.kinv)]
    finite, at_inf = rf.critical_points()
    crit = _cluster(list(finite), cluster)
    vals = []
    for c, order in crit:
        with np.errstate(all="ignore"):
            v = complex(rf(c))
        vals.append((v, order))
    if at_inf:
        vals.append((complex(rf.value_at_infinity()), at_inf))
    g = 1
    for v, order in vals:
        in_q = cmath_isfinite(v) and min(abs(v - q) for q in Q) <= value_tol * (1 + abs(v))
        g += order // 2 if in_q else order
    return g


def cmath_isfinite(v: complex) -> bool:
    return math.isfinite(v.real) and math.isfinite(v.imag)


# ---------------------------------------------------------------------------
# extended bands

def _band_ranges(R, bands, grid_density):
    ext = band_extrema(R, bands, grid_density) or []
    ranges = []
    for (a, b), s in zip(bands.bands, bands.targets):
        vals = [d + s for x, d in ext if a <= x <= b]
        vals += list(_evaluate(R, _band_grid(a, b, grid_density)))
        ranges.append((min(vals), max(vals)))
    return ranges


def _level_preimages(rf: RationalFunction, levels):
    """Real solutions of ``rf(x) = L`` for each level, from ``p - L q`` in the chart."""
    out = []
    num = np.asarray(rf.numerator)
    den = np.asarray(rf.denominator)
    size = max(len(num), len(den))
    num = np.pad(num, (0, size - len(num)))
    den = np.pad(den, (0, size - len(den)))
    for L in levels:
        poly = np.trim_zeros(num - L * den, "b")
        if len(poly) < 2:
            continue
        for r in np.polynomial.polynomial.polyroots(poly):
            if abs(r.imag) <= 1e-6 * (1 + abs(r.real)):
                out.append(rf.shift + rf.scale * r.real)
    return out


def extended_bands(R, bands: BandSystem, *, rf: RationalFunction | None = None, grid: int = 4000,
                   grid_density: int = 64, rel_tol: float = 1e-10, snap: float = 1e-7):
    """Real points whose value lies in the range of ``R`` on the bands, as maximal intervals.

    The line is scanned through infinity with ``x = c + s tan(phi)``.  When a
    rational model ``rf`` of ``R`` is given, its preimages of the range
    endpoints seed the scan so that short segments are not stepped over.  An
    interval through infinity is returned as ``(a, b)`` with ``a > b``;
    endpoints within ``snap`` (relative to the band span) of a band endpoint
    are moved onto it.
    """
    p = bands.endpoints
    c = 0.5 * (p[0] + p[5])
    s = max(0.5 * (p[5] - p[0]), 1e-300)
    ranges = _band_ranges(R, bands, grid_density)

    def inside(x):
        x = np.asarray(x, dtype=float)
        v = _evaluate(R, x)
        ok = np.zeros(np.shape(v), dtype=bool)
        for lo, hi in ranges:
            tol = rel_tol * (1 + max(abs(lo), abs(hi)))
            ok |= (v >= lo - tol) & (v <= hi + tol)
        return (ok & np.isfinite(v)) | bands.contains(x)

    def member(x):
        return bool(inside(np.array([x]))[0])

    phi = np.linspace(-0.5 * math.pi, 0.5 * math.pi, grid + 1)[:-1] + 0.5 * math.pi / grid
    xs = [c + s * np.tan(phi), np.asarray(p)]
    if rf is not None:
        seeds = np.sort(_level_preimages(rf, [v for r in ranges for v in r]))
        if len(seeds):
            gap = 1e-9 * (1 + np.abs(seeds))
            xs += [seeds, seeds - gap, seeds + gap, 0.5 * (seeds[1:] + seeds[:-1])]
    xs = np.unique(np.concatenate(xs))
    mem = inside(xs)

    def boundary(a, b, a_in):
        for _ in range(200):
            mid = 0.5 * (a + b)
            if mid in (a, b):
                break
            if member(mid) == a_in:
                a = mid
            else:
                b = mid
        return a if a_in else b

    starts, ends = [], []
    for i in range(len(xs) - 1):
        if mem[i] and not mem[i + 1]:
            ends.append(boundary(xs[i], xs[i + 1], True))
        elif not mem[i] and mem[i + 1]:
            starts.append(boundary(xs[i], xs[i + 1], False))
    if mem[0] and not starts or (starts and ends and ends[0] < starts[0]):
        starts.insert(0, -math.inf)
    if len(ends) < len(starts):
        ends.append(math.inf)
    segs = list(zip(starts, ends))
    if len(segs) > 1 and segs[0][0] == -math.inf and segs[-1][1] == math.inf:
        segs = [(segs[-1][0], segs[0][1])] + segs[1:-1]
    span = p[5] - p[0]

    def snapped(v):
        for e in p:
            if abs(v - e) <= snap * span:
                return float(e)
        return float(v)

    return [(snapped(a), snapped(b)) for a, b in segs]


def _difference(segs, bands):
    """Pieces of ``segs`` outside the bands, each as a finite or wrapping interval."""
    pieces = []
    for a, b in segs:
        parts = [(a, math.inf), (-math.inf, b)] if a > b else [(a, b)]
        for lo, hi in parts:
            cur = [(lo, hi)]
            for ba, bb in bands.bands:
                nxt = []
                for u, v in cur:
                    if bb <= u or ba >= v:
                        nxt.append((u, v))
                        continue
                    if u < ba:
                        nxt.append((u, ba))
                    if bb < v:
                        nxt.append((bb, v))
                cur = nxt
            pieces.extend(cur)
    return pieces


def check_theorem1(extended, bands: BandSystem, *, tol: float = 1e-7) -> bool:
    """True iff the extension avoids T1 and T2 and meets T12 in at most one interval."""
    p = bands.endpoints
    span = p[5] - p[0]
    in_t12 = 0
    for lo, hi in _difference(extended, bands):
        if hi - lo <= tol * span:
            continue
        if not (math.isfinite(lo) and math.isfinite(hi)):
            return False
        mid = 0.5 * (lo + hi)
        if p[3] < mid < p[4]:
            in_t12 += 1
        else:
            return False
    return in_t12 <= 1


# ---------------------------------------------------------------------------
# degree certification

def rational_fit(samples, n: int, *, holdout: int = 2):
    """Type ``(n, n)`` rational fit in barycentric form, returned in coefficient form.

    Support points are picked greedily where the current fit is worst; the
    weights minimize the linearized error ``sum w_j (y - f_j) / (x - z_j)``
    relative to ``max(1, |y|)``.  Every ``holdout``-th sample is held out and
    the residual is the largest relative error there.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("samples must be (x, y) pairs")
    if len(pts) < 2 * n + 2:
        raise FitError(f"need at least {2 * n + 2} samples for degree {n}, got {len(pts)}")
    pts = pts[np.argsort(pts[:, 0])]
    if not np.all(np.isfinite(pts)):
        raise FitError("samples must be finite (exclude poles)")
    test_mask = np.zeros(len(pts), dtype=bool)
    test_mask[1::holdout] = True
    train, test = pts[~test_mask], pts[test_mask]
    shift = 0.5 * (pts[0, 0] + pts[-1, 0])
    scale = max(0.5 * (pts[-1, 0] - pts[0, 0]), 1e-300)
    x = (train[:, 0] - shift) / scale
    y = train[:, 1]
    rw = 1.0 / np.maximum(1.0, np.abs(y))
    support = [int(np.argmax(np.abs(y - np.median(y))))]
    weights = np.ones(1)
    for size in range(1, n + 2):
        rest = np.setdiff1d(np.arange(len(x)), support)
        if len(rest) < size:
            raise FitError("too few training samples for the requested degree")
        zs, fs = x[support], y[support]
        C = 1.0 / (x[rest, None] - zs[None, :])
        A = (y[rest, None] - fs[None, :]) * C * rw[rest, None]
        _, sv, vt = np.linalg.svd(A, full_matrices=False)
        weights = vt[-1]
        if size == n + 1:
            break
        num = C @ (weights * fs)
        den = C @ weights
        err = np.abs(num / den - y[rest]) * rw[rest]
        support.append(int(rest[np.argmax(err)]))
    if len(sv) >= 2 and sv[-1] > 0 and sv[-2] / sv[-1] < 1 + 1e-8:
        raise FitError("rank-deficient fit: smallest singular value is not isolated")
    rf = RationalFunction.from_barycentric(x[support] * scale + shift, y[support], weights,
                                           shift, scale)
    with np.errstate(all="ignore"):
        pred = rf(test[:, 0])
    resid = float(np.max(np.abs(pred - test[:, 1]) / np.maximum(1.0, np.abs(test[:, 1]))))
    if not math.isfinite(resid):
        resid = math.inf
    return rf, resid


def solution_samples(R, bands: BandSystem, count: int, *, cap: float = 1e8):
    """At least ``count`` finite samples of ``R``, Chebyshev-spread over each band and gap.

    The gap through infinity is covered with ``x = c + s tan(phi)``.
    """
    p = bands.endpoints
    per = max(2, -(-count // 6))
    xs = [_band_grid(a, b, per)[1:-1] for a, b in zip(p, p[1:])]
    c = 0.5 * (p[5] + p[0])
    s = 0.5 * (p[5] - p[0])
    lo, hi = math.atan((p[5] - c) / s), math.atan((p[0] - c) / s) + math.pi
    phi = 0.5 * (lo + hi) - 0.5 * (hi - lo) * np.cos(np.pi * (np.arange(per) + 0.5) / per)
    phi = phi[np.abs(np.cos(phi)) > 1e-3]
    xs.append(c + s * np.tan(phi))
    xs = np.concatenate(xs)
    ys = _evaluate(R, xs)
    keep = np.isfinite(ys) & (np.abs(ys) < cap)
    if keep.sum() < count:
        raise FitError("could not collect enough finite samples")
    return np.column_stack([xs[keep], ys[keep]])


# ---------------------------------------------------------------------------
# report

@dataclass
class VerificationReport:
    mu: float
    alternation_points: list
    alternation_signs: list
    alternation_count: int
    alternates: bool
    sigma: tuple | None
    extremality: int | None
    extended_segments: list
    theorem1_ok: bool
    degree_fit_residual: float
    rational: RationalFunction | None = field(default=None, repr=False)

    def to_dict(self):
        return {
            "mu": self.mu,
            "alternation_points": list(self.alternation_points),
            "alternation_signs": list(self.alternation_signs),
            "alternation_count": self.alternation_count,
            "alternates": self.alternates,
            "sigma": list(self.sigma) if self.sigma is not None else None,
            "extremality": self.extremality,
            "extended_segments": [list(s) for s in self.extended_segments],
            "theorem1_ok": self.theorem1_ok,
            "degree_fit_residual": self.degree_fit_residual,
            "rational": self.rational.to_dict() if self.rational is not None else None,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(mu=d["mu"], alternation_points=list(d["alternation_points"]),
                   alternation_signs=list(d["alternation_signs"]),
                   alternation_count=d["alternation_count"], alternates=d["alternates"],
                   sigma=tuple(d["sigma"]) if d["sigma"] is not None else None,
                   extremality=d["extremality"],
                   extended_segments=[tuple(s) for s in d["extended_segments"]],
                   theorem1_ok=d["theorem1_ok"], degree_fit_residual=d["degree_fit_residual"],
                   rational=RationalFunction.from_dict(d["rational"]) if d.get("rational") else None)


def verify_solution(sol, bands: BandSystem | None = None, *, grid_density: int = 64) -> VerificationReport:
    """Full certificate for a ``FilterSolution`` on ``bands`` (its own bands by default)."""
    bands = bands if bands is not None else sol.user_bands
    R = sol.approximant
    n = sol.n
    mu = sup_error(R, bands, grid_density)
    alt = alternation_points(R, bands, mu, grid_density=grid_density)
    try:
        rf, resid = rational_fit(solution_samples(R, bands, 4 * n + 8), n)
    except FitError as exc:
        rf, resid = None, exc.residual if exc.residual is not None else math.inf
    sigma = g = None
    if rf is not None:
        try:
            sigma = topological_class(rf, bands)
        except ValueError:
            sigma = None
        try:
            g = extremality_number(rf, sol.mod, scale=sol.scale)
        except ValueError:
            g = None
    ext = extended_bands(R, bands, rf=rf, grid_density=grid_density) if mu < 1 else []
    ok = check_theorem1(ext, bands) if mu < 1 else False
    return VerificationReport(mu=mu, alternation_points=alt.points, alternation_signs=alt.signs,
                              alternation_count=alt.count, alternates=alt.alternates, sigma=sigma,
                              extremality=g, extended_segments=ext, theorem1_ok=ok,
                              degree_fit_residual=resid, rational=rf)


def alternation_count_ok(sol, bands: BandSystem, n: int) -> bool:
    """Local optimality test used by design: exactly ``2n + 2`` alternation points."""
    R = sol.approximant
    mu = sup_error(R, bands)
    return math.isfinite(mu) and mu < 1 and alternation_points(R, bands, mu).count == 2 * n + 2
