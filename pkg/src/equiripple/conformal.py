"""Hyperelliptic differentials with real branchpoints and rectilinear
Schwarz-Christoffel maps.

A holomorphic differential on ``w^2 = prod (x - e_i)`` is written
``dzeta = C P(x) dx / w``.  On the real axis ``w`` is taken as the boundary
value from the upper half plane: ``w = i^N |w|`` where ``N`` counts the
branchpoints to the right of ``x``.  The abelian integral then maps the upper
half plane onto a polygon whose sides are horizontal or vertical, turning
left by a right angle at every branchpoint and reversing at every real zero
of ``P`` (a slit tip).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import elliptic
from .quadrature import adaptive_gl


class ConformalError(RuntimeError):
    def __init__(self, message, residual=None, state=None):
        super().__init__(message)
        self.residual = residual
        self.state = state


class SingularPointError(ValueError):
    pass


@dataclass(frozen=True)
class HyperellipticData:
    """Branchpoints, numerator zeros and scale of ``dzeta = C P dx / w``.

    ``zeros`` holds real floats (simple real roots of ``P``) and ``(a, b)``
    pairs standing for the factor ``(x - a)^2 + b^2``.
    """

    branchpoints: tuple
    zeros: tuple = ()
    scale: float = 1.0

    def __post_init__(self):
        e = tuple(float(v) for v in self.branchpoints)
        object.__setattr__(self, "branchpoints", e)
        if any(b <= a for a, b in zip(e, e[1:])):
            raise ValueError("branchpoints must be strictly increasing")
        if len(e) % 2 or not 4 <= len(e) <= 8:
            raise ValueError("need 4, 6 or 8 branchpoints")
        if self.numerator_degree > self.genus - 1:
            raise ValueError("numerator degree exceeds genus - 1")

    @property
    def genus(self) -> int:
        return len(self.branchpoints) // 2 - 1

    @property
    def real_zeros(self):
        return tuple(float(z) for z in self.zeros if not isinstance(z, tuple))

    @property
    def complex_zeros(self):
        return tuple(z for z in self.zeros if isinstance(z, tuple))

    @property
    def numerator_degree(self) -> int:
        return len(self.real_zeros) + 2 * len(self.complex_zeros)

    def numerator(self, x):
        x = np.asarray(x)
        p = np.ones_like(x, dtype=complex if np.iscomplexobj(x) else float)
        for z in self.zeros:
            if isinstance(z, tuple):
                p = p * ((x - z[0]) ** 2 + z[1] ** 2)
            else:
                p = p * (x - z)
        return p

    def with_scale(self, scale: float) -> "HyperellipticData":
        return HyperellipticData(self.branchpoints, self.zeros, scale)

    def n_right(self, x: float) -> int:
        return sum(1 for e in self.branchpoints if e > x)

    def direction(self, x: float) -> complex:
        """Unit direction of ``dzeta`` along the real axis (left to right) at ``x``."""
        s = math.copysign(1.0, self.scale * float(self.numerator(x)))
        return s * (-1j) ** self.n_right(x)


def differential_at(hd: HyperellipticData, x: float, sheet: int = 1) -> complex:
    """Value of ``dzeta/dx`` at real ``x``, upper-bank branch times ``sheet``.

    Real on intervals with an even number of branchpoints to the right and
    purely imaginary otherwise; ``sheet=-1`` gives the other sheet.
    """
    e = np.asarray(hd.branchpoints)
    d = np.abs(x - e)
    if np.any(d <= 1e-15 * (1 + abs(x))):
        raise SingularPointError(f"{x!r} is a branchpoint")
    mag = hd.scale * float(hd.numerator(x)) / math.sqrt(float(np.prod(d)))
    return sheet * mag * (-1j) ** hd.n_right(x)


def _abs_density(hd, skip):
    e = np.array([v for i, v in enumerate(hd.branchpoints) if i not in skip])
    C = abs(hd.scale)

    def g(x):
        x = np.asarray(x, dtype=float)
        den = np.ones_like(x)
        with np.errstate(over="ignore", invalid="ignore"):
            for ei in e:
                den = den * np.sqrt(np.abs(x - ei))
            return C * np.abs(hd.numerator(x)) / den

    return g


def _bp_index(hd, x, tol=1e-13):
    for i, e in enumerate(hd.branchpoints):
        if abs(e - x) <= tol * (1 + abs(e)):
            return i
    return None


def _finite_piece(hd, a, b, rtol):
    ia, ib = _bp_index(hd, a), _bp_index(hd, b)
    skip = {i for i in (ia, ib) if i is not None}
    g = _abs_density(hd, skip)
    L = b - a
    if ia is not None and ib is not None:
        # x = a + L sin^2(th/2): sqrt((x-a)(b-x)) dx-weight cancels exactly
        f = lambda th: g(a + L * np.sin(0.5 * th) ** 2)
        return adaptive_gl(f, 0.0, math.pi, rtol=rtol)
    if ia is not None:
        f = lambda s: 2.0 * math.sqrt(L) * g(a + L * s * s)
        return adaptive_gl(f, 0.0, 1.0, rtol=rtol)
    if ib is not None:
        f = lambda s: 2.0 * math.sqrt(L) * g(b - L * s * s)
        return adaptive_gl(f, 0.0, 1.0, rtol=rtol)
    return adaptive_gl(g, a, b, rtol=rtol)


def _half_line_piece(hd, a, sign, rtol):
    """Integral over a -> sign*infinity."""
    ia = _bp_index(hd, a)
    skip = {ia} if ia is not None else set()
    g = _abs_density(hd, skip)
    L = max(1.0, abs(a))
    if ia is not None:
        def f(s):
            om = 1.0 - s * s
            x = a + sign * L * s * s / om
            return g(x) * 2.0 * math.sqrt(L) / om**1.5
    else:
        def f(s):
            om = 1.0 - s
            x = a + sign * L * s / om
            return g(x) * L / om**2
    return adaptive_gl(f, 0.0, 1.0, rtol=rtol)


def segment_integral(hd: HyperellipticData, a: float, b: float, *, rtol: float = 1e-13) -> float:
    """Integral of ``|dzeta|`` over the real interval between ``a`` and ``b``.

    ``a > b`` is read as the interval through infinity, ``(a, +inf) u (-inf, b)``.
    Endpoint branchpoints are absorbed by a square-root change of variable.
    """
    a, b = float(a), float(b)
    if a == b or (_bp_index(hd, a) is not None and _bp_index(hd, a) == _bp_index(hd, b)):
        return 0.0
    if a > b:
        total = 0.0
        if math.isfinite(a):
            total += segment_integral(hd, a, math.inf, rtol=rtol)
        if math.isfinite(b):
            total += segment_integral(hd, -math.inf, b, rtol=rtol)
        return total
    for e in hd.branchpoints:
        if a < e < b and _bp_index(hd, a) != _bp_index(hd, e) and _bp_index(hd, b) != _bp_index(hd, e):
            if not (abs(e - a) <= 1e-13 * (1 + abs(e)) or abs(e - b) <= 1e-13 * (1 + abs(e))):
                raise ValueError(f"branchpoint {e} inside ({a}, {b})")
    # an endpoint just off a branchpoint: integrate from the branchpoint, where
    # the substitution absorbs the singularity without cancellation in x - e
    if math.isfinite(a) and math.isfinite(b):
        near = max(b - a, 1e-3 * (1 + abs(a) + abs(b)))
        bps = hd.branchpoints

        def gap(x, side):
            c = [abs(e - x) for e in bps if (e - x) * side > 0]
            return min(c) if c else math.inf

        lo = hi = []
        if _bp_index(hd, a) is None and gap(a, -1) < min(near, gap(a, 1)):
            lo = [e for e in bps if e < a]
        if _bp_index(hd, b) is None and gap(b, 1) < min(near, gap(b, -1)):
            hi = [e for e in bps if e > b]
        if lo or hi:
            L = max(lo) if lo else a
            R = min(hi) if hi else b
            total = _plain_integral(hd, L, R, rtol)
            if lo:
                total -= _plain_integral(hd, L, a, rtol)
            if hi:
                total -= _plain_integral(hd, b, R, rtol)
            return float(total)
    return _plain_integral(hd, a, b, rtol)


def _plain_integral(hd, a, b, rtol):
    cuts = [z for z in hd.real_zeros if a < z < b]
    pts = [a, *sorted(cuts), b]
    total = 0.0
    for lo, hi in zip(pts, pts[1:]):
        if math.isinf(lo) and math.isinf(hi):
            total += _half_line_piece(hd, 0.0, 1, rtol) + _half_line_piece(hd, 0.0, -1, rtol)
        elif math.isinf(hi):
            total += _half_line_piece(hd, lo, 1, rtol)
        elif math.isinf(lo):
            total += _half_line_piece(hd, hi, -1, rtol)
        else:
            total += _finite_piece(hd, lo, hi, rtol)
    return float(total)


def period_vector(hd: HyperellipticData, intervals) -> list:
    return [segment_integral(hd, a, b) for a, b in intervals]


def _critical_points(hd):
    return sorted(set(hd.branchpoints) | set(hd.real_zeros))


def directed_integral(hd: HyperellipticData, a: float, b: float) -> complex:
    """``int_a^b dzeta`` along the upper bank of the finite real segment."""
    if a == b:
        return 0j
    if b < a:
        return -directed_integral(hd, b, a)
    pts = [a, *[c for c in _critical_points(hd) if a < c < b], b]
    total = 0j
    for lo, hi in zip(pts, pts[1:]):
        total += hd.direction(0.5 * (lo + hi)) * segment_integral(hd, lo, hi)
    return total


def path_integral(hd: HyperellipticData, e_index: int, x: complex, *, rtol: float = 1e-13) -> complex:
    """``int dzeta`` from branchpoint ``e_index`` to ``x`` (Im x >= 0) along a straight path."""
    e = hd.branchpoints
    ek = e[e_index]
    others = np.array([v for i, v in enumerate(e) if i != e_index])
    d = complex(x) - ek
    sd = np.sqrt(d)

    def f(s):
        gam = ek + d * s * s
        den = np.ones_like(gam)
        for ei in others:
            den = den * np.sqrt(gam - ei + 0j)
        return hd.scale * hd.numerator(gam) * 2.0 * sd / den

    return complex(adaptive_gl(f, 0.0, 1.0, rtol=rtol))


def nearest_branchpoint(hd, x: complex) -> int:
    return int(np.argmin([abs(complex(x) - e) for e in hd.branchpoints]))


def map_to_polygon(hd: HyperellipticData, x: complex, anchor: float) -> complex:
    """Abelian integral from the branchpoint ``anchor`` to ``x`` in the closed upper half plane."""
    if _bp_index(hd, anchor) is None:
        raise ValueError("anchor must be a branchpoint")
    x = complex(x)
    if x.imag < 0:
        raise ValueError("x must lie in the closed upper half plane")
    if x.imag == 0:
        return directed_integral(hd, anchor, x.real)
    k = nearest_branchpoint(hd, x)
    return directed_integral(hd, anchor, hd.branchpoints[k]) + path_integral(hd, k, x)


# ---------------------------------------------------------------------------
# rectilinear polygons

FAMILIES = ("Rect", "SlitRect", "TwoSlitRect", "BranchedOctagon", "DecagonPlus", "DecagonMinus")


@dataclass(frozen=True)
class PolygonSpec:
    """Tiled polygon in the coordinates of the small rectangle Pi(t).

    Horizontal unit 1 (tile width 2), vertical unit ``t``.
    """

    family: str
    t: float
    n: int
    m: int = 0
    h: float = 0.0
    h1: float = 0.0
    h2: float = 0.0
    c: complex = 0j

    def __post_init__(self):
        self.validate()

    def validate(self):
        fam, n, m = self.family, self.n, self.m
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}")
        if not self.t > 0:
            raise ValueError("t must be positive")
        if n < 1:
            raise ValueError("n must be >= 1")
        inside = lambda v: -1.0 < v < 1.0
        if fam == "SlitRect":
            if not 1 <= m <= n - 1:
                raise ValueError(f"SlitRect needs 1 <= m <= n-1, got m={m}, n={n}")
            if not inside(self.h):
                raise ValueError("h must lie in (-1, 1)")
        elif fam == "TwoSlitRect":
            if not 1 <= m <= n - 2:
                raise ValueError(f"TwoSlitRect needs 1 <= m <= n-2, got m={m}, n={n}")
            if not (inside(self.h1) and inside(self.h2)):
                raise ValueError("h1, h2 must lie in (-1, 1)")
        elif fam == "BranchedOctagon":
            if not 1 <= m <= n - 2:
                raise ValueError(f"BranchedOctagon needs 1 <= m <= n-2, got m={m}, n={n}")
            c = complex(self.c)
            if not (inside(c.real) and m * self.t < c.imag < (m + 1) * self.t):
                raise ValueError("c must lie inside Pi(t) + m t")
        elif fam in ("DecagonPlus", "DecagonMinus"):
            lo, hi = (1, n - 2) if fam == "DecagonPlus" else (0, n - 3)
            if not lo <= m <= hi:
                raise ValueError(f"{fam} needs {lo} <= m <= {hi}, got m={m}, n={n}")
            if not (inside(self.h1) and inside(self.h2) and self.h1 < self.h2):
                raise ValueError("need -1 < h1 < h2 < 1")

    @property
    def height(self) -> int:
        """Number of tiles stacked along the stopband wall."""
        return self.n - 1 if self.family in ("BranchedOctagon", "DecagonPlus", "DecagonMinus") else self.n

    @property
    def genus(self) -> int:
        return {"Rect": 1, "SlitRect": 2}.get(self.family, 3)

    def vertices(self):
        """Boundary corners in the order of increasing prevertex, starting at -1.

        Each entry is ``(kind, zeta)`` with kind ``"b"`` (right angle,
        branchpoint) or ``"z"`` (slit tip, real zero of the numerator).
        """
        it = 1j * self.t
        n, m, N = self.n, self.m, self.height
        fam = self.family
        head = [("b", -1 + 0j), ("b", 1 + 0j)]
        tail = [("b", 1 + N * it), ("b", -1 + N * it)]
        if fam == "Rect":
            mid = []
        elif fam == "SlitRect":
            mid = [("b", 1 + m * it), ("z", self.h + m * it), ("b", 1 + m * it)]
        elif fam == "TwoSlitRect":
            mid = [("b", 1 + m * it), ("z", self.h1 + m * it), ("b", 1 + m * it),
                   ("b", 1 + (m + 1) * it), ("z", self.h2 + (m + 1) * it), ("b", 1 + (m + 1) * it)]
        elif fam == "BranchedOctagon":
            mid = [("b", 1 + (m + 1) * it), ("b", -1 + (m + 1) * it),
                   ("b", -1 + m * it), ("b", 1 + m * it)]
        elif fam == "DecagonPlus":
            mid = [("b", 1 + (m + 1) * it), ("b", -1 + (m + 1) * it), ("b", -1 + m * it),
                   ("z", self.h2 + m * it), ("z", self.h1 + m * it), ("b", 1 + m * it)]
        else:
            mid = [("b", 1 + (m + 1) * it), ("z", self.h1 + (m + 1) * it),
                   ("z", self.h2 + (m + 1) * it), ("b", -1 + (m + 1) * it),
                   ("b", -1 + m * it), ("b", 1 + m * it)]
        return head + mid + tail

    @property
    def complex_zero(self):
        return complex(self.c) if self.family == "BranchedOctagon" else None


@dataclass
class SCSolution:
    hd: HyperellipticData
    spec: PolygonSpec
    prevertices: list  # x position per entry of spec.vertices()
    residual: float
    iterations: int = 0
    labels: dict = field(default_factory=dict)

    def vertex_zeta(self):
        return [z for _, z in self.spec.vertices()]

    def side_lengths(self):
        """Computed |side| for every polygon side, in traversal order."""
        xs = self.prevertices
        return [segment_integral(self.hd, xs[j], xs[(j + 1) % len(xs)]) for j in range(len(xs))]

    def target_lengths(self):
        zs = self.vertex_zeta()
        return [abs(zs[(j + 1) % len(zs)] - zs[j]) for j in range(len(zs))]

    def side_residual(self) -> float:
        return max(abs(a - b) for a, b in zip(self.side_lengths(), self.target_lengths()))


def _unpack(spec, params):
    verts = spec.vertices()
    L = len(verts)
    nfree = L - 3
    xs = [0.0] * L
    xs[0], xs[1] = -1.0, 1.0
    for j in range(2, L - 1):
        xs[j] = xs[j - 1] + math.exp(params[j - 2])
    xs[L - 1] = -1.0 - math.exp(params[nfree])
    cz = None
    if spec.complex_zero is not None:
        cz = (params[nfree + 1], math.exp(params[nfree + 2]))
    return verts, xs, cz


def _build_hd(verts, xs, cz, scale=1.0):
    bps = sorted(x for (k, _), x in zip(verts, xs) if k == "b")
    zeros = [x for (k, _), x in zip(verts, xs) if k == "z"]
    if cz is not None:
        zeros.append(tuple(cz))
    return HyperellipticData(tuple(bps), tuple(zeros), scale)


def _normalize_scale(hd):
    hd1 = hd.with_scale(1.0)
    ib = segment_integral(hd1, -1.0, 1.0)
    return hd.with_scale(hd1.direction(0.0).real * 2.0 / ib)


def _measure(spec, params):
    """Side lengths, midpoint balance and interior-branchpoint position."""
    verts, xs, cz = _unpack(spec, params)
    hd = _normalize_scale(_build_hd(verts, xs, cz))
    L = len(verts)
    out = [segment_integral(hd, xs[j], xs[j + 1]) for j in range(1, L - 2)]
    # infinity sits at the midpoint of the top side
    out.append(segment_integral(hd, xs[L - 2], math.inf) - segment_integral(hd, -math.inf, xs[L - 1]))
    if cz is not None:
        k = nearest_branchpoint(hd, complex(*cz))
        ek = hd.branchpoints[k]
        j = next(i for i, x in enumerate(xs) if x == ek and verts[i][0] == "b")
        zc = verts[j][1] + path_integral(hd, k, complex(cz[0], cz[1]))
        out.extend([zc.real, zc.imag])
    return np.array(out), hd, xs


def _targets(spec):
    verts = spec.vertices()
    L = len(verts)
    out = [abs(verts[j + 1][1] - verts[j][1]) for j in range(1, L - 2)]
    out.append(0.0)
    if spec.complex_zero is not None:
        out.extend([spec.complex_zero.real, spec.complex_zero.imag])
    return np.array(out)


def _residuals(spec, params):
    meas, hd, xs = _measure(spec, params)
    return meas - _targets(spec), hd, xs


def _initial_params(spec):
    """Prevertices from the plain rectangle map with matching wall height."""
    verts = spec.vertices()
    t = spec.t
    L = len(verts)
    s = 0.0
    heights = [0.0]
    for j in range(1, L - 2):
        dz = verts[j + 1][1] - verts[j][1]
        if abs(dz.real) > abs(dz.imag):
            s += 0.35 * abs(dz.real) * min(1.0, t)
        else:
            s += abs(dz.imag) / t
        heights.append(s)
    mod = elliptic.modulus_from_t(s * t)
    xs = [elliptic.x_map(complex(1.0, hh * t), mod).real for hh in heights]
    # keep strictly increasing
    for j in range(1, len(xs)):
        if xs[j] <= xs[j - 1]:
            xs[j] = xs[j - 1] * (1 + 1e-3) + 1e-3
    params = [math.log(xs[j] - xs[j - 1]) for j in range(1, len(xs))]
    params.append(math.log(mod.kinv - 1.0))
    if spec.complex_zero is not None:
        c = spec.complex_zero
        m = spec.m
        lo = elliptic.x_map(complex(1.0, m * t), mod).real
        hi = elliptic.x_map(complex(1.0, (m + 1) * t), mod).real
        frac = (c.real + 1) / 2
        params.extend([lo + frac * (hi - lo), math.log(0.5 * (hi - lo))])
    return np.array(params)


def damped_newton(fun, x0, *, tol=1e-12, max_iter=60, fd_step=1e-7):
    """Damped Newton with a forward-difference Jacobian.

    ``fun`` returns the residual vector; a step is halved until the residual
    norm decreases.  Returns ``(x, residual_norm, iterations)``.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = fun(x)
    nr = np.linalg.norm(r, np.inf)
    it = 0
    for it in range(1, max_iter + 1):
        if nr < tol:
            break
        J = np.empty((len(r), len(x)))
        for i in range(len(x)):
            h = fd_step * max(1.0, abs(x[i]))
            xp = x.copy()
            xp[i] += h
            try:
                J[:, i] = (fun(xp) - r) / h
            except (ValueError, FloatingPointError, OverflowError, ZeroDivisionError):
                xp[i] -= 2 * h
                J[:, i] = (r - fun(xp)) / h
        step = np.linalg.lstsq(J, r, rcond=None)[0]
        lam = 1.0
        while lam > 1e-6:
            xn = x - lam * step
            try:
                rn = fun(xn)
                nrn = np.linalg.norm(rn, np.inf)
            except (ValueError, FloatingPointError, OverflowError, ZeroDivisionError):
                nrn = math.inf
            if nrn < nr or nrn < tol:
                x, r, nr = xn, rn, nrn
                break
            lam *= 0.5
        else:
            break
    return x, nr, it


def _continuation(spec, p0, tol):
    """Morph targets from those met by ``p0`` to the polygon's own."""
    start = _measure(spec, p0)[0]
    goal = _targets(spec)
    p = np.asarray(p0, dtype=float)
    lam, step = 0.0, 0.25
    while lam < 1.0:
        nxt = min(1.0, lam + step)
        tgt = (1 - nxt) * start + nxt * goal
        fun = lambda q: _measure(spec, q)[0] - tgt
        try:
            q, nr, _ = damped_newton(fun, p, tol=tol if nxt == 1.0 else 1e-9, max_iter=25)
        except (ValueError, FloatingPointError, OverflowError, ZeroDivisionError):
            nr = math.inf
        if nr < (1e-9 if nxt < 1.0 else 1e-10):
            p, lam = q, nxt
            step = min(0.5, step * 1.5)
        else:
            step *= 0.5
            if step < 1e-4:
                return p, math.inf
    return p, np.linalg.norm(_residuals(spec, p)[0], np.inf)


def sc_solve_forward(spec: PolygonSpec, *, tol: float = 1e-12, x0=None,
                     continuation: bool = True) -> SCSolution:
    """Prevertices and numerator zeros of the map from the half plane onto ``spec``.

    Gauge: the corners -1 and 1 sit at prevertices -1 and 1 and the midpoint
    of the top side at infinity, so every corner has a finite prevertex.  Newton
    from ``x0`` (or the rectangle-based guess) is tried first; on failure the
    targets are reached by continuation.  With ``continuation`` off and a
    warm start, only a short Newton run from ``x0`` is attempted.
    """
    fun = lambda p: _residuals(spec, p)[0]
    guess = _initial_params(spec)
    best = None
    starts = ([x0] if x0 is not None else []) + [guess]
    if not continuation and x0 is not None:
        # quick mode for callers probing nearby parameters from a converged state
        starts, max_iter = [x0], 8
    else:
        max_iter = 30
    for p0 in starts:
        try:
            p, nr, it = damped_newton(fun, p0, tol=tol, max_iter=max_iter)
        except (ValueError, FloatingPointError, OverflowError, ZeroDivisionError):
            continue
        if best is None or nr < best[1]:
            best = (p, nr, it)
        if nr < 1e-10:
            break
    if continuation and (best is None or best[1] > 1e-10):
        p, nr = _continuation(spec, guess if x0 is None else x0, tol)
        if best is None or nr < best[1]:
            best = (p, nr, -1)
    if best is None or best[1] > 1e-9:
        raise ConformalError(f"SC parameter solve failed for {spec.family}",
                             residual=math.inf if best is None else best[1],
                             state=None if best is None else best[0])
    p, nr, it = best
    _, hd, xs = _residuals(spec, p)
    sol = SCSolution(hd=hd, spec=spec, prevertices=list(xs), residual=nr, iterations=it)
    sol.labels = {f"{k}:{z.real:+.6g}{z.imag:+.6g}i#{j}": x
                  for j, ((k, z), x) in enumerate(zip(spec.vertices(), xs))}
    sol.params = p
    return sol
