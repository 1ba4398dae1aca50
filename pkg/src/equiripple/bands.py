"""Three-band work sets on the extended real line."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class BandError(ValueError):
    pass


@dataclass(frozen=True)
class BandSystem:
    """Stopband ``eminus`` and passbands ``e1plus`` < ``e2plus``.

    Endpoints are finite and increasing in the order
    E- < T1 < E1+ < T12 < E2+ < T2, the last gap wrapping through infinity.
    """

    eminus: tuple
    e1plus: tuple
    e2plus: tuple

    def __post_init__(self):
        pts = self.endpoints
        if not all(math.isfinite(p) for p in pts):
            raise BandError("band endpoints must be finite")
        if not all(a < b for a, b in zip(pts, pts[1:])):
            raise BandError(f"band endpoints must be strictly increasing, got {pts}")
        for name in ("eminus", "e1plus", "e2plus"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))

    @property
    def endpoints(self):
        return (*self.eminus, *self.e1plus, *self.e2plus)

    @property
    def bands(self):
        return [self.eminus, self.e1plus, self.e2plus]

    @property
    def targets(self):
        return [-1.0, 1.0, 1.0]

    @property
    def gaps(self):
        """T1, T12 and T2; T2 is returned as ``(a, b)`` with ``a > b`` (wraps)."""
        p = self.endpoints
        return {"T1": (p[1], p[2]), "T12": (p[3], p[4]), "T2": (p[5], p[0])}

    def indicator(self, x):
        """Target value S_E(x): -1 on the stopband, +1 on passbands, nan elsewhere."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        out[(x >= self.eminus[0]) & (x <= self.eminus[1])] = -1.0
        for a, b in (self.e1plus, self.e2plus):
            out[(x >= a) & (x <= b)] = 1.0
        return out

    def contains(self, x) -> np.ndarray:
        return ~np.isnan(self.indicator(x))

    def apply(self, mob: "Mobius") -> "BandSystem":
        """Image under an orientation-preserving Mobius map keeping all endpoints finite."""
        img = [mob(p) for p in self.endpoints]
        return BandSystem((img[0], img[1]), (img[2], img[3]), (img[4], img[5]))

    def to_dict(self):
        return {"e_minus": list(self.eminus), "e1_plus": list(self.e1plus), "e2_plus": list(self.e2plus)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["e_minus"]), tuple(d["e1_plus"]), tuple(d["e2_plus"]))

    def cross_ratios(self):
        """Three Mobius invariants ``log cr(p0, p1; p2, pj)`` for j = 3, 4, 5."""
        p = self.endpoints
        return np.array([math.log(cross_ratio(p[0], p[1], p[2], p[j])) for j in (3, 4, 5)])


def cross_ratio(a, b, c, d):
    return ((c - a) * (d - b)) / ((c - b) * (d - a))


@dataclass(frozen=True)
class Mobius:
    """x -> (a x + b) / (c x + d) with ad - bc > 0."""

    a: float
    b: float
    c: float
    d: float

    def __call__(self, x):
        if math.isinf(x):
            return self.a / self.c if self.c else math.inf
        den = self.c * x + self.d
        if den == 0:
            return math.inf
        return (self.a * x + self.b) / den

    @property
    def det(self):
        return self.a * self.d - self.b * self.c


def mobius_to(p, q, r, P, Q, R) -> Mobius:
    """Real Mobius map with p, q, r -> P, Q, R (all finite)."""
    # map each triple to (0, 1, inf) and compose
    def std(p, q, r):
        # x -> ((x - p)(q - r)) / ((x - r)(q - p))
        return np.array([[q - r, -p * (q - r)], [q - p, -r * (q - p)]], dtype=float)

    A = std(p, q, r)
    B = std(P, Q, R)
    M = np.linalg.solve(B, A)
    return Mobius(*M.ravel())


def normalize_bands(eminus, e1plus, e2plus) -> tuple[BandSystem, Mobius]:
    """Move a three-band set into the finite chart.

    The right end of E- goes to -1, the left end of E1+ to 1 and a point of
    T2 to infinity.  Input bands are read cyclically on the extended line, so
    a stopband given as ``[a, b]`` with ``a > b`` wraps through infinity.
    """
    a0, a1 = eminus
    b0, b1 = e1plus
    c0, c1 = e2plus
    # a point of T2 on the circle between c1 and a0
    if math.isinf(c1) or math.isinf(a0):
        raise BandError("endpoints must be finite; use a wrapping interval instead")
    if c1 < a0:
        far = 0.5 * (c1 + a0)
    else:
        far = math.inf
    if math.isinf(far):
        span = b0 - a1
        mob = Mobius(2.0 / span, -1.0 - 2.0 * a1 / span, 0.0, 1.0)
    else:
        # x -> -1 / (x - far) composed with an affine map
        inv = Mobius(0.0, -1.0, 1.0, -far)
        ia1, ib0 = inv(a1), inv(b0)
        span = ib0 - ia1
        aff = Mobius(2.0 / span, -1.0 - 2.0 * ia1 / span, 0.0, 1.0)
        M = np.array([[aff.a, aff.b], [aff.c, aff.d]]) @ np.array([[inv.a, inv.b], [inv.c, inv.d]])
        mob = Mobius(*M.ravel())
    if mob.det <= 0:
        raise BandError("normalization reversed orientation")
    pts = [mob(v) for v in (a0, a1, b0, b1, c0, c1)]
    bs = BandSystem((pts[0], pts[1]), (pts[2], pts[3]), (pts[4], pts[5]))
    return bs, mob
