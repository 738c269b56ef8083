"""Polygonal membranes, directional chord widths and the shape gallery.

A membrane is an open polygonal region with holes.  Widths are computed by
an exact sweep: after rotating the chord direction to vertical, the region
between consecutive vertex abscissae is a union of trapezoids whose heights
vary linearly, so the supremum of a component's length is one of its two
closure limits.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import shapely
from shapely.geometry import Polygon
from shapely.geometry.polygon import orient

from ._search import golden_max
from .errors import InvalidParams, InvalidRing

GEO_EPS = 1e-9
TOL_CLUSTER = 1e-6
CONTINUUM_TOL = 1e-4
FACET_ANGLE = math.radians(5.0)
SNAP_MAX_VERTICES = 64


def _signed_area(ring):
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _clean_ring(points):
    ring = np.asarray(points, dtype=float)
    if ring.ndim != 2 or ring.shape[1] != 2 or not np.all(np.isfinite(ring)):
        raise InvalidRing("a ring must be a list of finite [x, y] pairs")
    if len(ring) > 1 and np.array_equal(ring[0], ring[-1]):
        ring = ring[:-1]
    keep = np.any(ring != np.roll(ring, 1, axis=0), axis=1)
    ring = ring[keep] if keep.any() else ring[:1]
    if len(ring) < 3:
        raise InvalidRing("a ring needs at least three distinct vertices")
    return ring


@dataclass(frozen=True)
class Membrane:
    """Polygon with holes; the outer ring is stored counterclockwise, holes clockwise.

    Orientation of the input rings is normalised; simplicity, containment
    and disjointness of the rings are validated.
    """

    outer: tuple
    holes: tuple = ()

    def __post_init__(self):
        outer = _clean_ring(self.outer)
        if _signed_area(outer) < 0:
            outer = outer[::-1]
        holes = []
        for h in self.holes:
            ring = _clean_ring(h)
            if _signed_area(ring) > 0:
                ring = ring[::-1]
            holes.append(ring)
        poly = Polygon(outer, holes)
        if not poly.is_valid:
            raise InvalidRing(f"invalid polygon: {shapely.is_valid_reason(poly)}")
        if abs(_signed_area(outer)) == 0 or any(_signed_area(h) == 0 for h in holes):
            raise InvalidRing("rings must enclose positive area")
        object.__setattr__(self, "outer", tuple(map(tuple, outer.tolist())))
        object.__setattr__(self, "holes", tuple(tuple(map(tuple, h.tolist())) for h in holes))

    def rings(self):
        return [np.array(self.outer)] + [np.array(h) for h in self.holes]

    @property
    def vertex_count(self):
        return len(self.outer) + sum(len(h) for h in self.holes)

    def to_dict(self):
        return {
            "schema": "anisospec/1",
            "outer": [list(p) for p in self.outer],
            "holes": [[list(p) for p in h] for h in self.holes],
        }

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise InvalidRing("membrane must be a JSON object")
        unknown = set(d) - {"schema", "outer", "holes"}
        if unknown:
            raise InvalidRing(f"unknown membrane fields {sorted(unknown)}")
        if "outer" not in d:
            raise InvalidRing("membrane needs an 'outer' ring")
        if d.get("schema", "anisospec/1") != "anisospec/1":
            raise InvalidRing(f"unsupported schema {d['schema']!r}")
        return cls(tuple(map(tuple, d["outer"])), tuple(tuple(map(tuple, h)) for h in d.get("holes", [])))

    def to_shapely(self):
        return Polygon(self.outer, self.holes)


@dataclass(frozen=True)
class SectionComponents:
    x: float
    intervals: tuple


@dataclass(frozen=True)
class WidthProfile:
    thetas: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    sup_width: float
    maxima: tuple
    attained_flag: str
    continuum: bool = False


@dataclass(frozen=True)
class Strip:
    """Family of parallel maximal chords: in the frame where chords are
    vertical, abscissae in (x_low, x_high) carry the chord from
    ``slope * x + intercept`` upward with the given length."""

    theta: float
    x_low: float
    x_high: float
    slope: float
    intercept: float
    length: float


# ------------------------------------------------------------ transformations

def _rotate_points(pts, phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.stack([c * pts[:, 0] - s * pts[:, 1], s * pts[:, 0] + c * pts[:, 1]], axis=-1)


def rotate_membrane(m, phi):
    """Rotate every vertex counterclockwise by phi about the origin."""
    return Membrane(tuple(map(tuple, _rotate_points(np.array(m.outer), phi).tolist())),
                    tuple(tuple(map(tuple, _rotate_points(np.array(h), phi).tolist())) for h in m.holes))


def scale_membrane(m, s):
    if not s > 0:
        raise InvalidParams("scale factor must be positive")
    return Membrane(tuple(map(tuple, (s * np.array(m.outer)).tolist())),
                    tuple(tuple(map(tuple, (s * np.array(h)).tolist())) for h in m.holes))


def translate_membrane(m, dx, dy):
    d = np.array([dx, dy], dtype=float)
    return Membrane(tuple(map(tuple, (np.array(m.outer) + d).tolist())),
                    tuple(tuple(map(tuple, (np.array(h) + d).tolist())) for h in m.holes))


# ------------------------------------------------------------ basic measures

def area(m):
    return _signed_area(np.array(m.outer)) + sum(_signed_area(np.array(h)) for h in m.holes)


def diameter(m):
    """Largest vertex distance on the outer ring; holes cannot enlarge it."""
    pts = np.array(m.outer)
    if len(pts) > 64:
        from scipy.spatial import ConvexHull

        pts = pts[ConvexHull(pts).vertices]
    diff = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt(np.max(np.einsum("ijk,ijk->ij", diff, diff))))


def is_convex(m):
    if m.holes:
        return False
    v = np.array(m.outer)
    d = np.roll(v, -1, axis=0) - v
    cross = d[:, 0] * np.roll(d, -1, axis=0)[:, 1] - d[:, 1] * np.roll(d, -1, axis=0)[:, 0]
    scale = np.max(np.sum(d * d, axis=1))
    return bool(np.all(cross >= -1e-12 * scale))


def bbox_scale(m):
    v = np.array(m.outer)
    return float(np.max(v.max(axis=0) - v.min(axis=0)))


# ------------------------------------------------------------ sections

def _edges(rings):
    p = np.concatenate(rings)
    q = np.concatenate([np.roll(r, -1, axis=0) for r in rings])
    return p, q


def _y_at(p, q, x):
    """Ordinate of each (non-vertical) edge line at x, clamped to the edge's own span."""
    lo = np.minimum(p[:, 0], q[:, 0])
    hi = np.maximum(p[:, 0], q[:, 0])
    xc = np.clip(x, lo, hi)
    dx = q[:, 0] - p[:, 0]
    t = np.where(dx != 0, (xc - p[:, 0]) / np.where(dx != 0, dx, 1.0), 0.0)
    return p[:, 1] + t * (q[:, 1] - p[:, 1])


def _pair(ys):
    ys = np.sort(ys)
    if len(ys) % 2:
        raise InvalidRing("odd number of boundary crossings; the membrane is not a simple region")
    return [(float(a), float(b)) for a, b in zip(ys[0::2], ys[1::2]) if b > a]


def _intersect(a, b):
    out, i, j = [], 0, 0
    while i < len(a) and j < len(b):
        lo, hi = max(a[i][0], b[j][0]), min(a[i][1], b[j][1])
        if hi > lo:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def vertical_components(m, x):
    """Open intervals of {y : (x, y) in M}, sorted by y.

    The section is the intersection of the two one-sided limits, split at
    boundary vertices lying on the line, so chords grazing a vertex do not
    merge components.
    """
    x = float(x)
    p, q = _edges(m.rings())
    right = ((p[:, 0] <= x) != (q[:, 0] <= x))
    left = ((p[:, 0] < x) != (q[:, 0] < x))
    xs = np.full(len(p), x)
    yr = _y_at(p[right], q[right], xs[right])
    yl = _y_at(p[left], q[left], xs[left])
    inter = _intersect(_pair(yl), _pair(yr))
    cuts = sorted({float(v[1]) for v in p if v[0] == x})
    for c in cuts:
        split = []
        for lo, hi in inter:
            if lo < c < hi:
                split += [(lo, c), (c, hi)]
            else:
                split.append((lo, hi))
        inter = split
    return SectionComponents(x, tuple(inter))


@dataclass
class _Sweep:
    xl: np.ndarray
    xr: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    len_l: np.ndarray
    len_r: np.ndarray
    p: np.ndarray
    q: np.ndarray


def _sweep(rings):
    """Components of all vertical sections, one row per (slab, component)."""
    p, q = _edges(rings)
    allx = np.concatenate([r[:, 0] for r in rings])
    allp = np.concatenate(rings)
    eps = GEO_EPS * float(np.max(allp.max(axis=0) - allp.min(axis=0)))
    ev = np.unique(allx)
    ev = ev[np.r_[True, np.diff(ev) > eps]]
    # Index of the merged event each endpoint snaps to.
    i1 = np.searchsorted(ev, p[:, 0] + eps, side="right") - 1
    i2 = np.searchsorted(ev, q[:, 0] + eps, side="right") - 1
    lo, hi = np.minimum(i1, i2), np.maximum(i1, i2)
    counts = hi - lo
    edge = np.repeat(np.arange(len(p)), counts)
    offs = np.repeat(np.cumsum(counts) - counts, counts)
    slab = np.repeat(lo, counts) + (np.arange(len(edge)) - offs)
    xl, xr = ev[slab], ev[slab + 1]
    ym = _y_at(p[edge], q[edge], 0.5 * (xl + xr))
    order = np.lexsort((ym, slab))
    edge, slab, xl, xr = edge[order], slab[order], xl[order], xr[order]
    if len(slab):
        starts = np.flatnonzero(np.r_[True, slab[1:] != slab[:-1]])
        sizes = np.diff(np.r_[starts, len(slab)])
        if np.any(sizes % 2):
            raise InvalidRing("odd number of boundary crossings; the membrane is not a simple region")
        pos = np.arange(len(slab)) - np.repeat(starts, sizes)
    else:
        pos = np.zeros(0, dtype=int)
    a, b = pos % 2 == 0, pos % 2 == 1
    lower, upper = edge[a], edge[b]
    xl, xr = xl[a], xr[a]
    len_l = _y_at(p[upper], q[upper], xl) - _y_at(p[lower], q[lower], xl)
    len_r = _y_at(p[upper], q[upper], xr) - _y_at(p[lower], q[lower], xr)
    return _Sweep(xl, xr, lower, upper, len_l, len_r, p, q)


def _rotated_rings(m, theta):
    # Rotating by pi/2 - theta makes direction theta vertical.
    return [_rotate_points(r, math.pi / 2 - theta) for r in m.rings()]


def chord_width(m, theta):
    """Supremum of lengths of open segments of direction theta inside M."""
    sw = _sweep(_rotated_rings(m, float(theta)))
    if not len(sw.len_l):
        return 0.0
    return float(max(sw.len_l.max(), sw.len_r.max(), 0.0))


# ------------------------------------------------------------ width profile

def _angle_gap(a, b):
    d = abs(a - b) % math.pi
    return min(d, math.pi - d)


def _touching_directions(m, theta):
    """Directions through pairs of vertices lying on the widest chord line near theta."""
    rings = _rotated_rings(m, theta)
    sw = _sweep(rings)
    k = int(np.argmax(np.maximum(sw.len_l, sw.len_r)))
    x_star = sw.xl[k] if sw.len_l[k] >= sw.len_r[k] else sw.xr[k]
    pts = np.concatenate(rings)
    near = pts[np.abs(pts[:, 0] - x_star) <= 1e-6 * bbox_scale(m)]
    if len(near) < 2 or len(near) > SNAP_MAX_VERTICES:
        return []
    i, j = np.triu_indices(len(near), 1)
    d = near[j] - near[i]
    # Back to the original frame: undo the rotation by pi/2 - theta.
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]) - (math.pi / 2 - theta), math.pi)
    ang = ang[[_angle_gap(a, theta) < 1e-6 for a in ang]]
    return sorted(set(ang.tolist()), key=lambda a: _angle_gap(a, theta))


def _cluster_flag(m, theta, sup):
    """Classify one maximising direction; returns (flag, supremum estimate).

    L_theta is lower semicontinuous, so a supremum that is not attained is
    approached next to a direction where L jumps down.  Such a direction
    passes through two boundary vertices; it is recovered from the vertices
    touching the near-maximal chord and tested exactly.
    """
    deficit = [[sup - chord_width(m, theta + sgn * d) for d in (1e-7, 1e-8)] for sgn in (-1.0, 1.0)]
    if all(d[-1] <= 1e-5 * sup for d in deficit) and chord_width(m, theta) >= sup * (1 - 1e-9):
        return "attained", sup
    cands = _touching_directions(m, theta)
    if not cands:
        return "unresolved", sup
    if any(chord_width(m, c) >= sup * (1 - 1e-9) for c in cands):
        return "attained", sup
    if min(d[-1] for d in deficit) > 1e-5 * sup:
        return "unresolved", sup
    # Linear extrapolation of the one-sided limit at the jump direction.
    c = cands[0]
    limit = max(2 * chord_width(m, c + s * 1e-6) - chord_width(m, c + s * 2e-6) for s in (-1.0, 1.0))
    return "not_attained", max(sup, limit)


@lru_cache(maxsize=64)
def _profile(m, n_theta, refine):
    thetas = np.arange(n_theta) * (math.pi / n_theta)
    values = np.array([chord_width(m, t) for t in thetas])
    gmax = float(values.max())
    if gmax - float(values.min()) <= CONTINUUM_TOL * gmax:
        return WidthProfile(thetas, values, gmax, (), "attained", True)
    step = math.pi / n_theta
    prev, nxt = np.roll(values, 1), np.roll(values, -1)
    peaks = np.flatnonzero((values >= prev) & (values >= nxt) & (values >= gmax * (1 - 5e-2)))
    found = [(float(thetas[i]), float(values[i])) for i in peaks]
    if refine:
        f = lambda t: chord_width(m, t)
        found = [golden_max(f, thetas[i] - step, thetas[i] + step, iters=60) for i in peaks]
        found = [(t % math.pi, v) for t, v in found]
    sup = max(max(v for _, v in found), gmax)
    top = sorted((t, v) for t, v in found if v >= sup * (1 - TOL_CLUSTER))
    clusters = []
    for t, v in top:
        if clusters and _angle_gap(t, clusters[-1][-1][0]) < 1.5 * step:
            clusters[-1].append((t, v))
        else:
            clusters.append([(t, v)])
    if len(clusters) > 1 and _angle_gap(clusters[0][0][0], clusters[-1][-1][0]) < 1.5 * step:
        clusters[0] = clusters.pop() + clusters[0]
    reps = [max(c, key=lambda tv: tv[1]) for c in clusters]
    if not refine:
        maxima = tuple(sorted(reps))
        return WidthProfile(thetas, values, sup, maxima, "unresolved")
    results = [_cluster_flag(m, t, sup) for t, _ in reps]
    flags = [f for f, _ in results]
    if any(f == "attained" for f in flags):
        flag = "attained"
    elif all(f == "not_attained" for f in flags):
        flag = "not_attained"
        sup = max(lim for _, lim in results)
    else:
        flag = "unresolved"
    maxima = tuple(sorted((t, v) for (t, v), f in zip(reps, flags)))
    return WidthProfile(thetas, values, sup, maxima, flag)


def width_profile(m, n_theta=1024, refine=True):
    """Sample L_theta on a uniform grid of [0, pi) and locate its global maxima.

    A profile whose relative variation is below ``CONTINUUM_TOL`` is a
    polygonal stand-in for a rotationally symmetric shape and is reported
    as a continuum with no discrete maxima.
    """
    if n_theta < 64:
        raise InvalidParams("n_theta must be at least 64")
    return _profile(m, int(n_theta), bool(refine))


def has_optimal_design(m, n_theta=1024):
    """'attained', 'not_attained' or 'unresolved' for the supremum of L_theta."""
    return width_profile(m, n_theta).attained_flag


# ------------------------------------------------------------ attainment

def _facet_edges(rings, facet_angle):
    """Edges whose boundary turns by less than facet_angle at an end of their straight run."""
    flags = []
    for r in rings:
        d = np.roll(r, -1, axis=0) - r
        prev = np.roll(d, 1, axis=0)
        turn = np.abs(np.arctan2(prev[:, 0] * d[:, 1] - prev[:, 1] * d[:, 0],
                                 np.sum(prev * d, axis=1)))
        n = len(r)
        corner = turn > 1e-9
        if not corner.any():
            flags.append(np.ones(n, dtype=bool))
            continue
        idx = np.flatnonzero(corner)
        # corner at or before vertex e, and at or after vertex e + 1
        before = idx[np.searchsorted(idx, np.arange(n), side="right") - 1]
        after = idx[np.searchsorted(idx, (np.arange(n) + 1) % n) % len(idx)]
        flags.append((turn[before] < facet_angle) | (turn[after] < facet_angle))
    return np.concatenate(flags)


def _attainment(m, theta, aligned, facets):
    rings = _rotated_rings(m, theta)
    sw = _sweep(rings)
    if not len(sw.len_l):
        return False, None
    top = float(max(sw.len_l.max(), sw.len_r.max()))
    eps = GEO_EPS * bbox_scale(m)
    dx = sw.q[:, 0] - sw.p[:, 0]
    slope = np.where(np.abs(dx) > 0, (sw.q[:, 1] - sw.p[:, 1]) / np.where(dx != 0, dx, 1.0), np.inf)
    lo_s, up_s = slope[sw.lower], slope[sw.upper]
    ok = (sw.len_l >= top * (1 - 1e-9)) & (sw.len_r >= top * (1 - 1e-9)) & (sw.xr - sw.xl > eps)
    if aligned:
        ok &= (np.abs(lo_s) <= 1e-9) & (np.abs(up_s) <= 1e-9)
    else:
        ok &= np.abs(lo_s - up_s) <= 1e-9
    ok &= ~facets[sw.lower] & ~facets[sw.upper]
    if not ok.any():
        return False, None
    k = int(np.argmax(np.where(ok, sw.xr - sw.xl, -1.0)))
    e = sw.lower[k]
    intercept = float(sw.p[e, 1] - lo_s[k] * sw.p[e, 0])
    strip = Strip(theta % math.pi, float(sw.xl[k]), float(sw.xr[k]), float(lo_s[k]), intercept, top)
    return True, strip


def attainment_check(m, theta, aligned=True, facet_angle=FACET_ANGLE):
    """Whether L_theta is realised by a strip of equal maximal chords.

    With ``aligned`` (default) the chords of the strip must end on edges
    perpendicular to theta; otherwise any pair of parallel edges counts.
    Edges that sample a curved arc (turn below ``facet_angle``) never
    qualify.  Returns ``(flag, Strip or None)``.
    """
    facets = _facet_edges(m.rings(), facet_angle)
    return _attainment(m, float(theta), aligned, facets)


def attainment_multiplicity(m, n_theta=256, aligned=True, facet_angle=FACET_ANGLE):
    """Number of distinct directions (mod pi) passing :func:`attainment_check`.

    Candidates are the normals of non-facet edges; the literal variant
    also scans edge directions and a uniform grid of ``n_theta`` angles.
    """
    rings = m.rings()
    facets = _facet_edges(rings, facet_angle)
    p, q = _edges(rings)
    d = (q - p)[~facets]
    ang = np.mod(np.arctan2(d[:, 1], d[:, 0]) + math.pi / 2, math.pi)
    if not aligned:
        ang = np.concatenate([ang, np.mod(ang + math.pi / 2, math.pi),
                              np.arange(n_theta) * math.pi / n_theta])
    cands = []
    for a in np.sort(ang):
        if not cands or _angle_gap(a, cands[-1]) > 1e-9:
            cands.append(float(a))
    if len(cands) > 1 and _angle_gap(cands[0], cands[-1]) <= 1e-9:
        cands.pop()
    hits = [a for a in cands if _attainment(m, a, aligned, facets)[0]]
    return len(hits)


# ------------------------------------------------------------ generators

def _positive(**kw):
    for k, v in kw.items():
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise InvalidParams(f"{k} must be a positive number, got {v!r}")


def _count(name, n, minimum):
    if not isinstance(n, (int, np.integer)) or n < minimum:
        raise InvalidParams(f"{name} must be an integer >= {minimum}, got {n!r}")


def _circle(r, n, start=0.0):
    t = start + 2 * math.pi * np.arange(n) / n
    return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)


def rect(a, b):
    _positive(a=a, b=b)
    return Membrane(((0.0, 0.0), (a, 0.0), (a, b), (0.0, b)))


def rotated_rect(a, b, phi):
    """Rectangle of sides a (along the rotated x-axis) and b, centred at the origin."""
    _positive(a=a, b=b)
    v = np.array([[-a / 2, -b / 2], [a / 2, -b / 2], [a / 2, b / 2], [-a / 2, b / 2]])
    return Membrane(tuple(map(tuple, _rotate_points(v, float(phi)).tolist())))


def disk(r, n=256):
    _positive(r=r)
    _count("n", n, 16)
    return Membrane(tuple(map(tuple, _circle(r, n).tolist())))


def annulus(R, r, n=256):
    _positive(R=R, r=r)
    _count("n", n, 16)
    if not r < R:
        raise InvalidParams("inner radius must be below the outer radius")
    return Membrane(tuple(map(tuple, _circle(R, n).tolist())),
                    (tuple(map(tuple, _circle(r, n)[::-1].tolist())),))


def cropped_disk(r, h, n=256):
    """Disk of radius r cut by the two chords x = -h and x = h.

    Arc vertices closer than a quarter edge to a cut are dropped so that the
    polygon has no edges much shorter than the sampling.
    """
    _positive(r=r, h=h)
    _count("n", n, 16)
    if not h < r:
        raise InvalidParams("cut offset must be below the radius")
    arc = _circle(r, n)
    gap = 0.25 * 2 * r * math.sin(math.pi / n)
    arc = arc[np.abs(arc[:, 0]) < h - gap]
    y = math.sqrt(r * r - h * h)
    corners = np.array([[h, -y], [h, y], [-h, y], [-h, -y]])
    pts = np.concatenate([arc, corners])
    order = np.argsort(np.mod(np.arctan2(pts[:, 1], pts[:, 0]), 2 * math.pi))
    return Membrane(tuple(map(tuple, pts[order].tolist())))


def asterisk(m, length=1.0, width=0.1):
    """Union of m congruent bars through the origin at angles j*pi/m."""
    _count("m", m, 1)
    _positive(length=length, width=width)
    if not width < length:
        raise InvalidParams("bar width must be below its length")
    bar = np.array([[-length / 2, -width / 2], [length / 2, -width / 2],
                    [length / 2, width / 2], [-length / 2, width / 2]])
    bars = [Polygon(_rotate_points(bar, j * math.pi / m)) for j in range(m)]
    shape = orient(shapely.union_all(bars), 1.0)
    return Membrane(tuple(shape.exterior.coords), tuple(tuple(i.coords) for i in shape.interiors))


def star(m, R=0.5, r=0.15):
    """Star with 2m tips at radius R and 2m notches at radius r.

    Opposite tips pair up, so the widest chords come in m directions.
    """
    _count("m", m, 1)
    _positive(R=R, r=r)
    if not r < R:
        raise InvalidParams("star notch radius must be below the tip radius")
    k = np.arange(4 * m)
    rad = np.where(k % 2 == 0, R, r)
    t = k * math.pi / (2 * m)
    return Membrane(tuple(map(tuple, np.stack([rad * np.cos(t), rad * np.sin(t)], axis=-1).tolist())))


def _arc(cx, r, a0, a1, n):
    t = a0 + (a1 - a0) * np.arange(n) / n
    return np.stack([cx + r * np.cos(t), r * np.sin(t)], axis=-1)


def s_chain(k, n=64):
    """Serpentine ring of 24 k^2 half-annuli of total area 1.

    Half i is centred at (i (a + b), 0), lies above the axis for even i and
    below for odd i, with radii a = 1/(6 k sqrt(pi)) and b = 2a; each half
    has area 1/(24 k^2).  Arcs are sampled with n segments.
    """
    _count("k", k, 1)
    _count("n", n, 4)
    a = 1.0 / (6 * k * math.sqrt(math.pi))
    b = 2 * a
    count = 24 * k * k
    centers = [i * (a + b) for i in range(count)]
    lower_side = []
    for i, c in enumerate(centers):
        if i % 2 == 0:
            if i == 0:
                lower_side.append(np.array([[c - b, 0.0]]))
            lower_side.append(_arc(c, a, math.pi, 0.0, n))
        else:
            lower_side.append(_arc(c, b, math.pi, 2 * math.pi, n))
    # count is even, so the last half lies below the axis and its outer arc
    # ends at the start of the right end cap.
    lower_side.append(np.array([[centers[-1] + b, 0.0]]))
    upper_side = []
    for i in reversed(range(count)):
        c = centers[i]
        if i % 2 == 0:
            upper_side.append(_arc(c, b, 0.0, math.pi, n))
        else:
            upper_side.append(_arc(c, a, 2 * math.pi, math.pi, n))
    ring = np.concatenate(lower_side + upper_side)
    return Membrane(tuple(map(tuple, ring.tolist())))


S_COUNTEREXAMPLE = (
    (-1.0, 0.0), (-0.5, -0.3), (0.15, -0.3), (0.2, 0.0), (0.25, -0.3), (0.5, -0.3),
    (1.0, 0.0), (0.5, 0.3), (-0.15, 0.3), (-0.2, 0.0), (-0.25, 0.3), (-0.5, 0.3),
)


def s_counterexample():
    """Hexagon with two notches whose tips sit on its long diagonal.

    The diagonal from (-1, 0) to (1, 0) is cut by the notch tips at
    (-0.2, 0) and (0.2, 0), but slightly tilted chords slip between them,
    so L_theta tends to 2 as theta decreases to 0 while L_0 is only 1.2.
    """
    return Membrane(S_COUNTEREXAMPLE)


GENERATORS = {
    "rect": rect,
    "rotated_rect": rotated_rect,
    "disk": disk,
    "annulus": annulus,
    "cropped_disk": cropped_disk,
    "asterisk": asterisk,
    "star": star,
    "s_chain": s_chain,
    "s_counterexample": s_counterexample,
}
