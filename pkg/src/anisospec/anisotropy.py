"""Planar anisotropies as immutable constructor trees.

An anisotropy is a nonnegative, convex, 1-homogeneous function on R^2.
Every node below preserves those three properties, so any tree built from
them is a valid anisotropy.  Evaluation is vectorised: ``H(xi)`` accepts an
array of shape ``(..., 2)`` and returns an array of shape ``(...)``.

Node kinds
----------
``Euclidean``            |xi|
``Directional(c, t)``    c |cos t * x + sin t * y|
``Quadratic(A)``         sqrt(|xi^T A xi|), A symmetric positive semidefinite
``WeightedLq(q, a, b)``  (a |x|^q + b |y|^q)^(1/q)
``Scaled(alpha, H)``     alpha * H
``Rotated(phi, H)``      H(R_phi xi)
``MaxOf(H1, ...)``       max_i H_i
``LpSum(p, H1, ...)``    (sum_i H_i^p)^(1/p)
``Zero``                 0
"""

import math
from dataclasses import dataclass

import numpy as np

from ._search import golden_max, golden_min
from .errors import (
    ClassificationAmbiguous,
    DegenerateBody,
    DominationFailed,
    InvalidAnisotropy,
    InvalidParams,
    OriginNotInterior,
    ZeroAnisotropy,
)

CIRCLE_SAMPLES = 4096
DEFAULT_TOL = 1e-9


def _rotation(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def _finite(x, name):
    x = float(x)
    if not math.isfinite(x):
        raise InvalidAnisotropy(f"{name} must be finite, got {x!r}")
    return x


class Anisotropy:
    """Base node.  Subclasses implement ``value`` and ``gradient``."""

    kind = ""

    def __call__(self, xi):
        return self.value(np.asarray(xi, dtype=float))

    def value(self, v):
        raise NotImplementedError

    def gradient(self, v):
        """An element of the a.e. gradient, shape ``(..., 2)``; zero at the origin."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Euclidean(Anisotropy):
    kind = "euclidean"

    def value(self, v):
        return np.hypot(v[..., 0], v[..., 1])

    def gradient(self, v):
        r = np.hypot(v[..., 0], v[..., 1])
        safe = np.where(r > 0, r, 1.0)
        return np.where((r > 0)[..., None], v / safe[..., None], 0.0)

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Zero(Anisotropy):
    kind = "zero"

    def value(self, v):
        return np.zeros(v.shape[:-1])

    def gradient(self, v):
        return np.zeros(v.shape)

    def to_dict(self):
        return {"kind": self.kind}


@dataclass(frozen=True)
class Directional(Anisotropy):
    """``c |cos(theta) x + sin(theta) y|``; theta is stored reduced to [0, pi)."""

    c: float
    theta: float
    kind = "directional"

    def __post_init__(self):
        c = _finite(self.c, "c")
        if c < 0:
            raise InvalidAnisotropy("directional scale must be nonnegative")
        t = math.fmod(_finite(self.theta, "theta"), math.pi)
        if t < 0:
            t += math.pi
        if t >= math.pi:
            t = 0.0
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "theta", t)

    @property
    def normal(self):
        return np.array([math.cos(self.theta), math.sin(self.theta)])

    def value(self, v):
        return self.c * np.abs(v @ self.normal)

    def gradient(self, v):
        s = np.sign(v @ self.normal)
        return self.c * s[..., None] * self.normal

    def to_dict(self):
        return {"kind": self.kind, "c": self.c, "theta": self.theta}


@dataclass(frozen=True)
class Quadratic(Anisotropy):
    """``sqrt(|xi^T A xi|)`` for a symmetric positive semidefinite 2x2 matrix."""

    matrix: tuple
    kind = "quadratic"

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (2, 2) or not np.all(np.isfinite(a)):
            raise InvalidAnisotropy("quadratic matrix must be a finite 2x2 array")
        if abs(a[0, 1] - a[1, 0]) > 1e-12 * max(1.0, np.abs(a).max()):
            raise InvalidAnisotropy("quadratic matrix must be symmetric")
        a = 0.5 * (a + a.T)
        if np.linalg.eigvalsh(a)[0] < -1e-12 * max(1.0, np.abs(a).max()):
            raise InvalidAnisotropy("quadratic matrix must be positive semidefinite")
        object.__setattr__(self, "matrix", tuple(map(tuple, a.tolist())))

    @property
    def array(self):
        return np.array(self.matrix)

    def value(self, v):
        a = self.array
        q = np.einsum("...i,ij,...j->...", v, a, v)
        return np.sqrt(np.abs(q))

    def gradient(self, v):
        a = self.array
        h = self.value(v)
        av = v @ a
        safe = np.where(h > 0, h, 1.0)
        return np.where((h > 0)[..., None], av / safe[..., None], 0.0)

    def to_dict(self):
        return {"kind": self.kind, "matrix": [list(r) for r in self.matrix]}


@dataclass(frozen=True)
class WeightedLq(Anisotropy):
    """``(wx |x|^q + wy |y|^q)^(1/q)`` with q >= 1 and nonnegative weights."""

    q: float
    wx: float
    wy: float
    kind = "weighted_lq"

    def __post_init__(self):
        q, wx, wy = (_finite(self.q, "q"), _finite(self.wx, "wx"), _finite(self.wy, "wy"))
        if q < 1:
            raise InvalidAnisotropy("weighted_lq exponent must be >= 1")
        if wx < 0 or wy < 0:
            raise InvalidAnisotropy("weighted_lq weights must be nonnegative")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "wx", wx)
        object.__setattr__(self, "wy", wy)

    def _sum(self, v):
        return self.wx * np.abs(v[..., 0]) ** self.q + self.wy * np.abs(v[..., 1]) ** self.q

    def value(self, v):
        return self._sum(v) ** (1.0 / self.q)

    def gradient(self, v):
        s = self._sum(v)
        safe = np.where(s > 0, s, 1.0)
        outer = np.where(s > 0, safe ** (1.0 / self.q - 1.0), 0.0)
        gx = self.wx * np.abs(v[..., 0]) ** (self.q - 1.0) * np.sign(v[..., 0])
        gy = self.wy * np.abs(v[..., 1]) ** (self.q - 1.0) * np.sign(v[..., 1])
        return np.stack([gx, gy], axis=-1) * outer[..., None]

    def to_dict(self):
        return {"kind": self.kind, "q": self.q, "wx": self.wx, "wy": self.wy}


@dataclass(frozen=True)
class Scaled(Anisotropy):
    alpha: float
    child: Anisotropy
    kind = "scaled"

    def __post_init__(self):
        a = _finite(self.alpha, "alpha")
        if a < 0:
            raise InvalidAnisotropy("scale factor must be nonnegative")
        object.__setattr__(self, "alpha", a)

    def value(self, v):
        return self.alpha * self.child.value(v)

    def gradient(self, v):
        return self.alpha * self.child.gradient(v)

    def to_dict(self):
        return {"kind": self.kind, "alpha": self.alpha, "child": self.child.to_dict()}


@dataclass(frozen=True)
class Rotated(Anisotropy):
    """``child(R_phi xi)`` with R_phi the counterclockwise rotation by phi."""

    phi: float
    child: Anisotropy
    kind = "rotated"

    def __post_init__(self):
        object.__setattr__(self, "phi", _finite(self.phi, "phi"))

    def value(self, v):
        return self.child.value(v @ _rotation(self.phi).T)

    def gradient(self, v):
        r = _rotation(self.phi)
        return self.child.gradient(v @ r.T) @ r

    def to_dict(self):
        return {"kind": self.kind, "phi": self.phi, "child": self.child.to_dict()}


@dataclass(frozen=True)
class MaxOf(Anisotropy):
    children: tuple
    kind = "max"

    def __post_init__(self):
        kids = tuple(self.children)
        if not kids:
            raise InvalidAnisotropy("max node needs at least one child")
        object.__setattr__(self, "children", kids)

    def value(self, v):
        return np.max(np.stack([k.value(v) for k in self.children]), axis=0)

    def gradient(self, v):
        vals = np.stack([k.value(v) for k in self.children])
        grads = np.stack([k.gradient(v) for k in self.children])
        idx = np.argmax(vals, axis=0)
        return np.take_along_axis(grads, idx[None, ..., None], axis=0)[0]

    def to_dict(self):
        return {"kind": self.kind, "children": [k.to_dict() for k in self.children]}


@dataclass(frozen=True)
class LpSum(Anisotropy):
    p: float
    children: tuple
    kind = "lpsum"

    def __post_init__(self):
        p = _finite(self.p, "p")
        if p < 1:
            raise InvalidAnisotropy("lpsum exponent must be >= 1")
        kids = tuple(self.children)
        if not kids:
            raise InvalidAnisotropy("lpsum node needs at least one child")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "children", kids)

    def value(self, v):
        vals = np.stack([k.value(v) for k in self.children])
        return np.sum(vals ** self.p, axis=0) ** (1.0 / self.p)

    def gradient(self, v):
        vals = np.stack([k.value(v) for k in self.children])
        grads = np.stack([k.gradient(v) for k in self.children])
        s = np.sum(vals ** self.p, axis=0)
        safe = np.where(s > 0, s, 1.0)
        outer = np.where(s > 0, safe ** (1.0 / self.p - 1.0), 0.0)
        inner = np.sum((vals ** (self.p - 1.0))[..., None] * grads, axis=0)
        return inner * outer[..., None]

    def to_dict(self):
        return {"kind": self.kind, "p": self.p, "children": [k.to_dict() for k in self.children]}


@dataclass(frozen=True)
class Classification:
    """Outcome of :func:`classify`; ``c`` and ``theta`` are set only when degenerate."""

    kind: str
    c: float = None
    theta: float = None

    @property
    def is_degenerate(self):
        return self.kind == "degenerate"


@dataclass(frozen=True)
class ConvexBodyPoly:
    """Origin-symmetric convex polygon, vertices counterclockwise."""

    vertices: tuple

    @property
    def array(self):
        return np.array(self.vertices, dtype=float)


# ---------------------------------------------------------------- evaluation

def evaluate(h, xi):
    """Return H(xi); ``xi`` may be one vector or an array of shape (..., 2)."""
    out = h(xi)
    return float(out) if np.ndim(out) == 0 else out


def circle_profile(h, phis):
    phis = np.asarray(phis, dtype=float)
    return h(np.stack([np.cos(phis), np.sin(phis)], axis=-1))


def _sampled_extremum(h, sign):
    # h is even, so half the circle suffices.
    phis = np.linspace(0.0, math.pi, CIRCLE_SAMPLES, endpoint=False)
    vals = sign * circle_profile(h, phis)
    step = math.pi / CIRCLE_SAMPLES
    order = np.argsort(-vals, kind="stable")[:4]
    f = lambda t: sign * float(circle_profile(h, [t])[0])
    best_phi, best_val = float(phis[order[0]]), float(vals[order[0]])
    for i in order:
        phi, val = golden_max(f, phis[i] - step, phis[i] + step)
        if val > best_val:
            best_phi, best_val = phi, val
    return math.fmod(best_phi + math.pi, math.pi), sign * best_val


def circle_argmax(h):
    """Direction angle in [0, pi) and value of the maximum of H on the unit circle."""
    if isinstance(h, Quadratic):
        w, vecs = np.linalg.eigh(h.array)
        v = vecs[:, 1]
        return math.fmod(math.atan2(v[1], v[0]) + 2 * math.pi, math.pi), math.sqrt(max(w[1], 0.0))
    if isinstance(h, Directional):
        return h.theta, h.c
    return _sampled_extremum(h, 1.0)


def circle_argmin(h):
    """Direction angle in [0, pi) and value of the minimum of H on the unit circle."""
    if isinstance(h, Euclidean):
        return 0.0, 1.0
    if isinstance(h, Zero):
        return 0.0, 0.0
    if isinstance(h, Directional):
        return math.fmod(h.theta + math.pi / 2, math.pi), 0.0
    if isinstance(h, Quadratic):
        w, vecs = np.linalg.eigh(h.array)
        v = vecs[:, 0]
        return math.fmod(math.atan2(v[1], v[0]) + 2 * math.pi, math.pi), math.sqrt(max(w[0], 0.0))
    if isinstance(h, Scaled):
        phi, val = circle_argmin(h.child)
        return phi, h.alpha * val
    if isinstance(h, Rotated):
        phi, val = circle_argmin(h.child)
        return math.fmod(phi - h.phi + 4 * math.pi, math.pi), val
    return _sampled_extremum(h, -1.0)


def sup_norm(h):
    """max of H over the unit circle; exact except under ``LpSum`` nodes."""
    if isinstance(h, Euclidean):
        return 1.0
    if isinstance(h, Zero):
        return 0.0
    if isinstance(h, Directional):
        return h.c
    if isinstance(h, Quadratic):
        return math.sqrt(max(np.linalg.eigvalsh(h.array)[1], 0.0))
    if isinstance(h, WeightedLq):
        # On the circle, wx a^s + wy (1-a)^s with a = cos^2 and s = q/2.
        if h.q >= 2:
            return max(h.wx, h.wy) ** (1.0 / h.q)
        k = 2.0 / (2.0 - h.q)
        return (h.wx ** k + h.wy ** k) ** (1.0 / (k * h.q))
    if isinstance(h, Scaled):
        return h.alpha * sup_norm(h.child)
    if isinstance(h, Rotated):
        return sup_norm(h.child)
    if isinstance(h, MaxOf):
        return max(sup_norm(k) for k in h.children)
    return circle_argmax(h)[1]


def quadratic_form(h):
    """Matrix A with H(xi)^2 = xi^T A xi, or None when H is not of that form."""
    if isinstance(h, Euclidean):
        return np.eye(2)
    if isinstance(h, Zero):
        return np.zeros((2, 2))
    if isinstance(h, Directional):
        n = h.normal
        return h.c ** 2 * np.outer(n, n)
    if isinstance(h, Quadratic):
        return h.array
    if isinstance(h, WeightedLq) and h.q == 2.0:
        return np.diag([h.wx, h.wy])
    if isinstance(h, Scaled):
        a = quadratic_form(h.child)
        return None if a is None else h.alpha ** 2 * a
    if isinstance(h, Rotated):
        a = quadratic_form(h.child)
        r = _rotation(h.phi)
        return None if a is None else r.T @ a @ r
    if isinstance(h, LpSum) and h.p == 2.0:
        parts = [quadratic_form(k) for k in h.children]
        return None if any(a is None for a in parts) else sum(parts)
    if isinstance(h, MaxOf) and len(h.children) == 1:
        return quadratic_form(h.children[0])
    return None


# ------------------------------------------------------------ classification

def classify(h, tol=DEFAULT_TOL):
    """Split H into zero, degenerate ``c |cos t x + sin t y|`` or positive.

    Raises ClassificationAmbiguous when the circle minimum falls inside
    ``(tol, 10 tol) * ||H||`` or when a degenerate candidate does not match
    its closed form on a dense circle sample.
    """
    if not tol > 0:
        raise InvalidParams("tol must be positive")
    norm = sup_norm(h)
    if norm <= tol * np.finfo(float).eps:
        return Classification("zero")
    phi_min, hmin = circle_argmin(h)
    if hmin <= tol * norm:
        theta = math.fmod(phi_min + math.pi / 2, math.pi)
        cand = Directional(norm, theta)
        phis = np.linspace(0.0, 2 * math.pi, CIRCLE_SAMPLES, endpoint=False)
        gap = np.max(np.abs(circle_profile(h, phis) - circle_profile(cand, phis)))
        if gap > 10 * tol * norm:
            raise ClassificationAmbiguous(
                f"circle minimum {hmin:.3e} is tiny but H deviates from a degenerate "
                f"form by {gap:.3e}; refine the sampling"
            )
        return Classification("degenerate", cand.c, cand.theta)
    if hmin < 10 * tol * norm:
        raise ClassificationAmbiguous(
            f"circle minimum {hmin:.3e} lies in the ambiguity band of ||H|| = {norm:.3e}"
        )
    return Classification("positive")


def rotate(h, phi):
    """Return H_A with H_A(xi) = H(A xi), A the counterclockwise rotation by phi."""
    phi = float(phi)
    if isinstance(h, (Euclidean, Zero)):
        return h
    if isinstance(h, Directional):
        return Directional(h.c, h.theta - phi)
    if isinstance(h, Quadratic):
        r = _rotation(phi)
        a = r.T @ h.array @ r
        return Quadratic(0.5 * (a + a.T))
    if isinstance(h, Rotated):
        return Rotated(h.phi + phi, h.child)
    return Rotated(phi, h)


def dominating_degenerate(h, tol=DEFAULT_TOL):
    """Degenerate H0 with H >= H0 everywhere and ||H0|| = ||H||.

    The maximiser u0 of H on the unit circle lies on the boundary of
    C = {H <= ||H||}, and C contains the unit disk, so the supporting line of
    C at u0 is tangent to the circle.  Its normal is recovered from a
    finite-difference slope of the radial function and the result is checked
    on a dense sample; a grid search over angles is the fallback.
    """
    cls = classify(h, tol)
    if cls.kind == "zero":
        raise ZeroAnisotropy("the zero anisotropy has no dominating degenerate minorant")
    if cls.is_degenerate:
        return Directional(cls.c, cls.theta)
    norm = sup_norm(h)
    phi0, _ = circle_argmax(h)
    step = 1e-6
    hp, h0, hm = circle_profile(h, [phi0 + step, phi0, phi0 - step])
    slope = (hp - hm) / (2 * step)
    psi = phi0 + math.atan2(slope, h0)

    phis = np.linspace(0.0, 2 * math.pi, CIRCLE_SAMPLES, endpoint=False)
    prof = circle_profile(h, phis)

    def margin(theta):
        return float(np.min(prof - norm * np.abs(np.cos(phis - theta))))

    if margin(psi) >= -tol * norm:
        return Directional(norm, psi)
    grid = np.linspace(0.0, math.pi, 1024, endpoint=False)
    margins = np.array([margin(t) for t in grid])
    best = int(np.argmax(margins))
    if margins[best] < -tol * norm:
        raise DominationFailed(f"no degenerate minorant found; best margin {margins[best]:.3e}")
    return Directional(norm, float(grid[best]))


# ---------------------------------------------------------------- convex bodies

def unit_ball_poly(h, n=256):
    """Inscribed polygon of D_H = {H <= 1} with vertices at n equispaced angles."""
    if n < 4 or n % 2:
        raise InvalidParams("vertex count must be an even integer >= 4")
    if classify(h).kind != "positive":
        raise DegenerateBody("D_H is unbounded unless H is positive")
    phis = 2 * math.pi * np.arange(n) / n
    dirs = np.stack([np.cos(phis), np.sin(phis)], axis=-1)
    verts = dirs / h(dirs)[:, None]
    return ConvexBodyPoly(tuple(map(tuple, verts.tolist())))


def _dedupe_ring(v, rel=1e-12):
    scale = np.abs(v).max()
    keep = np.linalg.norm(v - np.roll(v, 1, axis=0), axis=1) > rel * scale
    return v[keep] if keep.any() else v[:1]


def polar_body(body):
    """Polar polygon {u : u.v <= 1 for all v in B} via the dual half-planes."""
    v = _dedupe_ring(body.array)
    w = np.roll(v, -1, axis=0)
    det = v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1]
    edge_len = np.linalg.norm(w - v, axis=1)
    if np.any(det <= 1e-14 * np.abs(v).max() * edge_len):
        raise OriginNotInterior("origin must lie strictly inside a counterclockwise body")
    u = np.stack([(w[:, 1] - v[:, 1]) / det, (v[:, 0] - w[:, 0]) / det], axis=-1)
    return ConvexBodyPoly(tuple(map(tuple, _dedupe_ring(u).tolist())))


def inradius(body):
    v = body.array
    w = np.roll(v, -1, axis=0)
    cross = np.abs(v[:, 0] * w[:, 1] - w[:, 0] * v[:, 1])
    length = np.linalg.norm(w - v, axis=1)
    ok = length > 0
    return float(np.min(cross[ok] / length[ok]))


# ------------------------------------------------------------------ JSON form

_FIELDS = {
    "euclidean": set(),
    "zero": set(),
    "directional": {"c", "theta"},
    "quadratic": {"matrix"},
    "weighted_lq": {"q", "wx", "wy"},
    "scaled": {"alpha", "child"},
    "rotated": {"phi", "child"},
    "max": {"children"},
    "lpsum": {"p", "children"},
}


def from_dict(d):
    """Parse the JSON constructor tree; unknown kinds or fields are rejected."""
    if not isinstance(d, dict) or "kind" not in d:
        raise InvalidAnisotropy("anisotropy must be an object with a 'kind' field")
    kind = d["kind"]
    if kind not in _FIELDS:
        raise InvalidAnisotropy(f"unknown anisotropy kind {kind!r}")
    keys = set(d) - {"kind", "schema"}
    if keys != _FIELDS[kind]:
        extra = sorted(keys - _FIELDS[kind])
        missing = sorted(_FIELDS[kind] - keys)
        raise InvalidAnisotropy(f"{kind}: unexpected fields {extra}, missing fields {missing}")
    try:
        if kind == "euclidean":
            return Euclidean()
        if kind == "zero":
            return Zero()
        if kind == "directional":
            return Directional(d["c"], d["theta"])
        if kind == "quadratic":
            return Quadratic(d["matrix"])
        if kind == "weighted_lq":
            return WeightedLq(d["q"], d["wx"], d["wy"])
        if kind == "scaled":
            return Scaled(d["alpha"], from_dict(d["child"]))
        if kind == "rotated":
            return Rotated(d["phi"], from_dict(d["child"]))
        if kind == "max":
            return MaxOf(tuple(from_dict(c) for c in d["children"]))
        return LpSum(d["p"], tuple(from_dict(c) for c in d["children"]))
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidAnisotropy):
            raise
        raise InvalidAnisotropy(f"{kind}: {exc}") from exc
