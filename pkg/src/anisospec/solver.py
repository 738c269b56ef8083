"""P1 finite elements for the anisotropic Rayleigh quotient.

The quotient is  E(u) / N(u)  with  E(u) = sum_T |T| H(grad u_T)^p  and
N(u) = integral |u|^p,  over continuous piecewise-linear u vanishing on the
boundary.  Because every admissible u is a genuine W^{1,p}_0 function, the
discrete minimum is an upper bound for the continuum infimum.

Two paths:

* p = 2 with H^2 a quadratic form: sparse generalised eigenproblem, solved
  by shift-invert Lanczos around zero.
* everything else: preconditioned two-point step-size descent on the
  quotient with a nonmonotone line search, renormalised to N(u) = 1 after
  every step.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
import shapely
from scipy.spatial import Delaunay, cKDTree
from shapely.geometry import Polygon

from . import geometry as geo
from .anisotropy import Directional, classify, quadratic_form, sup_norm
from .errors import InvalidParams, MeshFailure, NoConvergence, SingularStiffness, ZeroAnisotropy, ZeroField
from .spectra import SpectralResult, _check_p, lambda_1d

REFRESH = 25
MIN_ANGLE_DEG = 15.0

# Degree-5 seven-point rule (barycentric points, weights summing to one).
_A1, _B1 = 0.059715871789770, 0.470142064105115
_A2, _B2 = 0.797426985353087, 0.101286507323456
QUAD7_POINTS = np.array([
    [1 / 3, 1 / 3, 1 / 3],
    [_A1, _B1, _B1], [_B1, _A1, _B1], [_B1, _B1, _A1],
    [_A2, _B2, _B2], [_B2, _A2, _B2], [_B2, _B2, _A2],
])
QUAD7_WEIGHTS = np.array([0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3)
QUAD3_POINTS = np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]])
QUAD3_WEIGHTS = np.full(3, 1 / 3)


@dataclass(frozen=True)
class SolverOptions:
    h: float = 0.02
    tol: float = 1e-6
    window: int = 50
    max_iter: int = 6000
    restarts: int = 3
    seed: int = 0
    richardson: bool = True
    align: bool = True


@dataclass(eq=False)
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    boundary_mask: np.ndarray
    h: float
    membrane: object = field(default=None, repr=False)
    angle: float = 0.0

    @property
    def interior(self):
        return np.flatnonzero(~self.boundary_mask)

    def edges(self):
        t = self.triangles
        e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
        return np.unique(e, axis=0)

    def min_angle(self):
        return float(_angles(self.vertices[self.triangles]).min())

    def to_text(self):
        """Plain-text export: counts, then vertices with boundary flag, then triangles."""
        lines = [f"{len(self.vertices)} {len(self.triangles)}"]
        lines += [f"{x:.17g} {y:.17g} {int(b)}" for (x, y), b in zip(self.vertices, self.boundary_mask)]
        lines += [f"{a} {b} {c}" for a, b, c in self.triangles]
        return "\n".join(lines) + "\n"


@dataclass(eq=False)
class DiscreteField:
    values: np.ndarray
    mesh: Mesh = field(repr=False)


# ------------------------------------------------------------ meshing

def _rotate(pts, phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.stack([c * pts[:, 0] - s * pts[:, 1], s * pts[:, 0] + c * pts[:, 1]], axis=-1)


def _resample(ring, h):
    out = []
    for a, b in zip(ring, np.roll(ring, -1, axis=0)):
        k = max(1, math.ceil(np.linalg.norm(b - a) / h - 1e-9))
        out.append(a + (b - a) * (np.arange(k)[:, None] / k))
    return np.concatenate(out)


def _angles(v):
    out = []
    for i in range(3):
        a = v[:, (i + 1) % 3] - v[:, i]
        b = v[:, (i + 2) % 3] - v[:, i]
        cos = np.sum(a * b, axis=1) / (np.linalg.norm(a, axis=1) * np.linalg.norm(b, axis=1))
        out.append(np.degrees(np.arccos(np.clip(cos, -1, 1))))
    return np.stack(out, axis=1)


def _circumcenters(v):
    a, b, c = v[:, 0], v[:, 1], v[:, 2]
    d = 2 * (a[:, 0] * (b[:, 1] - c[:, 1]) + b[:, 0] * (c[:, 1] - a[:, 1]) + c[:, 0] * (a[:, 1] - b[:, 1]))
    sa, sb, sc = (np.sum(x * x, axis=1) for x in (a, b, c))
    ux = (sa * (b[:, 1] - c[:, 1]) + sb * (c[:, 1] - a[:, 1]) + sc * (a[:, 1] - b[:, 1])) / d
    uy = (sa * (c[:, 0] - b[:, 0]) + sb * (a[:, 0] - c[:, 0]) + sc * (b[:, 0] - a[:, 0])) / d
    return np.stack([ux, uy], axis=-1)


def _clipped_delaunay(points, poly, h):
    tri = Delaunay(points).simplices
    v = points[tri]
    signed = 0.5 * ((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
                    - (v[:, 2, 0] - v[:, 0, 0]) * (v[:, 1, 1] - v[:, 0, 1]))
    tri = tri[np.abs(signed) > 1e-10 * h * h]
    cen = points[tri].mean(axis=1)
    return tri[shapely.contains_xy(poly, cen[:, 0], cen[:, 1])]


def _sharp_corners(rings, limit_deg):
    out = []
    for r in rings:
        d_in = r - np.roll(r, 1, axis=0)
        d_out = np.roll(r, -1, axis=0) - r
        turn = np.degrees(np.arctan2(d_in[:, 0] * d_out[:, 1] - d_in[:, 1] * d_out[:, 0],
                                     np.sum(d_in * d_out, axis=1)))
        interior = 180.0 - turn
        out.append(r[interior < limit_deg])
    return np.concatenate(out) if out else np.zeros((0, 2))


def triangulate(m, h, angle=0.0):
    """Conforming triangulation of M from a lattice aligned with ``angle``.

    Boundary edges are split into pieces of length at most h and lattice
    points closer than 0.35 h to the boundary are dropped.  The Delaunay
    triangulation of the union is clipped to the region; boundary segments
    missing from it are split, and triangles with an angle below the quality
    bound receive their circumcentre (or split the boundary segment it
    encroaches) until the bound holds.
    """
    h = float(h)
    rings = [_rotate(r, -angle) for r in m.rings()]
    lo, hi = rings[0].min(axis=0), rings[0].max(axis=0)
    if not 0 < h < np.linalg.norm(hi - lo) / 8:
        raise MeshFailure(f"mesh size {h} must be positive and below 1/8 of the bounding-box diagonal")
    poly = Polygon(rings[0], rings[1:])
    shapely.prepare(poly)

    nx, ny = (math.ceil(d / h) for d in hi - lo)
    gx = lo[0] + (hi[0] - lo[0]) * np.arange(nx + 1) / nx
    gy = lo[1] + (hi[1] - lo[1]) * np.arange(ny + 1) / ny
    lattice = np.stack(np.meshgrid(gx, gy, indexing="ij"), axis=-1).reshape(-1, 2)
    lattice = lattice[shapely.contains_xy(poly, lattice[:, 0], lattice[:, 1])]
    dense = np.concatenate([_resample(r, 0.05 * h) for r in rings])
    dist, _ = cKDTree(dense).query(lattice)
    lattice = lattice[dist > 0.35 * h]

    # Boundary rings as index cycles into the boundary point array.
    cycles, pts, start = [], [], 0
    for b in (_resample(r, h) for r in rings):
        cycles.append(list(range(start, start + len(b))))
        pts.append(b)
        start += len(b)
    pts = np.concatenate(pts)
    sharp = _sharp_corners(rings, 2 * MIN_ANGLE_DEG + 2)
    for _ in range(60):
        n_bnd = len(pts)
        allpts = np.concatenate([pts, lattice])
        tri = _clipped_delaunay(allpts, poly, h)
        have = {tuple(e) for e in np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)}
        segs = [(i, j) for cyc in cycles for i, j in zip(cyc, cyc[1:] + cyc[:1])]
        split = {(i, j) for i, j in segs if (min(i, j), max(i, j)) not in have}
        if not split:
            ang = _angles(allpts[tri])
            bad = ang.min(axis=1) < MIN_ANGLE_DEG + 0.5
            if len(sharp):
                near_sharp = cKDTree(sharp).query(allpts[tri].mean(axis=1))[0] < 2 * h
                bad &= ~near_sharp
            if not bad.any():
                break
            vb = allpts[tri[bad]]
            cc = _circumcenters(vb)
            radius = np.linalg.norm(cc - vb[:, 0], axis=1)
            outside = ~shapely.contains_xy(poly, cc[:, 0], cc[:, 1])
            if outside.any():
                # Circumcentre beyond the boundary: use the longest edge midpoint.
                vo = vb[outside]
                lens = np.stack([np.linalg.norm(vo[:, (i + 1) % 3] - vo[:, i], axis=1) for i in range(3)], axis=1)
                k = lens.argmax(axis=1)
                rows = np.arange(len(vo))
                cc[outside] = 0.5 * (vo[rows, k] + vo[rows, (k + 1) % 3])
                radius[outside] = 0.5 * lens.max(axis=1)
            seg_a = np.array([pts[i] for i, _ in segs])
            seg_b = np.array([pts[j] for _, j in segs])
            mid, half = 0.5 * (seg_a + seg_b), 0.5 * np.linalg.norm(seg_b - seg_a, axis=1)
            tree = cKDTree(mid)
            keep = []
            # Largest triangles first; skip points crowding an earlier insertion.
            near, _ = cKDTree(allpts).query(cc)
            for idx in np.argsort(-radius):
                c = cc[idx]
                if near[idx] <= 1e-3 * radius[idx]:
                    continue
                if any(np.linalg.norm(c - q) < 0.5 * radius[idx] for q in keep):
                    continue
                hits = [k for k in tree.query_ball_point(c, half.max()) if np.linalg.norm(c - mid[k]) < half[k]]
                if hits:
                    split.update(segs[k] for k in hits)
                else:
                    keep.append(c)
            if keep:
                lattice = np.concatenate([lattice, np.array(keep)])
            if not split and not len(keep):
                break
        if split:
            new_cycles, extra = [], []
            for cyc in cycles:
                out = []
                for i, j in zip(cyc, cyc[1:] + cyc[:1]):
                    out.append(i)
                    if (i, j) in split:
                        out.append(n_bnd + len(extra))
                        extra.append(0.5 * (pts[i] + pts[j]))
                new_cycles.append(out)
            pts = np.concatenate([pts, np.array(extra)])
            cycles = new_cycles
            seg_len = min(np.linalg.norm(pts[i] - pts[j]) for cyc in cycles for i, j in zip(cyc, cyc[1:] + cyc[:1]))
            dist, _ = cKDTree(pts).query(lattice)
            lattice = lattice[dist > 0.5 * min(seg_len, 0.5 * h)]
    else:
        raise MeshFailure("mesh refinement did not converge; a feature is thinner than h")

    used = np.unique(tri)
    remap = -np.ones(len(allpts), dtype=int)
    remap[used] = np.arange(len(used))
    verts, tri = allpts[used], remap[tri]
    bmask = used < n_bnd
    v = verts[tri]
    signed = 0.5 * ((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
                    - (v[:, 2, 0] - v[:, 0, 0]) * (v[:, 1, 1] - v[:, 0, 1]))
    tri[signed < 0] = tri[signed < 0][:, [0, 2, 1]]
    mesh = Mesh(_rotate(verts, angle), tri, bmask, h, m, float(angle))
    if not (~bmask).any():
        raise MeshFailure("mesh has no interior vertex; decrease h")
    worst = mesh.min_angle()
    if worst < MIN_ANGLE_DEG:
        where = " at a sharp corner of the membrane" if len(sharp) else ""
        raise MeshFailure(f"minimum angle {worst:.2f} deg below {MIN_ANGLE_DEG} deg{where}")
    return mesh


# ------------------------------------------------------------ operators

@dataclass(eq=False)
class _Ops:
    area: np.ndarray
    dx: sp.csr_matrix
    dy: sp.csr_matrix
    q7: sp.csr_matrix
    q3: sp.csr_matrix
    interior: np.ndarray


def _operators(mesh):
    cached = getattr(mesh, "_ops", None)
    if cached is not None:
        return cached
    v = mesh.vertices[mesh.triangles]
    x, y = v[:, :, 0], v[:, :, 1]
    area = 0.5 * ((x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0]))
    # Gradients of the barycentric coordinates, shape (T, 3, 2).
    j, k = [1, 2, 0], [2, 0, 1]
    grads = np.stack([y[:, j] - y[:, k], x[:, k] - x[:, j]], axis=-1) / (2 * area)[:, None, None]
    interior = mesh.interior
    col = -np.ones(len(mesh.vertices), dtype=int)
    col[interior] = np.arange(len(interior))
    t, n = len(mesh.triangles), len(interior)
    cols = col[mesh.triangles]
    keep = cols >= 0
    rows = np.repeat(np.arange(t), 3).reshape(t, 3)

    def assemble(vals, nrows, rws):
        return sp.csr_matrix((vals[keep], (rws[keep], cols[keep])), shape=(nrows, n))

    dx = assemble(grads[:, :, 0], t, rows)
    dy = assemble(grads[:, :, 1], t, rows)

    def quad(points):
        k = len(points)
        vals = np.broadcast_to(points[None], (t, k, 3))
        r = (np.arange(t)[:, None] * k + np.arange(k)[None, :])[:, :, None].repeat(3, axis=2)
        c = np.broadcast_to(cols[:, None, :], (t, k, 3))
        msk = c >= 0
        return sp.csr_matrix((vals[msk], (r[msk], c[msk])), shape=(t * k, n))

    ops = _Ops(area, dx, dy, quad(QUAD7_POINTS), quad(QUAD3_POINTS), interior)
    mesh._ops = ops
    return ops


def _stiffness(ops, a, weight=None):
    w = ops.area if weight is None else ops.area * weight
    return (ops.dx.T @ sp.diags(w * a[0, 0]) @ ops.dx + ops.dx.T @ sp.diags(w * a[0, 1]) @ ops.dy
            + ops.dy.T @ sp.diags(w * a[1, 0]) @ ops.dx + ops.dy.T @ sp.diags(w * a[1, 1]) @ ops.dy).tocsc()


def _mass(ops):
    w = np.repeat(ops.area, 7) * np.tile(QUAD7_WEIGHTS, len(ops.area))
    return (ops.q7.T @ sp.diags(w) @ ops.q7).tocsc()


def _norm_p(ops, u, p, rule=7):
    q, weights = (ops.q7, QUAD7_WEIGHTS) if rule == 7 else (ops.q3, QUAD3_WEIGHTS)
    vals = (q @ u).reshape(len(ops.area), -1)
    return float(np.sum(ops.area[:, None] * weights[None, :] * np.abs(vals) ** p))


def _energy(ops, u, h, p):
    g = np.stack([ops.dx @ u, ops.dy @ u], axis=-1)
    return float(np.sum(ops.area * h(g) ** p))


def _quotient_and_grad(ops, u, h, p):
    g = np.stack([ops.dx @ u, ops.dy @ u], axis=-1)
    hv = h(g)
    energy = float(np.sum(ops.area * hv ** p))
    dh = h.gradient(g)
    coef = ops.area * p * hv ** (p - 1)
    de = ops.dx.T @ (coef * dh[:, 0]) + ops.dy.T @ (coef * dh[:, 1])
    vals = (ops.q7 @ u).reshape(len(ops.area), -1)
    w = ops.area[:, None] * QUAD7_WEIGHTS[None, :]
    norm = float(np.sum(w * np.abs(vals) ** p))
    dn = ops.q7.T @ (w * p * np.abs(vals) ** (p - 1) * np.sign(vals)).ravel()
    if norm <= 0:
        raise ZeroField("the field vanishes identically")
    q = energy / norm
    return q, (de - q * dn) / norm


def _expand(mesh, u_int):
    full = np.zeros(len(mesh.vertices))
    full[mesh.interior] = u_int
    return full


# ------------------------------------------------------------ public API

def rayleigh_eval(mesh, u, h, p):
    """(energy, integral of |u|^p, quotient) for a field on the mesh."""
    values = u.values if isinstance(u, DiscreteField) else np.asarray(u, dtype=float)
    ops = _operators(mesh)
    u_int = values[ops.interior]
    norm = _norm_p(ops, u_int, p)
    if not norm > 0:
        raise ZeroField("the field vanishes identically")
    energy = _energy(ops, u_int, h, p)
    return energy, norm, energy / norm


def quotient_gradient(mesh, u, h, p):
    """Quotient and its gradient with respect to the interior nodal values."""
    values = u.values if isinstance(u, DiscreteField) else np.asarray(u, dtype=float)
    ops = _operators(mesh)
    return _quotient_and_grad(ops, values[ops.interior], h, p)


def _surrogate(h):
    a = quadratic_form(h)
    if a is None:
        a = sup_norm(h) ** 2 * np.eye(2)
    return a


def _eig_p2(ops, a):
    k = _stiffness(ops, a)
    mass = _mass(ops)
    try:
        lu = spla.splu(k)
    except RuntimeError as exc:
        raise SingularStiffness(f"stiffness factorisation failed: {exc}") from exc
    op = spla.LinearOperator(k.shape, matvec=lu.solve, dtype=float)
    n = k.shape[0]
    if n <= 3:
        import scipy.linalg as sla

        w, vec = sla.eigh(k.toarray(), mass.toarray())
        lam, vec = w[0], vec[:, 0]
    else:
        rng = np.random.default_rng(0)
        w, vec = spla.eigsh(k, k=1, M=mass, sigma=0.0, which="LM", OPinv=op,
                            v0=rng.random(n) + 0.5, tol=1e-12, maxiter=20000)
        lam, vec = float(w[0]), vec[:, 0]
    if not lam > 0 or not np.isfinite(lam):
        raise SingularStiffness(f"smallest Ritz value {lam:.3e} is not positive")
    vec = vec if vec.sum() >= 0 else -vec
    return float(lam), vec, k, mass


def _descent(ops, h, p, u0, make_precond, opts):
    """Nonmonotone preconditioned two-point step-size descent on the quotient.

    The preconditioner is rebuilt from the current iterate every
    ``REFRESH`` steps.
    """
    u = u0 / _norm_p(ops, u0, p) ** (1 / p)
    q, g = _quotient_and_grad(ops, u, h, p)
    precond = make_precond(u)
    z = precond(g)
    alpha = 1.0 / max(q, 1e-300)
    history = [q]
    best_q, best_u = q, u
    trail = [q]
    for it in range(opts.max_iter):
        ref = max(history[-10:])
        slope = float(g @ z)
        step = alpha
        for _ in range(40):
            trial = u - step * z
            n = _norm_p(ops, trial, p)
            if n > 0:
                trial = trial / n ** (1 / p)
                qt, gt = _quotient_and_grad(ops, trial, h, p)
                if qt <= ref - 1e-4 * step * slope:
                    break
            step *= 0.5
        else:
            # the preconditioner is SPD, so a failed search means roundoff-level stationarity
            return best_q, best_u, it, True
        s, y = trial - u, gt - g
        if (it + 1) % REFRESH == 0:
            precond = make_precond(trial)
        zt = precond(gt)
        sy = float(s @ y)
        u, q, g, z = trial, qt, gt, zt
        history.append(q)
        if q < best_q:
            best_q, best_u = q, u
        trail.append(best_q)
        if sy > 0:
            alpha = sy / max(float(y @ precond(y)), 1e-300)
        else:
            alpha = step * 2
        if len(trail) > opts.window and trail[-opts.window - 1] - best_q <= opts.tol * best_q:
            return best_q, best_u, it + 1, True
    return best_q, best_u, opts.max_iter, False


def _linearised_precond(ops, h, p, a, k2, mass):
    """Factory of inverses of the p-Laplacian linearised at an iterate."""
    fixed = spla.splu((k2 + mass).tocsc()).solve
    if p == 2.0:
        return lambda u: fixed

    def build(u):
        g = np.stack([ops.dx @ u, ops.dy @ u], axis=-1)
        hv = h(g)
        floor = 1e-2 * float(hv.max())
        if floor <= 0:
            return fixed
        weight = (hv ** 2 + floor ** 2) ** ((p - 2) / 2)
        k = _stiffness(ops, a, weight)
        shift = float(np.sum(ops.area * weight)) / float(np.sum(ops.area))
        try:
            return spla.splu((k + shift * mass).tocsc()).solve
        except RuntimeError:
            return fixed

    return build


def rayleigh_minimize(mesh, h, p, opts=None, _richardson=None):
    """Discrete least level on the mesh and its normalised minimiser."""
    opts = opts or SolverOptions()
    p = _check_p(p)
    if sup_norm(h) == 0:
        raise ZeroAnisotropy("the zero anisotropy has zero least level")
    ops = _operators(mesh)
    a = _surrogate(h)
    quadratic = quadratic_form(h) is not None
    if p == 2.0 and quadratic:
        lam, vec, _, _ = _eig_p2(ops, a)
        spread, iters, converged = 0.0, 0, True
        u = vec / math.sqrt(_norm_p(ops, vec, 2.0))
    else:
        try:
            _, warm, k2, mass = _eig_p2(ops, a)
        except SingularStiffness:
            warm = None
            k2 = _stiffness(ops, a)
            mass = _mass(ops)
        make_precond = _linearised_precond(ops, h, p, a, k2, mass)
        if warm is None:
            xy = mesh.vertices[ops.interior]
            lo, hi = mesh.vertices.min(axis=0), mesh.vertices.max(axis=0)
            warm = np.prod((xy - lo) * (hi - xy), axis=1)
        warm = np.abs(warm)
        results = []
        rng = np.random.default_rng(opts.seed)
        for r in range(max(1, opts.restarts)):
            start = warm if r == 0 else warm * (1 + 0.5 * rng.random(len(warm)))
            results.append(_descent(ops, h, p, start, make_precond, opts))
        best = min(results, key=lambda t: t[0])
        lam, u, iters, converged = best
        spread = max(t[0] for t in results) - lam
    err = spread
    if _richardson is not None:
        err = max(err, abs(lam - _richardson) / 3)
    quad_err = abs(_norm_p(ops, u, p, 7) - _norm_p(ops, u, p, 3)) * lam
    err = max(err, quad_err if p != 2.0 else 0.0)
    result = SpectralResult(lam, "fem", p, err,
                            f"P1 mesh h={mesh.h:g}, {len(ops.interior)} unknowns, {iters} iterations")
    field_ = DiscreteField(_expand(mesh, u), mesh)
    if not converged:
        raise NoConvergence(f"descent did not settle within {opts.max_iter} iterations",
                            best=(result, field_))
    return result, field_


def mesh_angle(h):
    """Lattice orientation used for H: its degenerate direction, else 0."""
    cls = classify(h)
    return cls.theta if cls.is_degenerate else 0.0


def solve(m, h, p, opts=None):
    """Mesh M, minimise, and estimate the error against a mesh twice as coarse."""
    opts = opts or SolverOptions()
    angle = mesh_angle(h) if opts.align else 0.0
    coarse = None
    if opts.richardson:
        try:
            coarse_mesh = triangulate(m, 2 * opts.h, angle)
            coarse = rayleigh_minimize(coarse_mesh, h, p, replace(opts, restarts=1))[0].value
        except (MeshFailure, NoConvergence):
            coarse = None
    mesh = triangulate(m, opts.h, angle)
    return rayleigh_minimize(mesh, h, p, opts, _richardson=coarse)


# ------------------------------------------------------------ diagnostics

def _locate(mesh, pts):
    """P1 field evaluation weights: triangle index and barycentric coordinates per point."""
    v = mesh.vertices[mesh.triangles]
    tree = getattr(mesh, "_tree", None)
    if tree is None:
        tree = cKDTree(v.mean(axis=1))
        mesh._tree = tree
    _, cand = tree.query(pts, k=min(12, len(v)))
    tri_idx = -np.ones(len(pts), dtype=int)
    bary = np.zeros((len(pts), 3))
    for col in range(cand.shape[1]):
        todo = tri_idx < 0
        if not todo.any():
            break
        t = cand[todo, col]
        a, b, c = v[t, 0], v[t, 1], v[t, 2]
        det = (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (c[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1])
        x = pts[todo]
        l1 = ((x[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (c[:, 0] - a[:, 0]) * (x[:, 1] - a[:, 1])) / det
        l2 = ((b[:, 0] - a[:, 0]) * (x[:, 1] - a[:, 1]) - (x[:, 0] - a[:, 0]) * (b[:, 1] - a[:, 1])) / det
        l0 = 1 - l1 - l2
        inside = (l0 >= -1e-12) & (l1 >= -1e-12) & (l2 >= -1e-12)
        idx = np.flatnonzero(todo)[inside]
        tri_idx[idx] = t[inside]
        bary[idx] = np.stack([l0, l1, l2], axis=-1)[inside]
    return tri_idx, bary


def evaluate_field(u, pts):
    """Values of a P1 field at arbitrary points; zero outside the mesh."""
    mesh = u.mesh
    tri_idx, bary = _locate(mesh, np.asarray(pts, dtype=float))
    out = np.zeros(len(pts))
    ok = tri_idx >= 0
    out[ok] = np.sum(u.values[mesh.triangles[tri_idx[ok]]] * bary[ok], axis=1)
    return out


@dataclass(frozen=True)
class SliceReport:
    slices: int
    nontrivial: int
    near_zero: int
    within: int
    fraction: float
    reference: float
    quotients: tuple = field(repr=False)


def slice_check(mesh, u, theta, p, reference=None, tol=0.02, n_slices=64, samples=None):
    """1D quotients of u along chords of direction theta.

    Every nontrivial slice of a degenerate minimiser should itself be a 1D
    eigenfunction; the report gives the fraction of nontrivial slices whose
    quotient lies within ``tol`` of ``reference`` (default: the 1D
    frequency on the chord width of the membrane).  Each chord is sampled
    at spacing about h by default: finer sampling resolves the sawtooth a
    P1 field has across triangle diagonals, which is not part of the limit.
    """
    p = _check_p(p)
    m = mesh.membrane
    if reference is None:
        reference = lambda_1d(p, geo.chord_width(m, theta)).value
    rot = math.pi / 2 - theta
    rings = [_rotate(r, rot) for r in m.rings()]
    rm = geo.Membrane(tuple(map(tuple, rings[0].tolist())), tuple(tuple(map(tuple, r.tolist())) for r in rings[1:]))
    lo, hi = rings[0][:, 0].min(), rings[0][:, 0].max()
    xs = lo + (hi - lo) * (np.arange(n_slices) + 0.5) / n_slices
    umax = float(np.max(np.abs(u.values)))
    quotients, near_zero, within = [], 0, 0
    for x in xs:
        for y0, y1 in geo.vertical_components(rm, x).intervals:
            count = samples or max(16, math.ceil((y1 - y0) / mesh.h) + 1)
            t = np.linspace(y0, y1, count)
            pts = _rotate(np.stack([np.full_like(t, x), t], axis=-1), -rot)
            vals = evaluate_field(u, pts)
            if np.max(np.abs(vals)) < 1e-6 * umax:
                near_zero += 1
                continue
            dv = np.diff(vals) / np.diff(t)
            mid = 0.5 * (vals[1:] + vals[:-1])
            num = np.sum(np.abs(dv) ** p * np.diff(t))
            den = np.sum(np.abs(mid) ** p * np.diff(t))
            qv = float(num / den)
            quotients.append(qv)
            within += abs(qv - reference) <= tol * reference
    nontrivial = len(quotients)
    frac = within / nontrivial if nontrivial else 0.0
    return SliceReport(n_slices, nontrivial, near_zero, within, frac, reference, tuple(quotients))


@dataclass(frozen=True)
class ConvergenceTable:
    hs: tuple
    values: tuple
    limit: float
    order: float


def convergence_study(m, h, p, h_list, opts=None):
    """Values on a sequence of meshes with extrapolated limit and empirical order."""
    hs = tuple(float(x) for x in h_list)
    if len(hs) < 3 or any(b >= a for a, b in zip(hs, hs[1:])):
        raise InvalidParams("h_list must be strictly decreasing with at least three entries")
    opts = replace(opts or SolverOptions(), richardson=False)
    vals = tuple(solve(m, h, p, replace(opts, h=x))[0].value for x in hs)
    d1, d2 = vals[-3] - vals[-2], vals[-2] - vals[-1]
    ratio = hs[-2] / hs[-1]
    if d1 * d2 > 0 and abs(d2) > 0:
        order = math.log(abs(d1 / d2)) / math.log(hs[-3] / hs[-2])
        limit = vals[-1] - d2 / (ratio ** order - 1)
    else:
        order, limit = float("nan"), vals[-1]
    return ConvergenceTable(hs, vals, limit, order)
