"""Closed-form frequencies and the shape inequalities built on them."""

import math
from dataclasses import dataclass, field

from . import geometry as geo
from .anisotropy import Directional, Zero, classify, dominating_degenerate, sup_norm
from .errors import InvalidExponent, InvalidLength, InvalidParams, NotConvex, NotDegenerate, ZeroAnisotropy


@dataclass(frozen=True)
class SpectralResult:
    value: float
    method: str
    p: float
    error_estimate: float = 0.0
    provenance: str = ""
    field_values: object = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class ExtremizerSet:
    """Unit-norm degenerate anisotropies realising the least level.

    ``continuum`` marks rotationally symmetric shapes where every direction
    is extremal; ``anisotropies`` is then left empty.
    """

    anisotropies: tuple
    complete: bool
    continuum: bool = False


def _check_p(p):
    if not (isinstance(p, (int, float)) and math.isfinite(p) and p > 1):
        raise InvalidExponent(f"exponent must be a finite real > 1, got {p!r}")
    return float(p)


def pi_p(p):
    p = _check_p(p)
    return 2 * math.pi / (p * math.sin(math.pi / p))


def lambda_1d(p, length):
    """First Dirichlet eigenvalue of the one-dimensional p-Laplacian on (0, length)."""
    p = _check_p(p)
    if not (isinstance(length, (int, float)) and math.isfinite(length) and length > 0):
        raise InvalidLength(f"interval length must be positive and finite, got {length!r}")
    value = (p - 1) * (pi_p(p) / length) ** p
    return SpectralResult(value, "closed_form", p, 0.0, f"interval of length {length:.17g}")


def _width_error(m, length):
    return geo.GEO_EPS * geo.bbox_scale(m) / length


def lambda_degenerate(m, h, p):
    """c^p times the 1D frequency on the chord width along the degenerate direction."""
    p = _check_p(p)
    cls = classify(h)
    if cls.kind == "zero":
        return SpectralResult(0.0, "closed_form", p, 0.0, "zero anisotropy")
    if not cls.is_degenerate:
        raise NotDegenerate("closed form requires a degenerate anisotropy")
    width = geo.chord_width(m, cls.theta)
    base = lambda_1d(p, width)
    value = cls.c ** p * base.value
    err = p * _width_error(m, width) * value
    return SpectralResult(value, "closed_form", p, err,
                          f"degenerate c={cls.c:.17g} theta={cls.theta:.17g} width={width:.17g}")


def lambda_min(m, p, n_theta=1024):
    """Least level over unit-norm anisotropies and its extremizers."""
    p = _check_p(p)
    prof = geo.width_profile(m, n_theta)
    base = lambda_1d(p, prof.sup_width)
    err = p * _width_error(m, prof.sup_width) * base.value
    result = SpectralResult(base.value, "closed_form", p, err,
                            f"sup width {prof.sup_width:.17g} ({prof.attained_flag})")
    if prof.attained_flag != "attained":
        return result, ExtremizerSet((), False)
    if prof.continuum:
        return result, ExtremizerSet((), True, True)
    return result, ExtremizerSet(tuple(Directional(1.0, t) for t, _ in prof.maxima), True)


def lambda_max(m, p, solver_opts=None):
    """Euclidean frequency by the finite-element solver."""
    from .anisotropy import Euclidean
    from .solver import solve

    return solve(m, Euclidean(), _check_p(p), solver_opts)[0]


def u_estimate_bounds(m, h, p, solver_opts=None):
    """(lambda_min * ||H||^p, lambda_max * ||H||^p)."""
    p = _check_p(p)
    if isinstance(h, Zero) or sup_norm(h) == 0:
        raise ZeroAnisotropy("bounds are trivial for the zero anisotropy")
    scale = sup_norm(h) ** p
    return lambda_min(m, p)[0].value * scale, lambda_max(m, p, solver_opts).value * scale


def blowup_sequence(h, p, k_max):
    """Unit-area rectangles thinning along the dominating direction of H.

    Returns ``[(k, area, lower bound)]`` for k = 1..k_max; the bound is
    c^p times the 1D frequency on the width 1/k.
    """
    p = _check_p(p)
    if not (isinstance(k_max, int) and k_max >= 2):
        raise InvalidParams("k_max must be an integer >= 2")
    h0 = dominating_degenerate(h)
    out = []
    for k in range(1, k_max + 1):
        shape = geo.rotated_rect(float(k), 1.0 / k, h0.theta - math.pi / 2)
        width = geo.chord_width(shape, h0.theta)
        value = h0.c ** p * lambda_1d(p, width).value
        bound = SpectralResult(value, "closed_form", p, p * _width_error(shape, width) * value,
                               f"blow-up k={k}")
        out.append((k, geo.area(shape), bound))
    return out


def id_min_bound(m, p, tol=1e-6):
    """lambda_min bounded below by the 1D frequency on the diameter: (lhs, rhs, holds, equality)."""
    p = _check_p(p)
    lhs = lambda_min(m, p)[0].value
    rhs = lambda_1d(p, geo.diameter(m)).value
    return lhs, rhs, lhs >= rhs * (1 - tol), abs(lhs - rhs) <= tol * rhs


def ip_min_bound(m, p, tol=1e-2):
    """lambda_min bounded above by the 1D frequency on 2/sqrt(pi) scaled by area^(-p/2)."""
    p = _check_p(p)
    if not geo.is_convex(m):
        raise NotConvex("the area bound applies to convex membranes only")
    lhs = lambda_min(m, p)[0].value
    rhs = lambda_1d(p, 2 / math.sqrt(math.pi)).value * geo.area(m) ** (-p / 2)
    return lhs, rhs, lhs <= rhs * (1 + tol), abs(lhs - rhs) <= tol * rhs


def isodiametric_check(m):
    a = geo.area(m)
    bound = math.pi * (geo.diameter(m) / 2) ** 2
    return a, bound, a <= bound * (1 + 1e-12)
