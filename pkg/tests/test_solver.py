import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anisospec import geometry as geo
from anisospec.anisotropy import Directional, Euclidean, Quadratic, Scaled, WeightedLq, Zero
from anisospec.errors import InvalidExponent, InvalidParams, MeshFailure, NoConvergence, ZeroAnisotropy, ZeroField
from anisospec.solver import (
    DiscreteField,
    SolverOptions,
    convergence_study,
    evaluate_field,
    mesh_angle,
    quotient_gradient,
    rayleigh_eval,
    rayleigh_minimize,
    slice_check,
    solve,
    triangulate,
)

SQUARE = geo.rect(1.0, 1.0)


@pytest.fixture(scope="module")
def square_mesh():
    return triangulate(SQUARE, 0.02)


def _tri_areas(mesh):
    v = mesh.vertices[mesh.triangles]
    return 0.5 * ((v[:, 1, 0] - v[:, 0, 0]) * (v[:, 2, 1] - v[:, 0, 1])
                  - (v[:, 2, 0] - v[:, 0, 0]) * (v[:, 1, 1] - v[:, 0, 1]))


# ------------------------------------------------------------ meshing

@pytest.mark.parametrize("m", [
    SQUARE,
    geo.rotated_rect(1.0, 0.5, 0.4),
    geo.disk(0.5, 256),
    geo.annulus(0.5, 0.3, 256),
    geo.cropped_disk(0.5, 0.3),
    geo.asterisk(5),
    geo.s_counterexample(),
])
def test_mesh_quality_and_coverage(m):
    mesh = triangulate(m, 0.05)
    assert mesh.min_angle() >= 15.0
    areas = _tri_areas(mesh)
    assert np.all(np.abs(areas) > 0)
    assert np.abs(areas).sum() == pytest.approx(geo.area(m), rel=1e-9)
    assert mesh.boundary_mask.any() and (~mesh.boundary_mask).any()


def test_mesh_aligned_lattice_keeps_quality():
    mesh = triangulate(SQUARE, 0.05, angle=0.7)
    assert mesh.min_angle() >= 15.0
    assert np.abs(_tri_areas(mesh)).sum() == pytest.approx(1.0, rel=1e-9)


def test_sharp_tips_are_reported():
    with pytest.raises(MeshFailure, match="corner"):
        triangulate(geo.star(10), 0.02)


def test_mesh_rejects_bad_spacing():
    for h in (0.0, 0.2):
        with pytest.raises(MeshFailure, match="mesh size"):
            triangulate(SQUARE, h)


def test_mesh_text_export():
    mesh = triangulate(SQUARE, 0.15)
    lines = mesh.to_text().splitlines()
    nv, nt = map(int, lines[0].split())
    assert nv == len(mesh.vertices) and nt == len(mesh.triangles)
    assert len(lines) == 1 + nv + nt
    x, y, b = lines[1].split()
    assert float(x) == mesh.vertices[0, 0] and int(b) in (0, 1)


# ------------------------------------------------------------ functional

def _sine_product(mesh):
    x, y = mesh.vertices.T
    return np.sin(math.pi * x) * np.sin(math.pi * y)


def test_rayleigh_of_sine_product(square_mesh):
    u = _sine_product(square_mesh)
    _, _, q = rayleigh_eval(square_mesh, u, Euclidean(), 2.0)
    assert q == pytest.approx(2 * math.pi ** 2, rel=5e-3)
    _, _, q = rayleigh_eval(square_mesh, u, Directional(1.0, 0.0), 2.0)
    assert q == pytest.approx(math.pi ** 2, rel=5e-3)


def test_rayleigh_accepts_fields(square_mesh):
    u = _sine_product(square_mesh)
    a = rayleigh_eval(square_mesh, DiscreteField(u, square_mesh), Euclidean(), 3.0)
    b = rayleigh_eval(square_mesh, u, Euclidean(), 3.0)
    assert a == b


def test_zero_field_rejected(square_mesh):
    with pytest.raises(ZeroField):
        rayleigh_eval(square_mesh, np.zeros(len(square_mesh.vertices)), Euclidean(), 2.0)


@pytest.mark.parametrize("h", [Euclidean(), WeightedLq(3.0, 1.0, 2.0), Directional(1.0, 0.3)])
@pytest.mark.parametrize("p", [1.5, 3.0])
def test_gradient_matches_finite_differences(h, p):
    mesh = triangulate(SQUARE, 0.15)
    rng = np.random.default_rng(1)
    u = np.where(mesh.boundary_mask, 0.0, 0.5 + rng.random(len(mesh.vertices)))
    q, g = quotient_gradient(mesh, u, h, p)
    interior = mesh.interior
    for j in rng.choice(len(interior), 5, replace=False):
        e = np.zeros_like(u)
        e[interior[j]] = 1e-6
        fd = (rayleigh_eval(mesh, u + e, h, p)[2] - rayleigh_eval(mesh, u - e, h, p)[2]) / 2e-6
        assert g[j] == pytest.approx(fd, rel=1e-4, abs=1e-6)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 5.0), st.sampled_from([1.5, 2.0, 3.0]))
def test_functional_homogeneity_in_anisotropy(alpha, p):
    mesh = triangulate(SQUARE, 0.1)
    u = _sine_product(mesh)
    h = WeightedLq(3.0, 1.0, 1.0)
    base = rayleigh_eval(mesh, u, h, p)[2]
    assert rayleigh_eval(mesh, u, Scaled(alpha, h), p)[2] == pytest.approx(alpha ** p * base, rel=1e-10)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 10.0), st.sampled_from([1.5, 2.0, 3.0]))
def test_quotient_invariant_under_field_scaling(t, p):
    mesh = triangulate(SQUARE, 0.1)
    u = _sine_product(mesh)
    assert rayleigh_eval(mesh, t * u, Euclidean(), p)[2] == pytest.approx(rayleigh_eval(mesh, u, Euclidean(), p)[2], rel=1e-10)


# ------------------------------------------------------------ minimisation

def test_square_p2_is_conforming_upper_bound(square_mesh):
    res, u = rayleigh_minimize(square_mesh, Euclidean(), 2.0)
    assert res.value >= 2 * math.pi ** 2
    assert res.value == pytest.approx(2 * math.pi ** 2, rel=0.01)
    assert res.method == "fem"
    assert rayleigh_eval(square_mesh, u, Euclidean(), 2.0)[2] == pytest.approx(res.value, rel=1e-9)


def test_rectangle_value():
    res, _ = solve(geo.rect(1.0, 2.0), Euclidean(), 2.0, SolverOptions(h=0.04))
    assert res.value == pytest.approx(5 * math.pi ** 2 / 4, rel=0.01)
    assert res.error_estimate > 0


def test_degenerate_square_matches_interval():
    res, _ = solve(SQUARE, Directional(1.0, 0.0), 3.0, SolverOptions(h=0.05))
    expected = 2 * (2 * math.pi / (3 * math.sin(math.pi / 3))) ** 3
    assert res.value == pytest.approx(expected, rel=0.03)


def test_scaled_anisotropy_scales_minimum():
    mesh = triangulate(SQUARE, 0.05)
    opts = SolverOptions(restarts=1)
    a = rayleigh_minimize(mesh, WeightedLq(3.0, 1.0, 1.0), 3.0, opts)[0].value
    b = rayleigh_minimize(mesh, Scaled(2.0, WeightedLq(3.0, 1.0, 1.0)), 3.0, opts)[0].value
    assert b == pytest.approx(8 * a, rel=1e-4)


def test_quadratic_p2_eigen_path():
    mesh = triangulate(SQUARE, 0.05)
    res, _ = rayleigh_minimize(mesh, Quadratic(((4.0, 0.0), (0.0, 1.0))), 2.0)
    assert res.value == pytest.approx(5 * math.pi ** 2, rel=0.02)


def test_zero_anisotropy_rejected(square_mesh):
    with pytest.raises(ZeroAnisotropy):
        rayleigh_minimize(square_mesh, Zero(), 2.0)


def test_exponent_rejected(square_mesh):
    with pytest.raises(InvalidExponent):
        rayleigh_minimize(square_mesh, Euclidean(), 1.0)


def test_iteration_cap_reports_best_iterate():
    mesh = triangulate(SQUARE, 0.05)
    with pytest.raises(NoConvergence) as info:
        rayleigh_minimize(mesh, WeightedLq(3.0, 1.0, 1.0), 3.0, SolverOptions(max_iter=3, restarts=1, tol=1e-14))
    result, field_ = info.value.best
    assert result.value > 0 and field_.values.shape == (len(mesh.vertices),)


def test_mesh_angle_follows_degenerate_direction():
    assert mesh_angle(Directional(1.0, 0.4)) == pytest.approx(0.4)
    assert mesh_angle(Euclidean()) == 0.0


# ------------------------------------------------------------ diagnostics

def test_evaluate_field_interpolates_linear_functions():
    mesh = triangulate(SQUARE, 0.1)
    x, y = mesh.vertices.T
    u = DiscreteField(2 * x - y + 0.5, mesh)
    pts = np.random.default_rng(0).random((50, 2))
    np.testing.assert_allclose(evaluate_field(u, pts), 2 * pts[:, 0] - pts[:, 1] + 0.5, atol=1e-12)
    assert evaluate_field(u, np.array([[5.0, 5.0]]))[0] == 0.0


def test_slice_check_on_degenerate_rectangle():
    m = geo.rect(1.0, 0.5)
    opts = SolverOptions(h=0.025, richardson=False)
    _, u = solve(m, Directional(1.0, 0.0), 2.0, opts)
    rep = slice_check(u.mesh, u, 0.0, 2.0)
    assert rep.reference == pytest.approx(math.pi ** 2)
    assert rep.nontrivial > 0
    assert rep.fraction >= 0.9


def test_convergence_study_requires_decreasing_spacings():
    with pytest.raises(InvalidParams):
        convergence_study(SQUARE, Euclidean(), 2.0, [0.1, 0.05])
    with pytest.raises(InvalidParams):
        convergence_study(SQUARE, Euclidean(), 2.0, [0.05, 0.1, 0.2])


def test_convergence_study_order_on_square():
    table = convergence_study(SQUARE, Euclidean(), 2.0, [0.1, 0.05, 0.025])
    assert table.order >= 1.7
    assert table.limit == pytest.approx(2 * math.pi ** 2, rel=2e-3)
    assert all(b < a for a, b in zip(table.values, table.values[1:]))
