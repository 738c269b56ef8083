import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anisospec import geometry as geo
from anisospec import spectra as sp
from anisospec.anisotropy import Directional, Euclidean, Quadratic, Rotated, WeightedLq, Zero, dominating_degenerate
from anisospec.errors import InvalidExponent, InvalidLength, InvalidParams, NotConvex, NotDegenerate, ZeroAnisotropy

# Frozen from the quadrature and finite-difference oracles in tests/oracles.py.
PI_P = {1.5: 4.836798304624581, 2.0: math.pi, 3.0: 2.4183991523122903, 4.0: 2.221441469079183}
LAMBDA_1D_UNIT = {1.5: 5.318718, 2.0: math.pi ** 2, 3.0: 28.28876, 4.0: 73.0568}


@pytest.mark.parametrize("p", sorted(PI_P))
def test_pi_p_frozen(p):
    assert sp.pi_p(p) == pytest.approx(PI_P[p], rel=1e-12)


@pytest.mark.parametrize("p", sorted(LAMBDA_1D_UNIT))
def test_lambda_1d_frozen(p):
    res = sp.lambda_1d(p, 1.0)
    assert res.value == pytest.approx(LAMBDA_1D_UNIT[p], rel=2e-6)
    assert res.method == "closed_form"


@settings(max_examples=50)
@given(st.floats(1.05, 8), st.floats(1e-2, 1e2), st.floats(1e-2, 1e2))
def test_lambda_1d_scaling(p, length, t):
    assert sp.lambda_1d(p, t * length).value == pytest.approx(t ** -p * sp.lambda_1d(p, length).value, rel=1e-9)


def test_pi_2_and_laplace():
    assert sp.lambda_1d(2.0, 2.0).value == pytest.approx(math.pi ** 2 / 4, rel=1e-14)


@pytest.mark.parametrize("p", [1.0, 0.5, float("inf"), float("nan"), "2"])
def test_exponent_checks(p):
    with pytest.raises(InvalidExponent):
        sp.lambda_1d(p, 1.0)


@pytest.mark.parametrize("length", [0.0, -1.0, float("inf")])
def test_length_checks(length):
    with pytest.raises(InvalidLength):
        sp.lambda_1d(2.0, length)


def test_lambda_degenerate_square():
    res = sp.lambda_degenerate(geo.rect(1.0, 1.0), Directional(2.0, 0.0), 2.0)
    assert res.value == pytest.approx(4 * math.pi ** 2, rel=1e-12)
    diag = sp.lambda_degenerate(geo.rect(1.0, 1.0), Directional(1.0, math.pi / 4), 3.0)
    assert diag.value == pytest.approx(sp.lambda_1d(3.0, math.sqrt(2)).value, rel=1e-12)


def test_lambda_degenerate_annulus():
    res = sp.lambda_degenerate(geo.annulus(0.5, 0.3, 4096), Directional(1.0, 0.0), 2.0)
    assert res.value == pytest.approx(math.pi ** 2 / 0.64, rel=1e-5)


def test_lambda_degenerate_accepts_rank_one_forms():
    res = sp.lambda_degenerate(geo.rect(1.0, 2.0), Rotated(0.0, Quadratic(((0.0, 0.0), (0.0, 1.0)))), 2.0)
    assert res.value == pytest.approx(math.pi ** 2 / 4, rel=1e-9)


def test_lambda_degenerate_zero_and_positive():
    assert sp.lambda_degenerate(geo.rect(1.0, 1.0), Zero(), 2.0).value == 0.0
    with pytest.raises(NotDegenerate):
        sp.lambda_degenerate(geo.rect(1.0, 1.0), Euclidean(), 2.0)


def test_lambda_min_square():
    res, ext = sp.lambda_min(geo.rect(1.0, 1.0), 2.0)
    assert res.value == pytest.approx(math.pi ** 2 / 2, rel=1e-12)
    assert ext.complete and len(ext.anisotropies) == 2
    assert sorted(d.theta for d in ext.anisotropies) == pytest.approx([math.pi / 4, 3 * math.pi / 4])


def test_lambda_min_disk_continuum():
    _, ext = sp.lambda_min(geo.disk(0.5, 2048), 2.0)
    assert ext.continuum and ext.anisotropies == ()


def test_lambda_min_star_extremizers():
    _, ext = sp.lambda_min(geo.star(10), 2.0)
    assert len(ext.anisotropies) == 10


def test_lambda_min_counterexample():
    res, ext = sp.lambda_min(geo.s_counterexample(), 2.0)
    assert ext.anisotropies == () and not ext.complete
    assert 0 < res.value < math.inf
    assert res.value == pytest.approx(math.pi ** 2 / 4, rel=1e-6)


@pytest.mark.parametrize("h", [Directional(1.0, 0.2), Euclidean(), WeightedLq(3.0, 1.0, 1.0)])
@pytest.mark.parametrize("p", [1.5, 3.0])
def test_degenerate_level_dominates_lambda_min(h, p):
    m = geo.cropped_disk(0.5, 0.3)
    lmin = sp.lambda_min(m, p)[0].value
    g = dominating_degenerate(h)
    assert sp.lambda_degenerate(m, g, p).value >= g.c ** p * lmin * (1 - 1e-12)


def test_bounds_on_square():
    lhs, rhs, holds, eq = sp.id_min_bound(geo.rect(1.0, 1.0), 2.0)
    assert holds and eq
    lhs, rhs, holds, eq = sp.ip_min_bound(geo.rect(1.0, 1.0), 2.0)
    assert lhs == pytest.approx(4.934802, rel=1e-6)
    assert rhs == pytest.approx(math.pi ** 3 / 4, rel=1e-9)
    assert holds and not eq


def test_ip_min_equality_on_disk():
    lhs, rhs, holds, eq = sp.ip_min_bound(geo.disk(0.5, 2048), 2.0)
    assert holds and eq


def test_ip_min_requires_convexity():
    with pytest.raises(NotConvex):
        sp.ip_min_bound(geo.star(5), 2.0)


def test_id_min_strict_on_annulus():
    lhs, rhs, holds, eq = sp.id_min_bound(geo.annulus(0.5, 0.3), 2.0)
    assert holds and not eq


def test_isodiametric():
    a, bound, ok = sp.isodiametric_check(geo.rect(1.0, 1.0))
    assert ok and a == pytest.approx(1.0) and bound == pytest.approx(math.pi / 2)


def test_u_estimate_rejects_zero():
    with pytest.raises(ZeroAnisotropy):
        sp.u_estimate_bounds(geo.rect(1.0, 1.0), Zero(), 2.0)


@pytest.mark.parametrize("h", [Euclidean(), WeightedLq(3.0, 1.0, 1.0)])
@pytest.mark.parametrize("p", [2.0, 3.0])
def test_blowup_sequence(h, p):
    seq = sp.blowup_sequence(h, p, 32)
    assert [k for k, _, _ in seq] == list(range(1, 33))
    assert all(a == pytest.approx(1.0, rel=1e-12) for _, a, _ in seq)
    vals = [r.value for _, _, r in seq]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    assert vals[-1] / vals[0] == pytest.approx(32 ** p, rel=1e-9)


def test_blowup_rejects_short_sequences():
    with pytest.raises(InvalidParams):
        sp.blowup_sequence(Euclidean(), 2.0, 1)
