"""Sanity of the independent reference computations before they are trusted."""

import math

import pytest

from oracles import (
    j01,
    lambda_1d_fd_extrapolated,
    laplace_1d_richardson,
    pi_p_quadrature,
)


def closed(p, length):
    pp = 2 * math.pi / (p * math.sin(math.pi / p))
    return (p - 1) * (pp / length) ** p


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
def test_quadrature_half_period(p):
    assert pi_p_quadrature(p) == pytest.approx(2 * math.pi / (p * math.sin(math.pi / p)), rel=1e-9)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 4.0])
@pytest.mark.parametrize("length", [0.5, 1.0, 2.0])
def test_descent_oracle_matches_interval_frequency(p, length):
    assert lambda_1d_fd_extrapolated(p, length) == pytest.approx(closed(p, length), rel=1e-3)


def test_laplace_richardson_is_pi_squared():
    assert laplace_1d_richardson(1.0) == pytest.approx(math.pi ** 2, rel=1e-5)


def test_bessel_zero():
    assert j01() == pytest.approx(2.404825557695773, rel=1e-14)
