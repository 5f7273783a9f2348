import numpy as np
import pytest
from numpy.polynomial import chebyshev as cheb

from slowdisc.chebgrid import LogRadialGrid, values_to_coefficients


@pytest.mark.parametrize("p", [0.5, 1.802776, 3.3027756, 7.0])
def test_power_functions_resolved(p):
    g = LogRadialGrid(n=96, r_min=1e-3)
    f = g.r**p
    assert np.max(np.abs(g.d_dr(f) - p * g.r ** (p - 1))) < 1e-10 * p
    exact = (1.0 - g.r_min ** (p + 1)) / (p + 1)
    assert abs(g.integrate_dr(f) - exact) < 1e-14
    anti = (1.0 - g.r ** (p + 1)) / (p + 1)
    assert np.max(np.abs(g.antiderivative_from_one(f) - anti)) < 1e-13


def test_coefficient_roundtrip_complex():
    g = LogRadialGrid(n=64, r_min=1e-2)
    f = 1j * g.r**2.5 + g.r**1.2
    c = values_to_coefficients(f)
    assert np.max(np.abs(cheb.chebval(g.x, c) - f)) < 1e-13


def test_barycentric_evaluation():
    g = LogRadialGrid(n=96, r_min=1e-3)
    f = g.r**2.25
    pts = np.array([1.5e-3, 0.031, 0.5, 0.93, 1.0])
    assert np.max(np.abs(g.eval_samples(f, pts) - pts**2.25)) < 1e-13
    assert abs(g.eval_samples(f, 0.7) - 0.7**2.25) < 1e-13


def test_antiderivative_from_rmin():
    g = LogRadialGrid(n=96, r_min=1e-3)
    f = 3.0 * g.r**2
    got = g.antiderivative_from_rmin(f)
    assert np.max(np.abs(got - (g.r**3 - g.r_min**3))) < 1e-13


def test_grid_equality_and_validation():
    assert LogRadialGrid(n=32, r_min=1e-2) == LogRadialGrid(n=32, r_min=1e-2)
    assert LogRadialGrid(n=32, r_min=1e-2) != LogRadialGrid(n=48, r_min=1e-2)
    with pytest.raises(ValueError):
        LogRadialGrid(n=32, r_min=0.0)
