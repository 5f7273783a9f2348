import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slowdisc import (DeformationPath, ModePath, area_preservation_defect,
                      boundary_radius, circle_path, loop_area)
from slowdisc.deformation import DeformationError


def unit_circle_path(delta=0.05, eps=0.01, **kw):
    return DeformationPath({2: circle_path(2, **kw)}, delta=delta, epsilon=eps)


def test_boundary_radius_undeformed():
    p = unit_circle_path(delta=0.0)
    s = np.linspace(0, 2 * np.pi, 17)
    assert np.max(np.abs(boundary_radius(p, 0.3, s) - 1.0)) == 0.0


def test_boundary_radius_single_mode_value():
    # r(0) = 1 + 2 delta cos(0) - delta^2 for a unit mode-2 amplitude
    p = unit_circle_path(delta=0.05, phase=0.0)
    assert boundary_radius(p, 0.0, 0.0) == pytest.approx(1.0 + 0.1 - 0.0025)
    # full formula against a direct complex-sum evaluation
    s = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    lam = p.modes[2](0.37)
    direct = 1.0 + 0.05 * (lam * np.exp(2j * s) + np.conj(lam) * np.exp(-2j * s)) \
        - 0.05**2 / 2 * 2 * abs(lam) ** 2
    assert np.max(np.abs(direct.imag)) < 1e-14
    assert np.max(np.abs(boundary_radius(p, 0.37, s) - direct.real)) < 1e-14


def test_boundary_radius_requires_valid_tau():
    p = unit_circle_path()
    with pytest.raises(DeformationError):
        boundary_radius(p, 2.5, 0.0)


def test_loop_areas():
    assert loop_area(unit_circle_path(), 2).area == pytest.approx(np.pi, abs=1e-10)
    twice = unit_circle_path(turns=2, samples=8192)
    assert loop_area(twice, 2).area == pytest.approx(2 * np.pi, abs=1e-11)
    tau = np.linspace(0, 1, 64)
    const = DeformationPath({3: ModePath(tau, np.full(64, 0.2 + 0.1j), closed=True)},
                            0.05, 0.01)
    assert loop_area(const, 3).area == 0.0
    # negative mode index flips the orientation (conjugate path)
    assert loop_area(unit_circle_path(), -2).area == pytest.approx(-np.pi, abs=1e-10)


def test_loop_area_requires_closed_path():
    tau = np.linspace(0, 1, 64)
    open_path = ModePath(tau, np.exp(1j * np.pi * tau), closed=False)
    p = DeformationPath({2: open_path}, 0.05, 0.01)
    assert not p.closed
    with pytest.raises(DeformationError):
        loop_area(p, 2)
    with pytest.raises(DeformationError):
        ModePath(np.array([0.0, 1.0]), np.array([1.0, 1.0 + 0j]), closed=True)


def test_loop_area_reparameterization_invariance():
    s = np.linspace(0.0, 1.0, 2049)
    base = loop_area(DeformationPath(
        {2: ModePath(s, np.exp(2j * np.pi * s), closed=True)}, 0.05, 0.01), 2).area
    for amp in (0.08, 0.15):
        warped = s + amp * np.sin(2 * np.pi * s) ** 3
        area = loop_area(DeformationPath(
            {2: ModePath(s, np.exp(2j * np.pi * warped), closed=True)}, 0.05, 0.01), 2).area
        assert area == pytest.approx(base, abs=1e-10)


def test_area_preservation_defect_scaling():
    # defect is pi delta^4 for a unit single mode: well inside the O(delta^3)
    # bound, halving delta reduces it 16-fold
    d1 = area_preservation_defect(unit_circle_path(delta=0.05), 0.2)
    d2 = area_preservation_defect(unit_circle_path(delta=0.025), 0.2)
    assert d1 == pytest.approx(np.pi * 0.05**4, rel=1e-6)
    assert d1 <= 1.0 * 0.05**3
    assert 14.0 < d1 / d2 < 18.0
    assert area_preservation_defect(unit_circle_path(delta=0.0), 0.2) < 1e-14


def test_conjugate_symmetry_enforced():
    good = circle_path(2)
    mirrored = ModePath(good.tau, np.conj(good.values), closed=True)
    DeformationPath({2: good, -2: mirrored}, 0.05, 0.01)   # accepted
    bad = ModePath(good.tau, 1.1 * np.conj(good.values), closed=True)
    with pytest.raises(DeformationError):
        DeformationPath({2: good, -2: bad}, 0.05, 0.01)


def test_mode_zero_rejected():
    tau = np.linspace(0, 1, 16)
    with pytest.raises(DeformationError):
        DeformationPath({0: ModePath(tau, np.ones(16, complex), closed=True)},
                        0.05, 0.01)


def test_parameter_validation():
    with pytest.raises(DeformationError):
        unit_circle_path(delta=-0.1)
    with pytest.raises(DeformationError):
        DeformationPath({2: circle_path(2)}, delta=0.05, epsilon=0.0)


@settings(max_examples=20, deadline=None)
@given(phase=st.floats(0.0, 2 * np.pi), radius=st.floats(0.1, 2.0),
       tau=st.floats(0.0, 1.0))
def test_boundary_radius_real_and_area_preserving(phase, radius, tau):
    p = unit_circle_path(delta=0.02, phase=phase, radius=radius)
    s = np.linspace(0, 2 * np.pi, 128, endpoint=False)
    r = boundary_radius(p, tau, s)
    assert np.all(np.isreal(r)) and np.all(r > 0.8)
    assert area_preservation_defect(p, tau) < 0.02**3
