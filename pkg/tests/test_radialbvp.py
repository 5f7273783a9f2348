import numpy as np
import pytest

from slowdisc import (C_POINCARE, PowerLawFlow, RadialSolveError,
                      conditioning_report, first_order_operator,
                      generator_operator, indicial_exponents, mode_exponents,
                      mode_laplacian, sample_power_law, solve)


def test_harmonic_mode():
    sol = solve(mode_laplacian(2), 0, 1.0)
    r = np.geomspace(1e-3, 1.0, 200)
    assert np.max(np.abs(sol(r) - r**2)) < 1e-12
    assert sol.residual < 1e-9


def test_poisson_mode_zero():
    # (1/r)(r u')' = 4, u(1) = 0, regular: u = r^2 - 1
    sol = solve(mode_laplacian(0), 4.0, 0.0)
    r = np.geomspace(1e-3, 1.0, 200)
    assert np.max(np.abs(sol(r) - (r**2 - 1.0))) < 1e-9


def test_generator_closed_form_sweep(flow_half):
    r = np.geomspace(1e-3, 1.0, 300)
    for m in range(2, 7):
        _, bm, _ = mode_exponents(0.5, m)
        sol = solve(generator_operator(flow_half, m), 0, 1j / m, n=64)
        assert np.max(np.abs(sol(r) - 1j * r**bm / m)) < 1e-8
        assert sol.condition_number < 1e6


def test_indicial_exponents():
    f2 = PowerLawFlow(1.0, 2.0)
    up, lo = indicial_exponents(generator_operator(f2, 2))
    assert up == pytest.approx(2.0) and lo == pytest.approx(-2.0)
    am, bm, _ = mode_exponents(0.5, 2)
    assert am == pytest.approx(np.sqrt(3.25))
    assert bm == pytest.approx(np.sqrt(3.25) + 1.5)
    up, lo = indicial_exponents(generator_operator(PowerLawFlow(1.0, 0.5), 2))
    assert up == pytest.approx(bm) and lo == pytest.approx(1.5 - am)
    # m = 1 below alpha = 1: the two admissible branches {3 - 2 alpha, 1}
    up, lo = indicial_exponents(generator_operator(PowerLawFlow(1.0, 0.5), 1))
    assert up == pytest.approx(2.0) and lo == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mode_exponents(0.5, 1)


def test_first_order_operator_closed_form(flow_half):
    r = np.geomspace(1e-3, 1.0, 300)
    for m in (2, 4):
        am, bm, gm = mode_exponents(0.5, m)
        rhs = lambda rr, m=m, bm=bm: -flow_half.domega0(rr) * (1j * rr**bm / m)
        sol = solve(first_order_operator(flow_half, m), rhs, 1j / m, n=64)
        exact = (1j / m) * (gm * r**bm + (1 - gm) * r**am)
        assert np.max(np.abs(sol(r) - exact)) < 1e-8


def test_grid_refinement_convergence(flow_half):
    # spectral accuracy on analytic data: each doubling of N gains at least
    # four orders until the rounding floor
    m = 2
    am, bm, gm = mode_exponents(0.5, m)
    r = np.linspace(0.05, 1.0, 101)
    exact = (1j / m) * (gm * r**bm + (1 - gm) * r**am)
    rhs = lambda rr: -flow_half.domega0(rr) * (1j * rr**bm / m)
    errs = []
    for n in (8, 16, 32):
        sol = solve(first_order_operator(flow_half, m), rhs, 1j / m, n=n)
        errs.append(max(float(np.max(np.abs(sol(r) - exact))), 1e-15))
    for a, b in zip(errs, errs[1:]):
        assert b < 1e-12 or a / b > 1e4


def test_uniqueness_and_linearity(flow_half):
    op = first_order_operator(flow_half, 3)
    zero = solve(op, 0, 0.0, n=48)
    assert np.max(np.absolute(zero.values)) < 1e-12
    rhs1 = lambda r: r**2
    rhs2 = lambda r: np.sin(r)
    s1 = solve(op, rhs1, 0.3 + 0.1j, n=48)
    s2 = solve(op, rhs2, -0.2j, n=48)
    s12 = solve(op, lambda r: rhs1(r) + rhs2(r), 0.3 - 0.1j, n=48)
    r = np.linspace(0.01, 1.0, 64)
    assert np.max(np.abs(s12(r) - s1(r) - s2(r))) < 1e-12


def test_derivative_evaluation_orders():
    sol = solve(mode_laplacian(3), 0, 2.0)
    r = np.linspace(0.2, 1.0, 11)
    assert np.max(np.abs(sol(r, 1) - 6.0 * r**2)) < 1e-10
    assert np.max(np.abs(sol(r, 2) - 12.0 * r)) < 1e-9
    assert np.max(np.abs(sol(r, 3) - 12.0)) < 1e-8
    with pytest.raises(ValueError):
        sol(r, 4)


def test_conditioning_reports(flow_half):
    rep = conditioning_report(mode_laplacian(2), n=32)
    assert np.isfinite(rep["condition_number"]) and not rep["flagged"]
    # operator sweep: all unflagged
    for alpha in (0.25, 0.5, 1.0, 1.5, 2.0):
        flow = PowerLawFlow(1.0, alpha)
        for m in range(2, 7):
            assert not conditioning_report(generator_operator(flow, m))["flagged"]
    # pushing the vorticity slope past the coercivity guarantee flags it
    probe = first_order_operator(flow_half, 2, f_prime_override=-C_POINCARE - 1.0)
    rep = conditioning_report(probe)
    assert rep["coercive"] is False and rep["flagged"]
    ok = first_order_operator(flow_half, 2, f_prime_override=-C_POINCARE + 1.0)
    assert conditioning_report(ok)["coercive"] is True


def test_near_singular_solve_raises():
    # shift the mode-0 operator onto its first eigenvalue: discretely singular
    op = first_order_operator(PowerLawFlow(1.0, 2.0), 0,
                              f_prime_override=-C_POINCARE)
    with pytest.raises(RadialSolveError):
        solve(op, 0, 1.0, n=48, r_min=1e-4)


def test_solution_regularity_exponent(flow_half):
    # selected branch dominates at the two innermost nodes
    sol = solve(generator_operator(flow_half, 4), 0, 1j / 4, n=64)
    r_in = sol.grid.r[:2]
    bound = np.abs(sol(r_in)) / r_in**sol.exponent
    assert np.all(bound < 10.0)


def test_tabulated_flow_solve_matches_closed_form():
    flow = PowerLawFlow(1.0, 0.5)
    tab = sample_power_law(flow, 2000)
    r = np.linspace(0.05, 1.0, 101)
    for m in (2, 3):
        _, bm, _ = mode_exponents(0.5, m)
        sol = solve(generator_operator(tab, m), 0, 1j / m, n=64)
        assert np.max(np.abs(sol(r) - 1j * r**bm / m)) < 2e-5
