"""Verification suite: every gate criterion as a callable returning a record.

Shared by `slowdisc verify` and the pytest acceptance module so both report
the same numbers.  Each criterion returns name, pass/fail, the measured
value, its pinned tolerance and a detail string; nothing here depends on
wall-clock or ordering, so repeated runs give identical results.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .baseflow import PowerLawFlow, sample_power_law
from .chebgrid import LogRadialGrid
from .deformation import DeformationPath, ModePath, circle_path, loop_area
from .ellipse import (RotatingEllipse, ellipse_axes_for_amplitude,
                      exact_geometric_angle, frame_bridge, vorticity_matched_K)
from .geometry import (curvature_closed_form, curvature_numeric,
                       f_m_closed_form, geometric_angle)
from .lagrangian import (HamiltonianField, action_drift, advect,
                         measure_geometric_angle, phase_split)
from .perturbation import (PerturbationSolution, polar_bracket,
                           project_away_mean, solve_psi1bar_1, solve_rho1,
                           FourierRadialField)
from .radialbvp import first_order_operator, generator_operator, mode_exponents, solve


@dataclass
class CriterionResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""
    runtime: float = 0.0
    budget: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.runtime:.2f}s]" if self.runtime else ""
        return (f"{status} {self.name}: value={self.value:.6e} "
                f"tolerance={self.tolerance:.6e}{extra}  {self.detail}")


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        res = fn(*a, **kw)
        res.runtime = time.perf_counter() - t0
        return res
    return wrapper


@_timed
def criterion_1_generator_closed_form() -> CriterionResult:
    """Numerical generator solves match i r^beta_m / m for alpha=0.5, m=2..6."""
    flow = PowerLawFlow(1.0, 0.5)
    rr = np.geomspace(1e-3, 1.0, 400)
    worst = 0.0
    for m in range(2, 7):
        _, bm, _ = mode_exponents(0.5, m)
        sol = solve(generator_operator(flow, m), 0, 1j / m, n=64)
        worst = max(worst, float(np.max(np.abs(sol(rr) - 1j * rr**bm / m))))
    return CriterionResult(
        name="1 generator-closed-form", passed=worst < 1e-8, value=worst,
        tolerance=1e-8, detail="alpha=0.5, m=2..6, N=64", budget=1.0)


@_timed
def criterion_2_first_order_closed_form() -> CriterionResult:
    """First-order correction matches (i/m)[gamma r^beta + (1-gamma) r^alpha_m]."""
    flow = PowerLawFlow(1.0, 0.5)
    rr = np.geomspace(1e-3, 1.0, 400)
    rho1 = solve_rho1(flow, range(2, 7))
    psi1 = solve_psi1bar_1(flow, rho1)
    worst = 0.0
    for m in range(2, 7):
        am, bm, gm = mode_exponents(0.5, m)
        exact = (1j / m) * (gm * rr**bm + (1.0 - gm) * rr**am)
        worst = max(worst, float(np.max(np.abs(psi1(m, rr) - exact))))
    return CriterionResult(
        name="2 first-order-closed-form", passed=worst < 1e-8, value=worst,
        tolerance=1e-8, detail="alpha=0.5, m=2..6, N=64", budget=1.0)


@_timed
def criterion_3_uniform_vorticity_response() -> CriterionResult:
    """f_2 = 8 identically at alpha=2, with p_2 = 0 and q_2 = 4 exactly."""
    resp = f_m_closed_form(PowerLawFlow(1.0, 2.0), 2, np.linspace(1e-3, 1.0, 1001))
    dev = float(np.max(np.abs(resp.f - 8.0)))
    exact_consts = resp.p_m == 0.0 and resp.q_m == 4.0
    return CriterionResult(
        name="3 uniform-vorticity-f2", passed=dev < 1e-10 and exact_consts,
        value=dev, tolerance=1e-10,
        detail=f"p_2={resp.p_m}, q_2={resp.q_m} (exact zeros required)")


@_timed
def criterion_4a_ellipse_number_closed_form() -> CriterionResult:
    """Pipeline angle for the mode-2 double circle equals 16 pi delta^2."""
    delta = 0.05
    path = DeformationPath({2: circle_path(2, turns=-2, samples=8192)},
                           delta=delta, epsilon=0.01)
    res = geometric_angle(PowerLawFlow(1.0, 2.0), path, r=np.array([0.3, 0.7, 1.0]))
    dev = float(np.max(np.abs(res.total - 16.0 * np.pi * delta**2)))
    return CriterionResult(
        name="4a ellipse-number-closed-form", passed=dev < 1e-12, value=dev,
        tolerance=1e-12, detail="positive-rotation double circle, delta=0.05",
        budget=1.0)


@_timed
def criterion_4b_ellipse_oracle_bridge() -> CriterionResult:
    """Exact-oracle angle with the frame bridge against 16 pi delta^2.

    The bridged remainder for an axis-ratio-matched unit-area ellipse is
    16 pi delta^2 [1 - 1/(1+delta^2)^2] = 5.0078 delta^3 at delta = 0.05,
    which exceeds the pinned 5 delta^3 by 0.16 percent; the criterion is
    implemented as stated and is expected to fail by that hair.  See the
    verification notes in the README.
    """
    delta = 0.05
    a, b = ellipse_axes_for_amplitude(delta)
    e = RotatingEllipse.uniform_rotation(a, b, K=vorticity_matched_K(1.0, a, b),
                                         epsilon=0.01, total_angle=2.0 * np.pi)
    fixed_frame = exact_geometric_angle(e, 2.0 * np.pi) - frame_bridge(2.0 * np.pi)
    dev = abs(fixed_frame - 16.0 * np.pi * delta**2)
    tol = 5.0 * delta**3
    return CriterionResult(
        name="4b ellipse-oracle-bridge", passed=dev < tol, value=dev,
        tolerance=tol,
        detail=f"remainder = {dev / delta**3:.4f} delta^3 (exact bridge value)",
        budget=1.0)


@_timed
def criterion_5_two_route_curvature() -> CriterionResult:
    """Numeric curvature assembly vs closed form for alpha=0.5, m in {2,3}."""
    flow = PowerLawFlow(1.0, 0.5)
    grid = LogRadialGrid(n=128, r_min=1e-3)
    sol = PerturbationSolution.compute(flow, [2, 3], grid=grid)
    sel = grid.r >= 0.05
    worst = 0.0
    for m in (2, 3):
        cn = curvature_numeric(sol, m)
        cc = curvature_closed_form(flow, m, grid.r)
        worst = max(worst, float(np.max(np.abs(cn.d_phi_star - cc.d_phi_star)[sel])))
        worst = max(worst, float(np.max(np.abs(cn.kappa - cc.kappa)[sel])))
    return CriterionResult(
        name="5 two-route-curvature", passed=worst < 1e-6, value=worst,
        tolerance=1e-6, detail="r in [0.05, 1]", budget=10.0)


def _holonomy_run() -> dict:
    flow = PowerLawFlow(1.0, 0.5)
    sol = PerturbationSolution.compute(flow, [3])
    delta, r0 = 0.03, 0.8
    pred = float(delta**2 * f_m_closed_form(flow, 3, np.array([r0])).f[0] * np.pi)

    def builder(eps: float) -> DeformationPath:
        return DeformationPath({3: circle_path(3, turns=-1)}, delta=delta,
                               epsilon=eps)

    res = measure_geometric_angle(flow, builder, sol, r0, (0.02, 0.01),
                                  order=2, dt=0.0375, n_particles=8)
    res["predicted"] = pred
    res["delta"] = delta
    return res


_HOLONOMY_CACHE: dict = {}


def _holonomy_cached() -> dict:
    if "run" not in _HOLONOMY_CACHE:
        _HOLONOMY_CACHE["run"] = _holonomy_run()
    return _HOLONOMY_CACHE["run"]


@_timed
def criterion_6_direct_holonomy() -> CriterionResult:
    """Measured geometric angle against delta^2 f_3(0.8) pi, Richardson in eps."""
    res = _holonomy_cached()
    delta = res["delta"]
    err = abs(res["extrapolated"] - res["predicted"])
    tol = max(5.0 * delta**3, 3.0 * res["residual"])
    return CriterionResult(
        name="6 direct-holonomy", passed=err < tol, value=err, tolerance=tol,
        detail=(f"measured={res['extrapolated']:.6f} "
                f"predicted={res['predicted']:.6f} "
                f"residual={res['residual']:.2e}"),
        budget=300.0)


@_timed
def criterion_7_adiabatic_drift_ratio() -> CriterionResult:
    """Action drift halves with epsilon: ratio within [1.7, 2.3]."""
    res = _holonomy_cached()
    d1 = res["drifts"][0.02].max_drift
    d2 = res["drifts"][0.01].max_drift
    ratio = d1 / d2
    return CriterionResult(
        name="7 adiabatic-drift-ratio", passed=1.7 <= ratio <= 2.3, value=ratio,
        tolerance=2.3, detail=f"drift(0.02)={d1:.3e}, drift(0.01)={d2:.3e}")


@_timed
def criterion_8_exact_trajectory() -> CriterionResult:
    """Pipeline trajectory against the exact rotating-ellipse solution."""
    delta, eps, amp = 0.05, 0.01, 0.5
    flow = PowerLawFlow(amp, 2.0)
    sol = PerturbationSolution.compute(flow, [2])
    path = DeformationPath({2: circle_path(2, turns=-2)}, delta=delta, epsilon=eps)
    hf = HamiltonianField(flow, path, sol, order=2)
    a, b = ellipse_axes_for_amplitude(delta)
    oracle = RotatingEllipse.uniform_rotation(
        a, b, K=vorticity_matched_K(amp, a, b), epsilon=eps,
        total_angle=2.0 * np.pi)
    x0, y0 = 0.7, 0.0
    t_end = 1.0 / eps
    dt = 2.0 * np.pi / (128.0 * 2.0 * amp)
    traj = advect(hf, x0, y0, t_end, dt, save_every=4)
    ex = oracle.advect(x0, y0, t_end, dt)
    xo = np.interp(traj.t, ex["t"], ex["x"])
    yo = np.interp(traj.t, ex["t"], ex["y"])
    err = float(np.max(np.hypot(traj.x - xo, traj.y - yo)))
    tol = 10.0 * (delta**2 + eps * delta)
    return CriterionResult(
        name="8 exact-oracle-trajectory", passed=err < tol, value=err,
        tolerance=tol, detail="one full ellipse rotation, delta=0.05, eps=0.01",
        budget=60.0)


@_timed
def criterion_9_property_suite() -> CriterionResult:
    """Structural invariants: symmetry, gauge zeros, projections, scalings."""
    flow = PowerLawFlow(1.0, 0.5)
    grid = LogRadialGrid(n=96, r_min=1e-3)
    sol = PerturbationSolution.compute(flow, [2, 3], grid=grid)
    checks: list[tuple[str, float, float]] = []   # (label, value, tolerance)

    # conjugate symmetry of assembled first-order fields
    fld = sol.rho1.sample(grid, {2: 0.3 + 0.4j, 3: -0.1 + 0.2j})
    checks.append(("rho1 conjugate symmetry", fld.conjugate_symmetry_defect(), 1e-12))

    # gauge zeros: no mode-0 content in the generators
    checks.append(("rho1 mode-0 gauge", float(np.max(np.abs(fld.profile(0)))), 1e-15))
    r2 = sol.rho2_snapshot({2: 1.0, 3: 0.5 + 0.1j})
    checks.append(("rho2 mode-0 gauge", float(np.max(np.abs(r2.profile(0)))), 1e-15))
    checks.append(("rho2 conjugate symmetry", r2.conjugate_symmetry_defect(), 1e-9))

    # chi1 = 0 and the first-order mean: both identically absent
    psi1 = sol.psi1bar_1.sample(grid, {2: 1.0, 3: 1.0})
    checks.append(("first-order mean", float(np.max(np.abs(psi1.profile(0)))), 1e-15))

    # projection idempotence
    f = FourierRadialField(grid, {0: grid.r**2 + 0j, 2: 1j * grid.r**3},
                           fill_conjugates=True)
    p1 = project_away_mean(f)
    p2 = project_away_mean(p1)
    dd = max(float(np.max(np.abs(p1.profile(m) - p2.profile(m))))
             for m in set(p1.mode_numbers()) | set(p2.mode_numbers()) | {0})
    checks.append(("projection idempotence", dd, 1e-15))

    # bilinearity: doubling amplitudes quadruples rho2 (exact in floats)
    r2d = sol.rho2_snapshot({2: 2.0})
    r2u = sol.rho2_snapshot({2: 1.0})
    checks.append(("rho2 bilinear scaling",
                   float(np.max(np.abs(r2d.profile(4) - 4.0 * r2u.profile(4)))), 1e-12))

    # chi2 bilinearity via |amplitude|^2 assembly
    c1 = sol.chi2.assemble({2: 1.0 + 0j})
    c2 = sol.chi2.assemble({2: 2.0 + 0j})
    checks.append(("chi2 bilinear scaling", float(np.max(np.abs(c2 - 4.0 * c1))), 1e-12))

    # loop-area reparameterization invariance
    s = np.linspace(0.0, 1.0, 2049)
    warped = s + 0.13 * np.sin(2.0 * np.pi * s) ** 3
    uni = ModePath(s, np.exp(2j * np.pi * s), closed=True)
    wav = ModePath(s, np.exp(2j * np.pi * warped), closed=True)
    area_u = DeformationPath({2: uni}, 0.05, 0.01)
    area_w = DeformationPath({2: wav}, 0.05, 0.01)
    d_area = abs(loop_area(area_u, 2).area - loop_area(area_w, 2).area)
    checks.append(("loop-area reparameterization", d_area, 1e-10))

    # geometric angle invariance under reparameterization of the same loop
    flow2 = PowerLawFlow(1.0, 2.0)
    g_u = geometric_angle(flow2, area_u, r=np.array([0.5])).total[0]
    g_w = geometric_angle(flow2, area_w, r=np.array([0.5])).total[0]
    checks.append(("angle reparameterization", abs(g_u - g_w), 1e-10))

    worst_margin = 0.0
    failed = []
    for label, value, tol in checks:
        margin = value / tol if tol > 0 else (0.0 if value == 0 else np.inf)
        worst_margin = max(worst_margin, margin)
        if value > tol:
            failed.append(f"{label} ({value:.2e} > {tol:.1e})")
    return CriterionResult(
        name="9 property-suite", passed=not failed, value=worst_margin,
        tolerance=1.0,
        detail="; ".join(failed) if failed else f"{len(checks)} invariants hold",
        budget=30.0)


ALL_CRITERIA = [
    criterion_1_generator_closed_form,
    criterion_2_first_order_closed_form,
    criterion_3_uniform_vorticity_response,
    criterion_4a_ellipse_number_closed_form,
    criterion_4b_ellipse_oracle_bridge,
    criterion_5_two_route_curvature,
    criterion_6_direct_holonomy,
    criterion_7_adiabatic_drift_ratio,
    criterion_8_exact_trajectory,
    criterion_9_property_suite,
]


def run_all() -> list[CriterionResult]:
    _HOLONOMY_CACHE.clear()
    return [fn() for fn in ALL_CRITERIA]
