"""Curvature of the natural connection and the geometric particle angle.

For the power-law family the curvature coefficient per driving mode m and
the resulting angle response f_m(r) have closed forms built from

    E(a, b) = 2 a b + b^2 - 2a - 2b + m^2,      F(a, b) = E(a, b)/(a + b - 2),
    p_m = gamma_m E(beta_m, beta_m) - 2 beta_m (beta_m - 1),
    q_m = (1 - gamma_m) E(alpha_m, beta_m),
    f_m(r) = (4/m) (p_m r^{2 beta_m - 4} + q_m r^{alpha_m + beta_m - 4}).

The same quantities are assembled numerically from the perturbation
kernels for any admissible base flow: the two-form coefficient of the
averaged second-order correction gives the first curvature component, the
azimuthal average of the bracket of the leading connection with itself
gives the second, and d/dI = (1/r) d/dr converts the holonomy integrand
into the angle response.

Sign bookkeeping: the holonomy area A_m that multiplies f_m is minus the
(counterclockwise-positive) oriented area returned by the deformation
module, because a counterclockwise amplitude loop moves the boundary
crests clockwise: A_m = -loop_area, equivalently the surface integral of
d(amp_m) wedge d(amp_m)^* equals 2 i A_m.  The total geometric angle for
a closed path is

    delta_theta_geo = delta^2 * sum_{m>0} f_m(r) * A_m + O(delta^3).

The sign was validated end to end against the rotating ellipse: a
positively rotating ellipse corresponds to the mode-2 amplitude circling
clockwise (A_2 = +2 pi for a full turn of the domain) and a geometric
angle +16 pi delta^2, matching both the exact solution and direct
particle advection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baseflow import BaseFlow, PowerLawFlow
from .chebgrid import LogRadialGrid
from .deformation import DeformationPath, loop_area
from .perturbation import PerturbationSolution
from .radialbvp import mode_exponents


def curvature_e(a: float, b: float, m: int) -> float:
    return 2.0 * a * b + b * b - 2.0 * a - 2.0 * b + m * m


def curvature_f(a: float, b: float, m: int) -> float:
    return curvature_e(a, b, m) / (a + b - 2.0)


@dataclass(frozen=True)
class CurvatureProfile:
    """Radial coefficients of the curvature two-form for one driving mode.

    d_phi_star and bracket are the coefficients of d(amp) wedge d(amp)^* in
    the two curvature components; kappa = d_phi_star - bracket/2.  All are
    sigma-independent by construction.
    """

    m: int
    r: np.ndarray
    d_phi_star: np.ndarray
    bracket: np.ndarray
    provenance: str

    @property
    def kappa(self) -> np.ndarray:
        return self.d_phi_star - 0.5 * self.bracket


@dataclass(frozen=True)
class ModeAngleResponse:
    """f_m profile with its closed-form constants (NaN when assembled numerically)."""

    m: int
    r: np.ndarray
    f: np.ndarray
    alpha_m: float
    beta_m: float
    gamma_m: float
    p_m: float
    q_m: float
    provenance: str


@dataclass(frozen=True)
class GeometricAngleResult:
    """Predicted geometric angle for a closed deformation path.

    areas holds the holonomy areas A_m (clockwise-positive, i.e. minus the
    deformation module's oriented loop areas).
    """

    r: np.ndarray
    delta: float
    total: np.ndarray                       # delta^2 sum_m f_m(r) A_m
    per_mode: dict[int, ModeAngleResponse]
    areas: dict[int, float]
    provenance: str

    def at(self, r0: float) -> float:
        return float(np.interp(r0, self.r, self.total))


def _require_power_law(flow: BaseFlow) -> PowerLawFlow:
    if not isinstance(flow, PowerLawFlow):
        raise TypeError("closed forms exist for power-law base flows only")
    return flow


def curvature_closed_form(flow: BaseFlow, m: int,
                          r: np.ndarray | None = None) -> CurvatureProfile:
    """Closed-form curvature coefficients for a power-law flow, mode |m| >= 2."""
    flow = _require_power_law(flow)
    m = abs(int(m))
    am, bm, gm = mode_exponents(flow.alpha, m)
    if r is None:
        r = np.linspace(1e-3, 1.0, 512)
    r = np.asarray(r, dtype=float)
    d_phi = -2j / m * (gm * curvature_f(bm, bm, m) * r ** (2 * bm - 2)
                       + (1.0 - gm) * curvature_f(am, bm, m) * r ** (am + bm - 2))
    br = -4j * (bm / m) * r ** (2 * bm - 2)
    return CurvatureProfile(m=m, r=r, d_phi_star=d_phi, bracket=br,
                            provenance="closed_form")


def curvature_numeric(solution: PerturbationSolution, m: int) -> CurvatureProfile:
    """Curvature coefficients assembled from the perturbation kernels.

    First component: the mean second-order profile h_m gives h_m - conj(h_m)
    as the coefficient of d(amp) wedge d(amp)^*.  Second component: the
    azimuthal mean of the bracket of the leading connection with itself,
    -(2 i m / r) d|rho_m|^2/dr, assembled from the solved rho1 profiles.
    """
    m = abs(int(m))
    grid = solution.grid
    r = grid.r
    d_phi = solution.psi1bar_2.d_phi_star(m)
    rho = np.asarray(solution.rho1(m, r), dtype=complex)
    drho = np.asarray(solution.rho1(m, r, 1), dtype=complex)
    br = -2j * m / r * 2.0 * np.real(np.conj(rho) * drho)
    return CurvatureProfile(m=m, r=r, d_phi_star=d_phi, bracket=br,
                            provenance="numeric")


def f_m_closed_form(flow: BaseFlow, m: int,
                    r: np.ndarray | None = None) -> ModeAngleResponse:
    """Closed-form angle response f_m(r) with its constants p_m, q_m."""
    flow = _require_power_law(flow)
    m = abs(int(m))
    am, bm, gm = mode_exponents(flow.alpha, m)
    p_m = gm * curvature_e(bm, bm, m) - 2.0 * bm * (bm - 1.0)
    q_m = (1.0 - gm) * curvature_e(am, bm, m)
    if r is None:
        r = np.linspace(1e-3, 1.0, 512)
    r = np.asarray(r, dtype=float)
    f = (4.0 / m) * (p_m * r ** (2 * bm - 4) + q_m * r ** (am + bm - 4))
    return ModeAngleResponse(m=m, r=r, f=f, alpha_m=am, beta_m=bm, gamma_m=gm,
                             p_m=p_m, q_m=q_m, provenance="closed_form")


def f_m_numeric(solution: PerturbationSolution, m: int) -> ModeAngleResponse:
    """Angle response assembled numerically: f_m = 2 i (1/r) d kappa_m / dr."""
    m = abs(int(m))
    cp = curvature_numeric(solution, m)
    grid = solution.grid
    f = np.real(2j * (grid.Dr @ cp.kappa) / grid.r)
    return ModeAngleResponse(m=m, r=grid.r, f=f,
                             alpha_m=float("nan"), beta_m=float("nan"),
                             gamma_m=float("nan"), p_m=float("nan"),
                             q_m=float("nan"), provenance="numeric")


def geometric_angle(flow: BaseFlow, path: DeformationPath,
                    r: np.ndarray | float | None = None,
                    solution: PerturbationSolution | None = None) -> GeometricAngleResult:
    """Predicted geometric angle over one closed deformation loop.

    delta^2 sum_{m>0} f_m(r) area_m with the O(delta^3) truncation implied;
    closed forms for power-law flows, kernel assembly otherwise (pass a
    precomputed PerturbationSolution to reuse or force the numeric route).
    """
    if not path.closed:
        raise ValueError("geometric angle requires a closed deformation path")
    if r is None:
        r_arr = np.linspace(1e-3, 1.0, 512)
    else:
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    per_mode: dict[int, ModeAngleResponse] = {}
    areas: dict[int, float] = {}
    use_closed = isinstance(flow, PowerLawFlow) and solution is None
    if not use_closed and solution is None:
        solution = PerturbationSolution.compute(flow, path.mode_numbers())
    total = np.zeros_like(r_arr)
    for m in path.mode_numbers():
        if m < 2:
            raise ValueError(
                "geometric-angle responses are defined for modes |m| >= 2 "
                "(mode 1 is a rigid translation)")
        areas[m] = -loop_area(path, m).area      # holonomy area, clockwise-positive
        if use_closed:
            resp = f_m_closed_form(flow, m, r_arr)
        else:
            raw = f_m_numeric(solution, m)
            f_interp = solution.grid.eval_samples(raw.f, r_arr)
            resp = ModeAngleResponse(m=m, r=r_arr, f=np.asarray(f_interp, dtype=float),
                                     alpha_m=raw.alpha_m, beta_m=raw.beta_m,
                                     gamma_m=raw.gamma_m, p_m=raw.p_m, q_m=raw.q_m,
                                     provenance="numeric")
        per_mode[m] = resp
        total = total + path.delta**2 * resp.f * areas[m]
    provenance = "closed_form" if use_closed else "numeric"
    return GeometricAngleResult(r=r_arr, delta=path.delta, total=total,
                                per_mode=per_mode, areas=areas, provenance=provenance)
