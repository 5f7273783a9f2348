"""Lie-series solves for the slightly deformed disc.

Per-mode radial profiles, assembled once per unit amplitude:

  rho1    first-order generator of the vorticity-transport map; mode m
          solves the generator equation with boundary value i/m (the m = 1
          mode is the exact translation i r for any base flow).
  psi1bar first-order Eulerian correction, pulled back to the undeformed
          disc; same boundary value, driven by -omega0' rho1_m.
  chi2    second-order change of the vorticity-streamfunction relation;
          real radial profile per driving mode, from the solvability
          quadrature, anchored by chi2(1) = 0.
  rho2    second-order generator; per output Fourier mode, quadratic in the
          amplitudes, gauge rho2_0 = 0.
  psi1bar2 streamline average of the second-order correction; one radial
          profile h_m per driving mode multiplying the bilinear pair
          (amplitude_m) d(amplitude_m)*.

All fields are stored as radial profiles per azimuthal mode on a shared
log-radial Chebyshev grid; there is no 2-d grid anywhere in this pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baseflow import BaseFlow, PowerLawFlow
from .chebgrid import LogRadialGrid
from .radialbvp import (RadialSolution, first_order_operator, generator_operator,
                        mode_exponents, solve)


# --------------------------------------------------------------------------
# Fourier-radial fields and polar calculus
# --------------------------------------------------------------------------

class FourierRadialField:
    """Field on the disc stored as {azimuthal mode m: radial profile}.

    Profiles are complex samples on a shared LogRadialGrid.  A field
    representing a real function satisfies f_{-m} = conj(f_m); the
    constructor can enforce that by filling missing conjugate modes.
    """

    def __init__(self, grid: LogRadialGrid, modes: dict[int, np.ndarray] | None = None,
                 fill_conjugates: bool = False):
        self.grid = grid
        self.modes: dict[int, np.ndarray] = {}
        for m, prof in (modes or {}).items():
            prof = np.asarray(prof, dtype=complex)
            if prof.shape != grid.r.shape:
                raise ValueError("profile does not match the grid")
            self.modes[int(m)] = prof
        if fill_conjugates:
            for m in list(self.modes):
                if -m not in self.modes:
                    self.modes[-m] = np.conj(self.modes[m])

    def mode_numbers(self) -> list[int]:
        return sorted(self.modes)

    def profile(self, m: int) -> np.ndarray:
        return self.modes.get(m, np.zeros_like(self.grid.r, dtype=complex))

    def conjugate_symmetry_defect(self) -> float:
        worst = 0.0
        for m in self.modes:
            worst = max(worst, float(np.max(np.abs(self.profile(m) - np.conj(self.profile(-m))))))
        return worst

    def is_real_field(self, tol: float = 1e-10) -> bool:
        return self.conjugate_symmetry_defect() <= tol * max(1.0, self.max_abs())

    def max_abs(self) -> float:
        if not self.modes:
            return 0.0
        return max(float(np.max(np.abs(p))) for p in self.modes.values())

    def evaluate(self, r, sigma):
        """Pointwise values sum_m f_m(r) e^{i m sigma}."""
        r = np.asarray(r, dtype=float)
        sigma = np.asarray(sigma, dtype=float)
        out = np.zeros(np.broadcast(r, sigma).shape, dtype=complex)
        for m, prof in self.modes.items():
            out += self.grid.eval_samples(prof, r) * np.exp(1j * m * sigma)
        return out

    # algebra ------------------------------------------------------------------
    def copy(self) -> "FourierRadialField":
        return FourierRadialField(self.grid, {m: p.copy() for m, p in self.modes.items()})

    def __add__(self, other: "FourierRadialField") -> "FourierRadialField":
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        out = {m: p.copy() for m, p in self.modes.items()}
        for m, p in other.modes.items():
            out[m] = out.get(m, 0.0) + p
        return FourierRadialField(self.grid, out)

    def __mul__(self, scalar) -> "FourierRadialField":
        return FourierRadialField(self.grid, {m: scalar * p for m, p in self.modes.items()})

    __rmul__ = __mul__

    def __sub__(self, other: "FourierRadialField") -> "FourierRadialField":
        return self + (-1.0) * other

    def d_dr(self) -> "FourierRadialField":
        D = self.grid.Dr
        return FourierRadialField(self.grid, {m: D @ p for m, p in self.modes.items()})

    def laplacian(self) -> "FourierRadialField":
        """Per-mode Laplacian f'' + f'/r - m^2 f / r^2."""
        g = self.grid
        out = {}
        for m, p in self.modes.items():
            dp = g.Dr @ p
            d2p = g.Dr @ dp
            out[m] = d2p + dp / g.r - (m * m) * p / g.r**2
        return FourierRadialField(self.grid, out)


def project_away_mean(f: FourierRadialField) -> FourierRadialField:
    """The streamline projection: drop the azimuthal mean (mode 0)."""
    return FourierRadialField(f.grid, {m: p.copy() for m, p in f.modes.items() if m != 0})


def mean_part(f: FourierRadialField) -> np.ndarray:
    return f.profile(0)


def polar_bracket(f: FourierRadialField, g: FourierRadialField) -> FourierRadialField:
    """Jacobian [f, g] = (1/r)(f_r g_sigma - f_sigma g_r) by mode convolution.

    Modes m of f and n of g combine into m + n with profile
    (i/r)(n f_m' g_n - m f_m g_n').
    """
    if f.grid != g.grid:
        raise ValueError("grid mismatch")
    grid = f.grid
    df = {m: grid.Dr @ p for m, p in f.modes.items()}
    dg = {n: grid.Dr @ p for n, p in g.modes.items()}
    out: dict[int, np.ndarray] = {}
    for m, fm in f.modes.items():
        for n, gn in g.modes.items():
            prof = (1j / grid.r) * (n * df[m] * gn - m * fm * dg[n])
            key = m + n
            out[key] = out.get(key, 0.0) + prof
    return FourierRadialField(grid, out)


def bracket_with_angle(f: FourierRadialField) -> FourierRadialField:
    """[f, sigma] = (1/r) f_r for the angle coordinate sigma."""
    grid = f.grid
    return FourierRadialField(grid, {m: (grid.Dr @ p) / grid.r for m, p in f.modes.items()})


# --------------------------------------------------------------------------
# Per-mode kernels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _TranslationProfile:
    """Exact m = +-1 profile i r (sign-adjusted); mimics RadialSolution calls."""

    coefficient: complex

    def __call__(self, r, deriv: int = 0):
        r = np.asarray(r, dtype=float)
        if deriv == 0:
            return self.coefficient * r
        if deriv == 1:
            return self.coefficient * np.ones_like(r)
        return self.coefficient * np.zeros_like(r)

    residual = 0.0
    condition_number = 1.0


class ModeKernel:
    """Per-mode radial profiles for unit amplitude, with conjugate fill."""

    def __init__(self, profiles: dict[int, object]):
        self._p = dict(profiles)

    def mode_numbers(self) -> list[int]:
        return sorted(self._p)

    def __contains__(self, m: int) -> bool:
        return m in self._p

    def __call__(self, m: int, r, deriv: int = 0):
        prof = self._p.get(m)
        if prof is not None:
            return prof(r, deriv)
        conj = self._p.get(-m)
        if conj is None:
            raise KeyError(f"mode {m} not in kernel")
        return np.conj(conj(np.asarray(r), deriv))

    def sample(self, grid: LogRadialGrid, amplitudes: dict[int, complex] | None = None,
               include_conjugates: bool = True) -> FourierRadialField:
        """Assemble a FourierRadialField; amplitudes default to 1 per mode."""
        modes: dict[int, np.ndarray] = {}
        for m in self.mode_numbers():
            amp = 1.0 if amplitudes is None else amplitudes.get(m, None)
            if amp is None:
                continue
            modes[m] = amp * np.asarray(self(m, grid.r), dtype=complex)
            if include_conjugates and -m not in self._p:
                conj_amp = 1.0 if amplitudes is None else np.conj(amp)
                modes[-m] = conj_amp * np.asarray(self(-m, grid.r), dtype=complex)
        return FourierRadialField(grid, modes)


def solve_rho1(flow: BaseFlow, modes, n: int = 64, r_min: float = 1e-6) -> ModeKernel:
    """First-order map generator, one profile per positive mode, unit amplitude.

    Mode m solves the generator equation with value i/m at r = 1 and the
    gauge rho1_0 = 0; the m = 1 mode is the exact rigid translation i r.
    """
    if not flow.h2_ok():
        raise ValueError("base flow violates the bounded-period hypothesis")
    profiles: dict[int, object] = {}
    for m in sorted({abs(int(m)) for m in modes}):
        if m == 0:
            raise ValueError("mode 0 has no generator (gauge sets it to zero)")
        if m == 1:
            profiles[1] = _TranslationProfile(1j)
            continue
        op = generator_operator(flow, m)
        profiles[m] = solve(op, 0, 1j / m, n=n, r_min=r_min)
    return ModeKernel(profiles)


def solve_psi1bar_1(flow: BaseFlow, rho1: ModeKernel,
                    n: int = 64, r_min: float = 1e-6) -> ModeKernel:
    """First-order Eulerian correction per unit amplitude rate.

    Mode m solves psi0'[(1/r)(r u')' - m^2 u/r^2] - omega0' u = -omega0' rho1_m
    with u(1) = i/m; mode 0 vanishes.  For m = 1 the exact solution is i r.
    """
    profiles: dict[int, object] = {}
    for m in rho1.mode_numbers():
        if m == 1:
            profiles[1] = _TranslationProfile(1j)
            continue
        op = first_order_operator(flow, m)
        rhs = lambda r, m=m: -flow.domega0(r) * rho1(m, r)
        profiles[m] = solve(op, rhs, 1j / m, n=n, r_min=r_min)
    return ModeKernel(profiles)


@dataclass
class Chi2Kernel:
    """chi2 profiles per driving mode m > 0, unit |amplitude|^2, chi2(1) = 0."""

    grid: LogRadialGrid
    profiles: dict[int, np.ndarray]
    derivatives: dict[int, np.ndarray]

    def assemble(self, amplitudes: dict[int, complex]) -> np.ndarray:
        out = np.zeros_like(self.grid.r)
        for m, prof in self.profiles.items():
            amp = amplitudes.get(m)
            if amp is not None:
                out = out + (abs(amp) ** 2) * prof
        return out


def _chi2_slope(flow: BaseFlow, rho1: ModeKernel, m: int, r: np.ndarray) -> np.ndarray:
    """d(chi2_m)/dr at arbitrary radii, unit |amplitude|^2.

    The azimuthal average of the quadratic source for driving mode m is

        Q_m(r) = 2 [ m^2 |rho_m'|^2 + m^4 |rho_m|^2 / r^2 - (m^2/r) d|rho_m|^2/dr ],

    and (r chi2')' = -(psi0' Q_m / r)' with chi2' bounded at the origin, so
    chi2' = -psi0' Q_m / r^2.
    """
    rho = np.asarray(rho1(m, r), dtype=complex)
    drho = np.asarray(rho1(m, r, 1), dtype=complex)
    mod2 = np.abs(rho) ** 2
    dmod2 = 2.0 * np.real(np.conj(rho) * drho)
    q = 2.0 * (m * m * np.abs(drho) ** 2 + m**4 * mod2 / r**2 - (m * m / r) * dmod2)
    return -flow.dpsi0(r) * q / r**2


def solve_chi2(flow: BaseFlow, rho1: ModeKernel, grid: LogRadialGrid) -> Chi2Kernel:
    """Second-order vorticity-streamfunction shift from the solvability quadrature.

    Boundedness at the origin and chi2(1) = 0 fix both integration
    constants; the profile is chi2 = -int_r^1 chi2'(s) ds with the slope
    from the azimuthally averaged quadratic source.
    """
    r = grid.r
    profiles, derivatives = {}, {}
    for m in rho1.mode_numbers():
        dchi = _chi2_slope(flow, rho1, m, r)
        profiles[m] = -grid.antiderivative_from_one(dchi)
        derivatives[m] = dchi
    return Chi2Kernel(grid=grid, profiles=profiles, derivatives=derivatives)


def solve_rho2(flow: BaseFlow, rho1: ModeKernel, chi2: Chi2Kernel,
               amplitudes: dict[int, complex], grid: LogRadialGrid,
               n: int = 96, r_min: float = 1e-3,
               solvability_tol: float = 1e-6) -> FourierRadialField:
    """Second-order generator for a given amplitude snapshot.

    Assembles the quadratic source 2[r1, L[r1, psi0]] - [r1, [r1, omega0]]
    - L[r1, [r1, psi0]] by mode convolution on the working grid, checks the
    mode-0 solvability against the chi2 quadrature, and solves one radial
    problem per nonzero output mode with the quadratic boundary data.
    Output is bilinear in the amplitudes; mode 0 is gauged to zero.

    The working grid floor stays at 1e-3: the source mixes profiles as
    singular as omega0 ~ r^{alpha-2}, and spectral differentiation across a
    larger dynamic range would leak roundoff into the outer nodes.
    """
    work = LogRadialGrid(n=n, r_min=max(r_min, 1e-3))
    amps = dict(amplitudes)
    for m in list(amps):
        if -m not in amps:
            amps[-m] = np.conj(amps[m])
    r1 = FourierRadialField(
        work, {m: amps[m] * np.asarray(rho1(m, work.r), dtype=complex) for m in amps})

    omega0f = FourierRadialField(work, {0: flow.omega0(work.r).astype(complex)})
    # [r1, psi0] per mode, analytically: -i m (psi0'/r) rho_m
    dpsi = flow.dpsi0(work.r)
    b_psi = FourierRadialField(
        work,
        {m: -1j * m * (dpsi / work.r) * amps[m] * np.asarray(rho1(m, work.r), dtype=complex)
         for m in amps})
    source = (2.0 * polar_bracket(r1, b_psi.laplacian())
              - polar_bracket(r1, polar_bracket(r1, omega0f))
              - polar_bracket(r1, b_psi).laplacian())

    # mode-0 solvability: source_0 must equal (2/r)(r chi2')' for the snapshot
    s0 = source.profile(0)
    dchi = np.zeros_like(work.r)
    for m in chi2.profiles:
        amp = amps.get(m)
        if amp is not None:
            dchi += (abs(amp) ** 2) * _chi2_slope(flow, rho1, m, work.r)
    lhs0 = (2.0 / work.r) * (work.Dr @ (work.r * dchi))
    # compare away from the truncation floor where relative scales are sane
    sel = work.r >= 1e-2
    scale = max(1.0, float(np.max(np.abs(s0[sel]))))
    defect = float(np.max(np.abs(lhs0[sel] - np.real(s0[sel]))) / scale)
    if defect > solvability_tol:
        raise RuntimeError(
            f"mode-0 solvability defect {defect:.3e} exceeds {solvability_tol:.1e}; "
            "chi2 and the rho2 source disagree")

    # boundary data per output mode: quadratic combination at r = 1
    rho_at_1 = {m: complex(np.asarray(rho1(m, 1.0))) for m in amps}
    drho_at_1 = {m: complex(np.asarray(rho1(m, 1.0, 1))) for m in amps}
    bc: dict[int, complex] = {}
    for k, ak in amps.items():
        for l, al in amps.items():
            p = k + l
            if p == 0:
                continue
            val = ak * al * (-l * p * drho_at_1[k] * rho_at_1[l]
                             + k * l * rho_at_1[k] * rho_at_1[l])
            bc[p] = bc.get(p, 0.0) + val

    out: dict[int, np.ndarray] = {}
    for p in sorted(m for m in source.mode_numbers() if m > 0):
        op = generator_operator(flow, p)
        # the generator equation is the p-mode source times r/(i p)
        rhs = source.profile(p) * work.r / (1j * p)
        bcp = bc.get(p, 0.0) / (1j * p)
        sol = solve(op, rhs, bcp, n=work.n, r_min=work.r_min)
        out[p] = np.asarray(sol(grid.r), dtype=complex)
        out[-p] = np.conj(out[p])
    return FourierRadialField(grid, out)


@dataclass
class Psi1Bar2Mean:
    """Streamline-averaged second-order correction per driving mode m > 0.

    h_m(r) multiplies the bilinear pair  amplitude_m * d(amplitude_m)^*;
    the coefficient of the conjugate pair is conj(h_m).  Normalized by
    h_m -> 0 at the origin, matching the closed forms.
    """

    grid: LogRadialGrid
    profiles: dict[int, np.ndarray]

    def d_phi_star(self, m: int) -> np.ndarray:
        """Coefficient of d(amp_m) wedge d(amp_m)^* in the curvature's first part."""
        h = self.profiles[m]
        return h - np.conj(h)


def _poisson_mode0(grid: LogRadialGrid, rhs: np.ndarray) -> np.ndarray:
    """Solve (1/r)(r h')' = rhs with r h' -> 0 at the origin and h(0) = 0.

    The grid truncates at r_min; the missing core mass is restored by a
    local power-law fit of the source at the innermost nodes.
    """
    r = grid.r
    # fit rhs ~ c r^p at the inner edge for the [0, r_min] contribution
    f0, f1 = rhs[0], rhs[1]
    core_s1 = 0.0
    core_h = 0.0
    if abs(f0) > 0.0 and abs(f1) > 0.0:
        p = np.real(np.log(f1 / f0) / np.log(r[1] / r[0]))
        if -1.9 < p < 60.0:
            c = f0 / r[0] ** p
            core_s1 = c * r[0] ** (p + 2.0) / (p + 2.0)
            core_h = c * r[0] ** (p + 2.0) / (p + 2.0) ** 2
    s1 = core_s1 + grid.antiderivative_from_rmin(r * rhs)     # r h'
    h = core_h + grid.antiderivative_from_rmin(s1 / r)
    return h


def solve_psi1bar_2_avg(flow: BaseFlow, rho1: ModeKernel, psi1: ModeKernel,
                        grid: LogRadialGrid) -> Psi1Bar2Mean:
    """Radial quadrature of the averaged second-order correction equation.

    Per driving mode m the azimuthal mean of L[rho1, psi1bar] - [rho1, L psi1bar]
    pairing mode m of rho1 with mode -m of the one-form gives

        R_m = -i m { L0[(1/r)(rho_m psi_{-m})'] - (1/r)(rho_m L_m psi_{-m})' },

    with L0, L_m the per-mode Laplacians; then (1/r)(r h_m')' = R_m.  The
    source is expanded by the product rule into solver-side derivatives of
    rho_m and psi_m (orders up to 3), avoiding stacked grid differentiation
    whose roundoff would dominate the two-route curvature comparison.
    """
    r = grid.r
    profiles: dict[int, np.ndarray] = {}
    for m in rho1.mode_numbers():
        dr = [np.asarray(rho1(m, r, k), dtype=complex) for k in range(4)]
        dp = [np.asarray(psi1(-m, r, k), dtype=complex) for k in range(4)]
        # g = (rho psi)'/r and its first two derivatives
        g = (dr[1] * dp[0] + dr[0] * dp[1]) / r
        g1 = (dr[2] * dp[0] + 2.0 * dr[1] * dp[1] + dr[0] * dp[2]) / r - g / r
        g2 = ((dr[3] * dp[0] + 3.0 * dr[2] * dp[1] + 3.0 * dr[1] * dp[2] + dr[0] * dp[3]) / r
              - 2.0 * (dr[2] * dp[0] + 2.0 * dr[1] * dp[1] + dr[0] * dp[2]) / r**2
              + 2.0 * (dr[1] * dp[0] + dr[0] * dp[1]) / r**3)
        term1 = g2 + g1 / r
        lap_psi = dp[2] + dp[1] / r - (m * m) * dp[0] / r**2
        dlap_psi = (dp[3] + dp[2] / r - dp[1] / r**2
                    - (m * m) * (dp[1] / r**2 - 2.0 * dp[0] / r**3))
        term2 = (dr[1] * lap_psi + dr[0] * dlap_psi) / r
        rhs = -1j * m * (term1 - term2)
        profiles[m] = _poisson_mode0(grid, rhs)
    return Psi1Bar2Mean(grid=grid, profiles=profiles)


# --------------------------------------------------------------------------
# bundle
# --------------------------------------------------------------------------

@dataclass
class PerturbationSolution:
    """All per-mode kernels for one base flow and mode set."""

    flow: BaseFlow
    grid: LogRadialGrid
    modes: list[int]
    rho1: ModeKernel
    psi1bar_1: ModeKernel
    chi2: Chi2Kernel
    psi1bar_2: Psi1Bar2Mean

    @classmethod
    def compute(cls, flow: BaseFlow, modes, grid: LogRadialGrid | None = None,
                n: int = 64, r_min: float = 1e-6) -> "PerturbationSolution":
        grid = grid or LogRadialGrid(n=128, r_min=1e-3)
        mode_list = sorted({abs(int(m)) for m in modes})
        rho1 = solve_rho1(flow, mode_list, n=n, r_min=r_min)
        psi1 = solve_psi1bar_1(flow, rho1, n=n, r_min=r_min)
        chi2 = solve_chi2(flow, rho1, grid)
        psi2 = solve_psi1bar_2_avg(flow, rho1, psi1, grid)
        return cls(flow=flow, grid=grid, modes=mode_list, rho1=rho1,
                   psi1bar_1=psi1, chi2=chi2, psi1bar_2=psi2)

    def rho2_snapshot(self, amplitudes: dict[int, complex],
                      n: int = 64, r_min: float = 1e-6) -> FourierRadialField:
        return solve_rho2(self.flow, self.rho1, self.chi2, amplitudes,
                          self.grid, n=n, r_min=r_min)
