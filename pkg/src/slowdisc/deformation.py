"""Deforming-disc boundary: mode paths, boundary radius, loop areas.

The boundary of the deformed disc is

    r(sigma) = 1 + delta * sum_m L_m e^{i m sigma} - (delta^2/2) * sum_m |L_m|^2

with complex amplitudes L_m, L_{-m} = L_m^*, L_0 = 0; the quadratic term
keeps the enclosed area equal to pi through second order.  Amplitude paths
L_m(tau) are stored as uniformly sampled arrays on [0, T] with cubic-spline
interpolation (periodic splines for closed paths).

Orientation convention: a counterclockwise loop of L_m has positive loop
area.  Physically, advancing the phase of L_m moves the boundary crests
(at m sigma = -arg L_m) clockwise, so the positive-rotation near-ellipse
corresponds to L_2 tracing the unit circle CLOCKWISE twice; the geometry
module pairs its angle responses with minus this oriented area for that
reason.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline


class DeformationError(ValueError):
    pass


@dataclass(frozen=True)
class LoopArea:
    """Signed area enclosed by one amplitude path; unit circle -> pi."""

    m: int
    area: float


class ModePath:
    """One sampled complex amplitude curve L_m(tau) on [0, T]."""

    def __init__(self, tau: np.ndarray, values: np.ndarray, closed: bool):
        tau = np.asarray(tau, dtype=float)
        values = np.asarray(values, dtype=complex)
        if tau.ndim != 1 or tau.shape != values.shape or len(tau) < 3:
            raise DeformationError("need at least 3 matching samples")
        if tau[0] != 0.0 or np.any(np.diff(tau) <= 0.0):
            raise DeformationError("tau samples must increase from 0")
        self.tau = tau
        self.values = values
        self.closed = bool(closed)
        if self.closed and abs(values[0] - values[-1]) > 1e-9 * max(1.0, np.max(np.abs(values))):
            raise DeformationError("closed path endpoints disagree")
        bc = "periodic" if self.closed else "not-a-knot"
        vals = values.copy()
        if self.closed:
            vals[-1] = vals[0]
        self._re = CubicSpline(tau, vals.real, bc_type=bc)
        self._im = CubicSpline(tau, vals.imag, bc_type=bc)
        self._dre = self._re.derivative()
        self._dim = self._im.derivative()

    @property
    def period(self) -> float:
        return float(self.tau[-1])

    def __call__(self, tau):
        return self._re(tau) + 1j * self._im(tau)

    def rate(self, tau):
        """dL_m/dtau from the spline."""
        return self._dre(tau) + 1j * self._dim(tau)

    def enclosed_area(self) -> float:
        """Signed area swept by the spline curve, 1/2 * loop (x dy - y dx).

        Integrated exactly per spline interval (degree-5 integrand, 3-point
        Gauss), so the only error is the spline's own interpolation error.
        """
        nodes, weights = np.polynomial.legendre.leggauss(3)
        a, b = self.tau[:-1], self.tau[1:]
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        pts = mid[:, None] + half[:, None] * nodes[None, :]
        x, y = self._re(pts), self._im(pts)
        dx, dy = self._dre(pts), self._dim(pts)
        integrand = 0.5 * (x * dy - y * dx)
        return float(np.sum(half[:, None] * integrand * weights[None, :]))


def circle_path(m: int, radius: float = 1.0, turns: float = 1.0,
                phase: float = 0.0, center: complex = 0.0,
                t_end: float = 1.0, samples: int = 2048) -> ModePath:
    """L_m(tau) = center + radius * exp(i(phase + 2 pi turns tau / T))."""
    tau = np.linspace(0.0, t_end, samples + 1)
    vals = center + radius * np.exp(1j * (phase + 2.0 * np.pi * turns * tau / t_end))
    closed = float(turns) == int(turns)
    return ModePath(tau, vals, closed=closed)


class DeformationPath:
    """Sampled boundary-deformation path: modes {m > 0 -> ModePath}, delta, epsilon.

    Amplitudes for -m are implied by conjugate symmetry.  Supplying both
    signs is allowed if they are conjugate at every sample; a mode 0 entry
    is rejected (area preservation demands L_0 = 0).
    """

    def __init__(self, modes: dict[int, ModePath], delta: float, epsilon: float):
        if delta < 0.0:
            raise DeformationError("delta must be >= 0")
        if epsilon <= 0.0:
            raise DeformationError("epsilon must be > 0")
        if 0 in modes:
            raise DeformationError("mode 0 amplitude must vanish (area preservation)")
        canonical: dict[int, ModePath] = {}
        for m, path in sorted(modes.items()):
            if m > 0:
                canonical[m] = path
        for m, path in modes.items():
            if m < 0:
                if -m in canonical:
                    ref = canonical[-m]
                    if (len(ref.tau) != len(path.tau)
                            or np.max(np.abs(path.values - np.conj(ref.values))) > 1e-12):
                        raise DeformationError(
                            f"modes +-{-m} are not conjugate-symmetric")
                else:
                    canonical[-m] = ModePath(path.tau, np.conj(path.values), path.closed)
        if not canonical:
            raise DeformationError("no active modes")
        periods = {p.period for p in canonical.values()}
        if len(periods) > 1:
            raise DeformationError("all mode paths must share the period T")
        self.modes = canonical
        self.delta = float(delta)
        self.epsilon = float(epsilon)
        self.period = periods.pop()
        self.closed = all(p.closed for p in canonical.values())

    def mode_numbers(self) -> list[int]:
        return sorted(self.modes)

    def amplitudes(self, tau) -> dict[int, complex]:
        """{m: L_m(tau)} over positive modes."""
        return {m: self.modes[m](tau) for m in self.mode_numbers()}

    def rates(self, tau) -> dict[int, complex]:
        return {m: self.modes[m].rate(tau) for m in self.mode_numbers()}


def boundary_radius(path: DeformationPath, tau: float, sigma) -> np.ndarray | float:
    """Boundary radius r(sigma) at slow time tau; real by conjugate symmetry."""
    if not (0.0 <= tau <= path.period + 1e-12):
        raise DeformationError(f"tau={tau} outside [0, {path.period}]")
    sigma = np.asarray(sigma, dtype=float)
    amps = path.amplitudes(tau)
    d = path.delta
    wave = np.zeros_like(sigma, dtype=complex)
    norm2 = 0.0
    for m, lam in amps.items():
        wave += lam * np.exp(1j * m * sigma)
        norm2 += abs(lam) ** 2
    r = 1.0 + d * 2.0 * wave.real - d * d * norm2
    return float(r) if np.ndim(sigma) == 0 else r


def loop_area(path: DeformationPath, m: int) -> LoopArea:
    """Signed area enclosed by the loop of L_m in the complex plane."""
    if not path.closed:
        raise DeformationError("loop area requires a closed path")
    mm = abs(int(m))
    if mm not in path.modes:
        raise DeformationError(f"mode {m} is not active")
    area = path.modes[mm].enclosed_area()
    if m < 0:
        area = -area
    return LoopArea(m=int(m), area=area)


def area_preservation_defect(path: DeformationPath, tau: float,
                             n_sigma: int = 4096) -> float:
    """|area enclosed by r(sigma) - pi|; O(delta^3) by construction."""
    sigma = np.linspace(0.0, 2.0 * np.pi, n_sigma, endpoint=False)
    r = boundary_radius(path, tau, sigma)
    area = 0.5 * np.mean(r * r) * 2.0 * np.pi
    return float(abs(area - np.pi))
