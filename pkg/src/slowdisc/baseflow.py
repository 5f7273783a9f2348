"""Axisymmetric base states on the unit disc.

A base flow is defined by its streamfunction psi0(r).  The two supported
representations are the power law psi0 = A r^alpha (alpha in (0, 2]; the
uniform-vorticity limit alpha = 2 is admitted) and a tabulated profile
interpolated by a quintic B-spline.  Derived quantities: vorticity
omega0 = (r psi0')'/r, its derivative, the slopes F' = omega0'/psi0' and
G' = 1/F' of the vorticity-streamfunction relation, the action form
psi_hat(I) of the streamfunction and the rotation frequency
Omega(I) = d psi_hat / dI = psi0'(r)/r at r = sqrt(2 I).

Stability diagnostics:  H2 holds when psi0' does not vanish on (0, 1]
(bounded orbital periods); the energy-extremum condition H1 is the
sufficient pair "G' > 0 everywhere" or "G' < -1/c_poi everywhere",
equivalently F' > -c_poi.  H1 is advisory: it genuinely fails near the
origin for power laws with alpha < 2 even though all per-mode solves
remain well posed there, so solvers gate on H2 and on conditioning, not
on H1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import jn_zeros

# First Dirichlet eigenvalue of -Laplace on the unit disc: square of the
# first zero of J0.  Used as the Poincare constant of the disc.
C_POINCARE = float(jn_zeros(0, 1)[0] ** 2)

_PROBE_R = None


def _probe_radii() -> np.ndarray:
    global _PROBE_R
    if _PROBE_R is None:
        _PROBE_R = np.geomspace(1e-3, 1.0, 301)
    return _PROBE_R


@dataclass(frozen=True)
class ActionAngle:
    """Action-angle label of a point of the undeformed disc: I = r^2/2, theta = sigma."""

    I: float
    theta: float


def to_action_angle(x: float, y: float) -> ActionAngle:
    """Map a point of the closed unit disc to (I, theta) = (r^2/2, sigma)."""
    rsq = x * x + y * y
    if rsq > 1.0 + 1e-12:
        raise ValueError(f"point ({x}, {y}) lies outside the unit disc")
    theta = float(np.arctan2(y, x)) % (2.0 * np.pi) if rsq > 0.0 else 0.0
    return ActionAngle(I=0.5 * rsq, theta=theta)


def from_action_angle(aa: ActionAngle) -> tuple[float, float]:
    r = np.sqrt(2.0 * aa.I)
    return float(r * np.cos(aa.theta)), float(r * np.sin(aa.theta))


class BaseFlow:
    """Common interface; construct PowerLawFlow or TabulatedFlow."""

    kind = "abstract"

    # radial profile API ------------------------------------------------------
    def psi0(self, r):
        raise NotImplementedError

    def dpsi0(self, r):
        raise NotImplementedError

    def d2psi0(self, r):
        raise NotImplementedError

    def omega0(self, r):
        raise NotImplementedError

    def domega0(self, r):
        raise NotImplementedError

    def f_prime(self, r):
        """F' = omega0'/psi0', the vorticity slope against the streamfunction."""
        return self.domega0(r) / self.dpsi0(r)

    def g_prime(self, r):
        return self.dpsi0(r) / self.domega0(r)

    # action form --------------------------------------------------------------
    def psi_hat(self, I):
        return self.psi0(np.sqrt(2.0 * np.asarray(I, dtype=float)))

    def rotation_frequency(self, I):
        """Omega(I) = d psi_hat/dI; infinite at I=0 for alpha < 2 power laws."""
        I = np.asarray(I, dtype=float)
        r = np.sqrt(2.0 * I)
        with np.errstate(divide="ignore"):
            out = np.where(r > 0.0, self.dpsi0(np.where(r > 0, r, 1.0)) / np.where(r > 0, r, 1.0), self._omega_at_origin())
        return out if out.ndim else float(out)

    def _omega_at_origin(self) -> float:
        return np.inf

    # diagnostics ---------------------------------------------------------------
    def h2_ok(self) -> bool:
        """Bounded orbital period proxy: psi0' bounded away from 0 on (0,1]."""
        vals = self.dpsi0(_probe_radii())
        return bool(np.all(np.abs(vals) > 1e-12))

    def h1_ok(self) -> bool:
        """Energy-extremum sufficient condition: F' > -c_poi on the probe radii."""
        vals = self.f_prime(_probe_radii())
        return bool(np.all(vals > -C_POINCARE))

    def diagnostics(self) -> dict:
        return {
            "kind": self.kind,
            "h1_arnold": self.h1_ok(),
            "h2_period": self.h2_ok(),
            "c_poincare": C_POINCARE,
        }


@dataclass(frozen=True)
class PowerLawFlow(BaseFlow):
    """psi0(r) = A r^alpha with 0 < alpha <= 2; A > 0 rotates counterclockwise."""

    amplitude: float = 1.0
    alpha: float = 0.5
    kind = "power_law"

    def __post_init__(self):
        if not (0.0 < self.alpha <= 2.0):
            raise ValueError("alpha must lie in (0, 2]")
        if self.amplitude == 0.0:
            raise ValueError("amplitude must be nonzero")

    def psi0(self, r):
        return self.amplitude * np.asarray(r, dtype=float) ** self.alpha

    def dpsi0(self, r):
        return self.amplitude * self.alpha * np.asarray(r, dtype=float) ** (self.alpha - 1.0)

    def d2psi0(self, r):
        a = self.alpha
        return self.amplitude * a * (a - 1.0) * np.asarray(r, dtype=float) ** (a - 2.0)

    def omega0(self, r):
        """A alpha^2 r^(alpha-2); signed infinity at r = 0 when alpha < 2."""
        a = self.alpha
        r = np.asarray(r, dtype=float)
        if a == 2.0:
            return np.full_like(r, 4.0 * self.amplitude) if r.ndim else 4.0 * self.amplitude
        with np.errstate(divide="ignore"):
            out = np.where(r > 0.0, self.amplitude * a * a * np.where(r > 0, r, 1.0) ** (a - 2.0), np.sign(self.amplitude) * np.inf)
        return out if out.ndim else float(out)

    def domega0(self, r):
        a = self.alpha
        return self.amplitude * a * a * (a - 2.0) * np.asarray(r, dtype=float) ** (a - 3.0)

    def f_prime(self, r):
        a = self.alpha
        return a * (a - 2.0) / np.asarray(r, dtype=float) ** 2

    def psi_hat(self, I):
        return self.amplitude * (2.0 * np.asarray(I, dtype=float)) ** (self.alpha / 2.0)

    def rotation_frequency(self, I):
        a = self.alpha
        I = np.asarray(I, dtype=float)
        if a == 2.0:
            out = np.full_like(I, 2.0 * self.amplitude)
            return out if out.ndim else float(out)
        with np.errstate(divide="ignore"):
            out = np.where(I > 0.0, self.amplitude * a * (2.0 * np.where(I > 0, I, 1.0)) ** (a / 2.0 - 1.0), np.inf)
        return out if out.ndim else float(out)

    def _omega_at_origin(self) -> float:
        return 2.0 * self.amplitude if self.alpha == 2.0 else np.inf


class TabulatedFlow(BaseFlow):
    """Base flow from samples (r_i, psi0_i).

    Interpolation runs in t = log r with a quintic B-spline (r = 0 samples
    are dropped).  In t every power law is a pure exponential, so derivative
    recovery stays uniformly accurate down to the solver floor; splines in r
    cannot deliver omega0' (which needs psi0''') near an algebraic
    singularity.  Radii below the first positive table node use the spline's
    natural extrapolation; solves weight that region negligibly.
    """

    kind = "tabulated"

    def __init__(self, r: np.ndarray, psi0: np.ndarray):
        r = np.asarray(r, dtype=float)
        psi0 = np.asarray(psi0, dtype=float)
        if r.ndim != 1 or r.shape != psi0.shape or len(r) < 8:
            raise ValueError("need matching 1-d arrays with at least 8 samples")
        if np.any(r < 0.0) or r.max() < 1.0 - 1e-12:
            raise ValueError("table radii must lie in [0, 1] and reach r = 1")
        keep = r > 0.0
        order = np.argsort(r[keep])
        t = np.log(r[keep][order])
        self._t_lo = t[0]
        self._spl = make_interp_spline(t, psi0[keep][order], k=5)
        self._s1 = self._spl.derivative(1)
        self._s2 = self._spl.derivative(2)
        self._s3 = self._spl.derivative(3)
        if not self.h2_ok():
            raise ValueError("tabulated psi0 has a critical point in (0, 1]; H2 fails")

    def _t(self, r):
        return np.log(np.asarray(r, dtype=float))

    def psi0(self, r):
        return self._spl(self._t(r))

    def dpsi0(self, r):
        r = np.asarray(r, dtype=float)
        return self._s1(self._t(r)) / r

    def d2psi0(self, r):
        r = np.asarray(r, dtype=float)
        t = self._t(r)
        return (self._s2(t) - self._s1(t)) / r**2

    def omega0(self, r):
        r = np.asarray(r, dtype=float)
        return self._s2(self._t(r)) / r**2

    def domega0(self, r):
        r = np.asarray(r, dtype=float)
        t = self._t(r)
        return (self._s3(t) - 2.0 * self._s2(t)) / r**3

    def local_exponent(self) -> float:
        """Estimate of the power-law exponent of psi0 near the origin."""
        rs = np.exp(self._t_lo + np.array([0.5, 1.0, 1.5, 2.0]))
        slopes = np.diff(np.log(np.abs(self.dpsi0(rs)))) / np.diff(np.log(rs))
        return 1.0 + float(np.mean(slopes))


def sample_power_law(flow: PowerLawFlow, n: int = 400, r_lo: float = 1e-7) -> TabulatedFlow:
    """Tabulate a power law on a log-uniform radial grid on [r_lo, 1]."""
    r = np.geomspace(r_lo, 1.0, n)
    return TabulatedFlow(r, flow.amplitude * r**flow.alpha)
