"""Chebyshev machinery on a log-radial grid.

All radial profiles in this package live on Chebyshev-Lobatto nodes in the
variable t = log r, mapped to [log(r_min), 0].  Power functions r^p, the
building blocks of every closed form handled here, become exponentials
e^{p t} in this variable: entire functions that a Chebyshev basis resolves
to machine precision whether or not p is an integer.  Plain Chebyshev-in-r
loses spectral accuracy at the r=0 endpoint for non-integer exponents.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as cheb


def lobatto_nodes(n: int) -> np.ndarray:
    """Chebyshev-Lobatto nodes on [-1, 1], ascending, n+1 points."""
    if n < 1:
        raise ValueError("need polynomial degree n >= 1")
    return -np.cos(np.pi * np.arange(n + 1) / n)


def differentiation_matrix(x: np.ndarray) -> np.ndarray:
    """Collocation derivative matrix for Lobatto nodes x (Trefethen form)."""
    n = len(x) - 1
    c = np.ones(n + 1)
    c[0] = c[n] = 2.0
    c = c * (-1.0) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T + np.eye(n + 1)
    D = np.outer(c, 1.0 / c) / dX
    D -= np.diag(D.sum(axis=1))
    return D


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Quadrature weights on [-1, 1] matching lobatto_nodes(n)."""
    if n == 1:
        return np.array([1.0, 1.0])
    theta = np.pi * np.arange(n + 1) / n
    w = np.zeros(n + 1)
    for j in range(n + 1):
        s = 1.0
        for m in range(1, n // 2 + 1):
            b = 1.0 if 2 * m == n else 2.0
            s -= b * np.cos(2 * m * theta[j]) / (4 * m * m - 1)
        w[j] = 2.0 * s / n
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def values_to_coefficients(f: np.ndarray) -> np.ndarray:
    """Chebyshev coefficients interpolating samples f on ascending Lobatto nodes."""
    f = np.asarray(f)
    n = f.shape[-1] - 1
    g = f[..., ::-1]                      # values at cos(pi*j/n), j = 0..n
    ext = np.concatenate([g, g[..., n - 1:0:-1]], axis=-1)
    coef = np.fft.fft(ext, axis=-1)[..., : n + 1] / n
    coef[..., 0] *= 0.5
    coef[..., n] *= 0.5
    if not np.iscomplexobj(f):
        coef = coef.real
    return coef


class LogRadialGrid:
    """Chebyshev-Lobatto grid in t = log r on [log r_min, 0].

    Nodes are stored ascending in r (r[0] = r_min, r[-1] = 1).  Provides
    spectral differentiation and quadrature in r and evaluation of grid
    samples at arbitrary radii.
    """

    def __init__(self, n: int = 128, r_min: float = 1e-3):
        if not (0.0 < r_min < 1.0):
            raise ValueError("r_min must lie in (0, 1)")
        self.n = int(n)
        self.r_min = float(r_min)
        self.t_min = float(np.log(self.r_min))
        self.x = lobatto_nodes(self.n)                   # ascending in r
        self.t = self.t_min * (1.0 - self.x) / 2.0
        self.r = np.exp(self.t)
        self.dx_dt = -2.0 / self.t_min
        self.Dt = differentiation_matrix(self.x) * self.dx_dt
        self.Dr = self.Dt / self.r[:, None]
        self._wx = clenshaw_curtis_weights(self.n)
        bw = np.ones(self.n + 1)
        bw[0] = bw[-1] = 0.5
        self._bary_w = bw * (-1.0) ** np.arange(self.n + 1)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LogRadialGrid)
            and other.n == self.n
            and other.r_min == self.r_min
        )

    def __hash__(self):
        return hash((self.n, self.r_min))

    def x_of_r(self, r: np.ndarray | float) -> np.ndarray:
        return 1.0 - 2.0 * np.log(np.asarray(r, dtype=float)) / self.t_min

    # ---- calculus on grid samples -------------------------------------------

    def d_dr(self, f: np.ndarray) -> np.ndarray:
        return self.Dr @ f

    def integrate_dr(self, f: np.ndarray):
        """Integral of f over [r_min, 1] (dr = r dt)."""
        jac = -self.t_min / 2.0
        return np.sum(self._wx * jac * self.r * f)

    def antiderivative_from_one(self, f: np.ndarray) -> np.ndarray:
        """F(r) = integral of f from r up to 1, on the grid, spectrally."""
        g = f * self.r * (-self.t_min / 2.0)
        anti = cheb.chebint(values_to_coefficients(g), lbnd=1.0)
        return -cheb.chebval(self.x, anti)

    def antiderivative_from_rmin(self, f: np.ndarray) -> np.ndarray:
        """F(r) = integral of f from r_min up to r, on the grid."""
        return self.integrate_dr(f) - self.antiderivative_from_one(f)

    def to_coefficients(self, f: np.ndarray) -> np.ndarray:
        return values_to_coefficients(f)

    def eval_samples(self, f: np.ndarray, r):
        """Barycentric evaluation of grid samples f at radii in [r_min, 1]."""
        scalar = np.ndim(r) == 0
        xe = np.atleast_1d(self.x_of_r(r))
        d = xe[:, None] - self.x[None, :]
        exact = np.abs(d) < 1e-14
        d = np.where(exact, 1.0, d)
        w = self._bary_w[None, :] / d
        out = (w @ f) / w.sum(axis=1)
        hit_rows, hit_cols = np.nonzero(exact)
        out[hit_rows] = f[hit_cols]
        return out[0] if scalar else out
