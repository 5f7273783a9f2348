"""Second-order radial boundary-value solver on (0, 1].

Solves L[u] = a(r) u'' + b(r) u' + c(r) u = rhs with a Dirichlet value at
r = 1 and regularity at the r = 0 singular end.  Discretization: Chebyshev
collocation in t = log r on [log r_min, 0] with the recombined basis

    u(r) = r^s * sum_k  c_k T_k(x(t)),

where s is the selected indicial exponent.  The basis contains only the
admissible Frobenius branch; the inadmissible branch r^{s-} corresponds to
e^{(s- - s) t}, which explodes toward the truncation floor and cannot be
represented.  When the exponent gap is an integer (the m = 1 resonance or
an m = 0 double root with a log branch) representation alone does not
exclude it, so the collocation row at the innermost node is replaced by a
regularity row dv/dt = 0 there; for admissible solutions that row is
satisfied up to O(r_min^q), q > 0, while it suppresses the bad branch with
an O(e^{-gap |t_min|}) contamination.

Rows are max-abs equilibrated before solving; condition numbers are
reported for the equilibrated matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import chebyshev as cheb

from .baseflow import C_POINCARE, BaseFlow, PowerLawFlow
from .chebgrid import LogRadialGrid

CONDITION_LIMIT = 1e12


class RadialSolveError(RuntimeError):
    """Raised when a discretized radial solve is numerically near-singular."""


@dataclass(frozen=True)
class RadialOperator:
    """L[u] = a u'' + b u' + c u on (0, 1] with a regular singular point at 0."""

    a: Callable[[np.ndarray], np.ndarray]
    b: Callable[[np.ndarray], np.ndarray]
    c: Callable[[np.ndarray], np.ndarray]
    m: int
    indicial: tuple[float, float]           # sorted descending
    label: str = "radial operator"
    alpha: float | None = None              # power-law exponent, for messages
    f_prime: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, u_fn, r: np.ndarray) -> np.ndarray:
        """Apply L to a callable u_fn(r, deriv) at radii r."""
        r = np.asarray(r, dtype=float)
        return (
            self.a(r) * u_fn(r, 2) + self.b(r) * u_fn(r, 1) + self.c(r) * u_fn(r, 0)
        )


def mode_exponents(alpha: float, m: int) -> tuple[float, float, float]:
    """(alpha_m, beta_m, gamma_m) for the power-law family; needs |m| >= 2.

    alpha_m = sqrt(m^2 + alpha^2 - 2 alpha), beta_m = alpha_m - alpha + 2,
    gamma_m = alpha / (alpha_m + beta_m).  For m = 1 and alpha < 1 the
    translation branch takes over and these formulas do not apply.
    """
    m = abs(int(m))
    if m < 2:
        raise ValueError("closed-form exponents are defined for |m| >= 2")
    disc = m * m + alpha * alpha - 2.0 * alpha
    if disc < 0.0:
        raise ValueError("complex indicial roots: outside admitted parameters")
    alpha_m = float(np.sqrt(disc))
    beta_m = alpha_m - alpha + 2.0
    gamma_m = alpha / (alpha_m + beta_m)
    return alpha_m, beta_m, gamma_m


def _local_alpha(flow: BaseFlow) -> float:
    if isinstance(flow, PowerLawFlow):
        return flow.alpha
    est = flow.local_exponent()
    return float(np.clip(est, 1e-3, 2.0))


def generator_operator(flow: BaseFlow, m: int) -> RadialOperator:
    """Operator of the first-order map-generator equation (also drives rho2).

    psi0' (u'' - u'/r + (2 - m^2) u / r^2) + 2 psi0'' (u' - u/r) = rhs.
    """
    m = int(m)
    al = _local_alpha(flow)
    disc = m * m + al * al - 2.0 * al
    root = np.sqrt(max(disc, 0.0))
    upper, lower = (2.0 - al) + root, (2.0 - al) - root
    return RadialOperator(
        a=lambda r: flow.dpsi0(r),
        b=lambda r: 2.0 * flow.d2psi0(r) - flow.dpsi0(r) / r,
        c=lambda r: (2.0 - m * m) * flow.dpsi0(r) / r**2 - 2.0 * flow.d2psi0(r) / r,
        m=m,
        indicial=(float(upper), float(lower)),
        label=f"generator m={m}",
        alpha=al,
    )


def first_order_operator(flow: BaseFlow, m: int,
                         f_prime_override: Callable | float | None = None) -> RadialOperator:
    """Operator of the first-order Eulerian-correction equation (mode m).

    psi0' [ (1/r)(r u')' - m^2 u / r^2 ] - omega0' u = rhs.  Written with
    the psi0' factor kept in place so no division by psi0' occurs near the
    axis.  An explicit F' profile may be substituted for coercivity probes;
    it is then also attached for conditioning_report.
    """
    m = int(m)
    al = _local_alpha(flow)
    disc = m * m + al * al - 2.0 * al
    root = float(np.sqrt(max(disc, 0.0)))

    if f_prime_override is None:
        c_fn = lambda r: -m * m * flow.dpsi0(r) / r**2 - flow.domega0(r)
        fp = None
    else:
        fp_fn = (f_prime_override if callable(f_prime_override)
                 else (lambda r, v=float(f_prime_override): np.full_like(np.asarray(r, float), v)))
        c_fn = lambda r: -m * m * flow.dpsi0(r) / r**2 - fp_fn(r) * flow.dpsi0(r)
        fp = fp_fn
    return RadialOperator(
        a=lambda r: flow.dpsi0(r),
        b=lambda r: flow.dpsi0(r) / r,
        c=c_fn,
        m=m,
        indicial=(root, -root),
        label=f"first-order correction m={m}",
        alpha=al,
        f_prime=fp,
    )


def mode_laplacian(m: int) -> RadialOperator:
    """(1/r)(r u')' - m^2 u / r^2."""
    m = int(m)
    return RadialOperator(
        a=lambda r: np.ones_like(r),
        b=lambda r: 1.0 / r,
        c=lambda r: -m * m / r**2 if m else np.zeros_like(r),
        m=m,
        indicial=(float(abs(m)), -float(abs(m))),
        label=f"mode laplacian m={m}",
    )


def indicial_exponents(op: RadialOperator) -> tuple[float, float]:
    """The two Frobenius exponents at r = 0, sorted descending."""
    return op.indicial


@dataclass
class RadialSolution:
    """Solution of a radial BVP: u(r) = r^s * Chebyshev series in x(log r)."""

    grid: LogRadialGrid
    exponent: float
    coefficients: np.ndarray
    boundary_value: complex
    residual: float
    condition_number: float
    values: np.ndarray = field(init=False)

    def __post_init__(self):
        self._dcoef = {0: self.coefficients}
        self.values = self(self.grid.r)

    def _coef(self, k: int) -> np.ndarray:
        if k not in self._dcoef:
            self._dcoef[k] = cheb.chebder(self._coef(k - 1))
        return self._dcoef[k]

    def __call__(self, r, deriv: int = 0):
        """Evaluate u or a radial derivative (order <= 3) at radii in (0, 1]."""
        if not 0 <= deriv <= 3:
            raise ValueError("deriv must be in 0..3")
        r = np.asarray(r, dtype=float)
        g, s = self.grid, self.exponent
        x = g.x_of_r(r)
        # u^{(k)} = r^{s-k} sum_j w_{kj} d^j v/dt^j with w from the
        # recurrence w_{k+1,j} = (s-k) w_{kj} + w_{k,j-1}
        w = np.zeros(deriv + 1)
        w[0] = 1.0
        for k in range(deriv):
            nxt = np.zeros_like(w)
            nxt += (s - k) * w
            nxt[1:] += w[:-1]
            w = nxt
        acc = 0.0
        for j in range(deriv + 1):
            vj = cheb.chebval(x, self._coef(j)) * g.dx_dt**j
            acc = acc + w[j] * vj
        return r ** (s - deriv) * acc


def _basis_tables(grid: LogRadialGrid):
    n = grid.n
    eye = np.eye(n + 1)
    V0 = cheb.chebvander(grid.x, n)
    V1 = cheb.chebval(grid.x, cheb.chebder(eye, 1)).T
    V2 = cheb.chebval(grid.x, cheb.chebder(eye, 2)).T
    return V0, V1, V2


def _assemble(op: RadialOperator, grid: LogRadialGrid, s: float):
    """Collocation matrix rows of L acting on the recombined basis."""
    V0, V1, V2 = _basis_tables(grid)
    dx = grid.dx_dt
    r, t = grid.r, grid.t
    av = np.asarray(op.a(r), dtype=complex)
    bv = np.asarray(op.b(r), dtype=complex)
    cv = np.asarray(op.c(r), dtype=complex)
    es = np.exp(s * t)
    w2 = es * av * np.exp(-2.0 * t)
    w1 = es * bv * np.exp(-t)
    M = (
        w2[:, None] * (V2 * dx * dx + (2.0 * s - 1.0) * V1 * dx + s * (s - 1.0) * V0)
        + w1[:, None] * (V1 * dx + s * V0)
        + (es * cv)[:, None] * V0
    )
    return M, V0, V1


def solve(op: RadialOperator, rhs, bc1: complex,
          n: int = 64, r_min: float = 1e-6,
          exponent: float | None = None) -> RadialSolution:
    """Solve L[u] = rhs, u(1) = bc1, u regular at the origin.

    rhs may be a callable of r, an array on the solver nodes, or 0.
    The regularity branch defaults to the operator's upper indicial
    exponent; pass `exponent` to override.
    """
    grid = LogRadialGrid(n=n, r_min=r_min)
    s = float(op.indicial[0] if exponent is None else exponent)
    M, V0, V1 = _assemble(op, grid, s)

    if callable(rhs):
        fvec = np.asarray(rhs(grid.r), dtype=complex)
    elif np.ndim(rhs) == 0:
        fvec = np.full(grid.n + 1, complex(rhs))
    else:
        fvec = np.asarray(rhs, dtype=complex)
        if fvec.shape != grid.r.shape:
            raise ValueError("rhs samples must match the solver grid")

    A = M.copy()
    rhs_vec = fvec.copy()
    # innermost row: regularity (kills integer-gap inadmissible branches)
    A[0, :] = V1[0, :]
    rhs_vec[0] = 0.0
    # outermost row: Dirichlet value at r = 1
    A[-1, :] = V0[-1, :]
    rhs_vec[-1] = complex(bc1)

    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0.0] = 1.0
    A_eq = A / scale[:, None]
    rhs_eq = rhs_vec / scale

    cond = float(np.linalg.cond(A_eq))
    if cond > CONDITION_LIMIT:
        raise RadialSolveError(
            f"near-singular discretization for {op.label} "
            f"(mode m={op.m}, alpha={op.alpha}): cond={cond:.3e}"
        )
    coef = np.linalg.solve(A_eq, rhs_eq)

    interior = slice(1, grid.n)
    resid_raw = M[interior] @ coef - fvec[interior]
    resid = float(np.max(np.abs(resid_raw) / scale[interior]))
    sol = RadialSolution(
        grid=grid,
        exponent=s,
        coefficients=coef,
        boundary_value=complex(bc1),
        residual=resid,
        condition_number=cond,
    )
    return sol


def conditioning_report(op: RadialOperator, n: int = 32, r_min: float = 1e-6) -> dict:
    """Deterministic well-posedness report for a radial operator.

    Reports the equilibrated condition number and smallest singular value of
    the discretized operator, and, when the operator carries an explicit F'
    profile, the margin of the coercivity criterion F' > -c_poi.  The flag
    is raised on either a near-singular discretization or a violated
    coercivity guarantee.
    """
    grid = LogRadialGrid(n=n, r_min=r_min)
    s = float(op.indicial[0])
    M, V0, V1 = _assemble(op, grid, s)
    A = M.copy()
    A[0, :] = V1[0, :]
    A[-1, :] = V0[-1, :]
    scale = np.max(np.abs(A), axis=1)
    scale[scale == 0.0] = 1.0
    A_eq = A / scale[:, None]
    sv = np.linalg.svd(A_eq, compute_uv=False)
    cond = float(sv[0] / sv[-1])
    report = {
        "label": op.label,
        "mode": op.m,
        "alpha": op.alpha,
        "n": n,
        "condition_number": cond,
        "smallest_singular_value": float(sv[-1]),
        "coercivity_margin": None,
        "coercive": None,
    }
    if op.f_prime is not None:
        probe = np.geomspace(max(r_min, 1e-3), 1.0, 201)
        margin = float(np.min(op.f_prime(probe)) + C_POINCARE)
        report["coercivity_margin"] = margin
        report["coercive"] = margin > 0.0
    report["flagged"] = cond > CONDITION_LIMIT or report["coercive"] is False
    return report
