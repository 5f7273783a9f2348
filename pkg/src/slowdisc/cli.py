"""Command-line driver: deterministic tables, figures, verification.

Subcommands
  modes         per-mode exponent/constant table (alpha_m, beta_m, gamma_m, p_m, q_m)
  first-order   generator and first-order correction profiles
  second-order  chi2, rho2 and averaged second-order profiles
  geo-angle     angle-response tables and the predicted loop angle
  fields        leading-order vorticity/streamfunction on a Cartesian grid
  advect        particle trajectory with action-angle extraction and phase split
  ellipse-check exact rotating-ellipse oracle against the pipeline
  verify        full verification suite with machine-readable results

Outputs are CSV (profiles, trajectories) and JSON (scalar summaries) with
metadata headers; repeated runs of the same config and version are
byte-identical.  Report-style subcommands also render a PNG next to the
delimited output unless --no-plot is given.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

_THREADS = 1


def _pmap(fn, items):
    """Map over independent work items, threaded when --threads > 1."""
    items = list(items)
    if _THREADS <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=_THREADS) as pool:
        return list(pool.map(fn, items))

from . import __version__
from .acceptance import run_all
from .baseflow import PowerLawFlow
from .chebgrid import LogRadialGrid
from .config import ConfigError, RunConfig, config_hash
from .deformation import DeformationPath, boundary_radius, circle_path, loop_area
from .ellipse import (RotatingEllipse, ellipse_axes_for_amplitude,
                      exact_geometric_angle, frame_bridge, vorticity_matched_K)
from .geometry import f_m_closed_form, f_m_numeric, geometric_angle
from .lagrangian import (HamiltonianField, action_drift, advect, phase_split,
                         reconstruct_fields, suggested_dt)
from .perturbation import PerturbationSolution
from .radialbvp import RadialSolveError, conditioning_report, mode_exponents
from .report import write_csv, write_json


def _meta(cfg: RunConfig, quantity: str, seed: int | None = None) -> dict:
    meta = {"config-sha256": config_hash(cfg.raw), "quantity": quantity}
    if seed is not None:
        meta["seed"] = seed
    return meta


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _solution(cfg: RunConfig, flow, modes=None) -> PerturbationSolution:
    grid = LogRadialGrid(n=int(cfg.numerics["n_field"]),
                         r_min=float(cfg.numerics["r_core"]))
    return PerturbationSolution.compute(
        flow, modes or cfg.mode_numbers(), grid=grid,
        n=int(cfg.numerics["n_radial"]), r_min=float(cfg.numerics["r_min"]))


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_modes(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    if not isinstance(flow, PowerLawFlow):
        print("modes: closed-form constants need a power-law base flow",
              file=sys.stderr)
        return 2
    modes = cfg.mode_numbers() or [2, 3, 4, 5, 6]
    rows = {"m": [], "alpha_m": [], "beta_m": [], "gamma_m": [],
            "p_m": [], "q_m": []}
    for m in modes:
        if m < 2:
            continue
        resp = f_m_closed_form(flow, m, np.array([1.0]))
        rows["m"].append(m)
        rows["alpha_m"].append(resp.alpha_m)
        rows["beta_m"].append(resp.beta_m)
        rows["gamma_m"].append(resp.gamma_m)
        rows["p_m"].append(resp.p_m)
        rows["q_m"].append(resp.q_m)
    out = _out_dir(args)
    if args.format == "json":
        write_json(out / "modes.json", _meta(cfg, "mode exponent table"),
                   {k: v for k, v in rows.items()})
        print(out / "modes.json")
    else:
        write_csv(out / "modes.csv", _meta(cfg, "mode exponent table"), rows)
        print(out / "modes.csv")
    return 0


def cmd_first_order(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    sol = _solution(cfg, flow)
    grid = sol.grid
    out = _out_dir(args)
    cols = {"r": grid.r}
    for m in sol.modes:
        cols[f"rho1_m{m}_re"] = np.real(sol.rho1(m, grid.r))
        cols[f"rho1_m{m}_im"] = np.imag(sol.rho1(m, grid.r))
        cols[f"psi1_m{m}_re"] = np.real(sol.psi1bar_1(m, grid.r))
        cols[f"psi1_m{m}_im"] = np.imag(sol.psi1bar_1(m, grid.r))
    path = write_csv(out / "first_order.csv",
                     _meta(cfg, "first-order generator and correction profiles"),
                     cols)
    print(path)
    summary = {}
    if isinstance(flow, PowerLawFlow):
        for m in sol.modes:
            if m >= 2:
                am, bm, gm = mode_exponents(flow.alpha, m)
                summary[f"m{m}"] = {"alpha_m": am, "beta_m": bm, "gamma_m": gm}
    write_json(out / "first_order_summary.json",
               _meta(cfg, "first-order exponent summary"), summary)
    return 0


def cmd_second_order(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    sol = _solution(cfg, flow)
    grid = sol.grid
    path_obj = cfg.build_path()
    amps = path_obj.amplitudes(float(cfg.run["tau"]))
    rho2 = sol.rho2_snapshot(amps, n=int(cfg.numerics["n_radial"]))
    out = _out_dir(args)
    cols = {"r": grid.r}
    for m in sol.modes:
        cols[f"chi2_m{m}"] = sol.chi2.profiles[m]
        h = sol.psi1bar_2.profiles[m]
        cols[f"psi2avg_m{m}_re"] = np.real(h)
        cols[f"psi2avg_m{m}_im"] = np.imag(h)
    for p in sorted(mm for mm in rho2.mode_numbers() if mm > 0):
        cols[f"rho2_m{p}_re"] = np.real(rho2.profile(p))
        cols[f"rho2_m{p}_im"] = np.imag(rho2.profile(p))
    path = write_csv(out / "second_order.csv",
                     _meta(cfg, "second-order profiles at run.tau"), cols)
    print(path)
    return 0


def cmd_geo_angle(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    dpath = cfg.build_path()
    r = np.linspace(float(cfg.numerics["r_core"]), 1.0, 512)
    solution = None
    if not isinstance(flow, PowerLawFlow):
        solution = _solution(cfg, flow)
    res = geometric_angle(flow, dpath, r=r, solution=solution)
    out = _out_dir(args)
    cols = {"r": r, "delta_theta_geo": res.total}
    curves = {}
    for m, resp in res.per_mode.items():
        cols[f"f_m{m}"] = resp.f
        curves[m] = resp.f
    path = write_csv(out / "geo_angle.csv",
                     _meta(cfg, "angle responses and predicted loop angle"), cols)
    summary = {
        "delta": dpath.delta,
        "provenance": res.provenance,
        "modes": {
            str(m): {
                "holonomy_area": res.areas[m],
                "oriented_loop_area": -res.areas[m],
                "alpha_m": res.per_mode[m].alpha_m,
                "beta_m": res.per_mode[m].beta_m,
                "gamma_m": res.per_mode[m].gamma_m,
                "p_m": res.per_mode[m].p_m,
                "q_m": res.per_mode[m].q_m,
                "contribution_at_r0": float(
                    dpath.delta**2 * res.areas[m]
                    * np.interp(float(cfg.run["r0"]), r, res.per_mode[m].f)),
            } for m in res.per_mode
        },
        "predicted_at_r0": res.at(float(cfg.run["r0"])),
    }
    write_json(out / "geo_angle_summary.json",
               _meta(cfg, "geometric-angle summary"), summary)
    print(path)
    if not args.no_plot:
        from .plots import render_angle_responses
        print(render_angle_responses(r, curves, out / "geo_angle.png",
                                     title="angle responses"))
    return 0


def cmd_fields(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    out = _out_dir(args)
    tau = float(cfg.run["tau"])
    if cfg.deformation.get("modes"):
        dpath = cfg.build_path()
        sol = _solution(cfg, flow)
    else:
        dpath = DeformationPath({2: circle_path(2)}, delta=0.0,
                                epsilon=float(cfg.deformation.get("epsilon", 1.0))
                                if cfg.deformation else 1.0)
        sol = _solution(cfg, flow, modes=[2])
    fields = reconstruct_fields(flow, dpath, sol, tau,
                                n_grid=int(cfg.run["n_grid"]))
    flat = fields["inside"].ravel()
    cols = {
        "x": fields["x"].ravel(),
        "y": fields["y"].ravel(),
        "omega": fields["omega"].ravel(),
        "psi": fields["psi"].ravel(),
        "inside": flat.astype(int),
    }
    path = write_csv(out / "fields.csv",
                     _meta(cfg, "leading-order vorticity and streamfunction"),
                     cols)
    print(path)
    if not args.no_plot:
        from .plots import render_fields
        print(render_fields(fields, out / "fields.png",
                            title=f"tau = {tau}"))
    return 0


def cmd_advect(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    dpath = cfg.build_path()
    sol = _solution(cfg, flow)
    order = int(cfg.run["order"])
    hf = HamiltonianField(flow, dpath, sol, order=order)
    r0 = float(cfg.run["r0"])
    sigma0 = float(cfg.run["sigma0"])
    x0, y0 = hf.push_forward(r0 * np.cos(sigma0), r0 * np.sin(sigma0), 0.0)
    t_end = cfg.run["t_end"]
    t_end = float(t_end) if t_end else dpath.period / dpath.epsilon
    dt = cfg.numerics["dt"]
    dt = float(dt) if dt else suggested_dt(flow, 0.5 * r0 * r0, resolution=128)
    traj = advect(hf, x0, y0, t_end, dt, save_every=4)
    out = _out_dir(args)
    path = write_csv(out / "trajectory.csv",
                     _meta(cfg, "particle trajectory with action-angle shadow"),
                     {"t": traj.t, "tau": traj.tau, "x": traj.x, "y": traj.y,
                      "I": traj.I, "theta_unwrapped": traj.theta_unwrapped,
                      "H": traj.H})
    print(path)
    summary = {"order": order, "dt": dt, "t_end": t_end,
               "action_drift": action_drift(traj).max_drift}
    if dpath.closed and abs(traj.tau[-1] - dpath.period) < 1e-9 * dpath.period:
        split = phase_split(hf, traj)
        summary["phase_split"] = {
            "total": split.total, "dynamic": split.dynamic,
            "geometric_measured": split.geometric_measured,
        }
    write_json(out / "trajectory_summary.json",
               _meta(cfg, "trajectory summary"), summary)
    if not args.no_plot:
        from .plots import render_trajectory
        fields = reconstruct_fields(flow, dpath, sol, 0.0, n_grid=41)
        print(render_trajectory(traj, out / "trajectory.png", boundary=fields))
    return 0


def cmd_ellipse_check(cfg: RunConfig, args) -> int:
    de = cfg.deformation
    delta = float(de.get("delta", 0.05))
    a, b = ellipse_axes_for_amplitude(delta)
    amp = float(cfg.base_flow.get("amplitude", 1.0))
    oracle = RotatingEllipse.uniform_rotation(
        a, b, K=vorticity_matched_K(amp, a, b),
        epsilon=float(de.get("epsilon", 0.01)), total_angle=2.0 * np.pi)
    rot = exact_geometric_angle(oracle, 2.0 * np.pi)
    fixed = rot - frame_bridge(2.0 * np.pi)
    pipeline = 16.0 * np.pi * delta**2
    summary = {
        "delta": delta,
        "semi_axes": {"a": a, "b": b},
        "K": oracle.K,
        "oracle_rotating_frame": rot,
        "frame_bridge": frame_bridge(2.0 * np.pi),
        "oracle_fixed_frame": fixed,
        "pipeline": pipeline,
        "difference": fixed - pipeline,
        "difference_delta3_units": (fixed - pipeline) / delta**3,
    }
    out = _out_dir(args)
    path = write_json(out / "ellipse_check.json",
                      _meta(cfg, "rotating-ellipse oracle comparison"), summary)
    print(path)
    if not args.no_plot:
        from .plots import render_ellipse_check
        print(render_ellipse_check(summary, out / "ellipse_check.png"))
    return 0


def cmd_verify(cfg: RunConfig, args) -> int:
    results = run_all()
    out = _out_dir(args)
    rows = {
        "criterion": [r.name for r in results],
        "passed": [int(r.passed) for r in results],
        "value": [r.value for r in results],
        "tolerance": [r.tolerance for r in results],
    }
    write_csv(out / "verify.csv", _meta(cfg, "verification suite results"), rows)
    write_json(out / "verify.json", _meta(cfg, "verification suite results"),
               [{"name": r.name, "passed": r.passed, "value": r.value,
                 "tolerance": r.tolerance, "detail": r.detail} for r in results])
    for r in results:
        print(r.line())
    n_fail = sum(not r.passed for r in results)
    print(f"{len(results) - n_fail}/{len(results)} criteria passed "
          f"(results in {out / 'verify.json'})")
    return 1 if n_fail else 0


def cmd_conditioning(cfg: RunConfig, args) -> int:
    flow = cfg.build_flow()
    from .radialbvp import first_order_operator, generator_operator
    ops = []
    for m in cfg.mode_numbers() or [2, 3, 4]:
        if m >= 2:
            ops.append(generator_operator(flow, m))
        ops.append(first_order_operator(flow, m))
    reports = _pmap(conditioning_report, ops)
    out = _out_dir(args)
    path = write_json(out / "conditioning.json",
                      _meta(cfg, "operator conditioning reports"), reports)
    print(path)
    return 0


# ----------------------------------------------------------------------------

_COMMANDS = {
    "modes": cmd_modes,
    "first-order": cmd_first_order,
    "second-order": cmd_second_order,
    "geo-angle": cmd_geo_angle,
    "fields": cmd_fields,
    "advect": cmd_advect,
    "ellipse-check": cmd_ellipse_check,
    "verify": cmd_verify,
    "conditioning": cmd_conditioning,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slowdisc",
        description="Steady flows and geometric particle angles in a slowly deforming disc")
    parser.add_argument("--version", action="version",
                        version=f"slowdisc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=(name not in ("verify",)),
                       help="YAML configuration file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for independent mode solves")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved for ensemble initial-condition sampling")
        p.add_argument("--no-plot", action="store_true",
                       help="skip figure rendering")
    return parser


def main(argv: list[str] | None = None) -> int:
    global _THREADS
    args = build_parser().parse_args(argv)
    _THREADS = max(1, int(args.threads))
    try:
        if args.config:
            cfg = RunConfig.load(args.config)
        else:
            cfg = RunConfig.from_dict({})
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg, args)
    except (ConfigError, RadialSolveError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
