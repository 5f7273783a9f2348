"""Figure rendering for the report path (PNG files alongside the CSV output)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def render_fields(fields: dict, path: str | Path, title: str = "") -> Path:
    """Grey-scale vorticity with white streamfunction contours and boundary."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.2, 5.0))
    om = fields["omega"]
    finite = np.isfinite(om)
    vmin, vmax = np.percentile(om[finite], [2, 98])
    ax.pcolormesh(fields["x"], fields["y"], om, cmap="Greys_r",
                  vmin=vmin, vmax=vmax, shading="auto")
    psi = fields["psi"]
    levels = np.linspace(np.nanmin(psi), np.nanmax(psi), 12)[1:-1]
    ax.contour(fields["x"], fields["y"], psi, levels=levels,
               colors="white", linewidths=0.8)
    rb = fields["boundary_r"]
    sg = fields["boundary_sigma"]
    ax.plot(rb * np.cos(sg), rb * np.sin(sg), "k-", lw=1.0)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def render_angle_responses(r: np.ndarray, curves: dict[int, np.ndarray],
                           path: str | Path, title: str = "") -> Path:
    """Angle-response profiles f_m(r), one curve per mode."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5.6, 4.2))
    for m in sorted(curves):
        ax.plot(r, curves[m], label=f"m = {m}")
    ax.set_xlabel("r")
    ax.set_ylabel("f_m(r)")
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def render_trajectory(traj, path: str | Path, boundary: dict | None = None,
                      title: str = "") -> Path:
    path = Path(path)
    fig, axes = plt.subplots(1, 2, figsize=(9.4, 4.4))
    axes[0].plot(traj.x, traj.y, lw=0.4)
    if boundary is not None:
        rb, sg = boundary["boundary_r"], boundary["boundary_sigma"]
        axes[0].plot(rb * np.cos(sg), rb * np.sin(sg), "k-", lw=1.0)
    axes[0].set_aspect("equal")
    axes[0].set_xlabel("x")
    axes[0].set_ylabel("y")
    axes[1].plot(traj.tau, traj.I - traj.I[0], lw=0.8)
    axes[1].set_xlabel("slow time")
    axes[1].set_ylabel("action drift I - I(0)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path


def render_ellipse_check(summary: dict, path: str | Path) -> Path:
    """Bar comparison of the oracle and pipeline geometric angles."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(4.8, 3.8))
    labels = ["oracle (fixed frame)", "pipeline"]
    values = [summary["oracle_fixed_frame"], summary["pipeline"]]
    ax.bar(labels, values, color=["0.4", "0.7"])
    ax.set_ylabel("geometric angle (rad)")
    ax.set_title(f"delta = {summary['delta']}")
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
    return path
