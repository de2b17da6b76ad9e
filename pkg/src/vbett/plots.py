"""Static SVG figures from a results directory."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_results", "ellipse_outline"]

plt.rcParams["svg.hashsalt"] = "vbett"


def ellipse_outline(center, theta, axes, n: int = 100) -> np.ndarray:
    t = np.linspace(0.0, 2.0 * np.pi, n)
    c, s = np.cos(theta), np.sin(theta)
    u = np.stack([axes[0] * np.cos(t), axes[1] * np.sin(t)])
    R = np.array([[c, -s], [s, c]])
    return (R @ u).T + np.asarray(center)


def _frames(steps: int, requested) -> list[int]:
    if requested:
        return [f for f in requested if 0 <= f < steps]
    return sorted(set(np.linspace(0, steps - 1, min(steps, 8)).astype(int).tolist()))


def plot_results(results_dir: str | Path, run: int = 0) -> list[Path]:
    """Write ``trajectory.svg`` (one run, truth vs estimate with ellipses) and
    ``gw.svg`` (per-step GW distance averaged over runs)."""
    from .harness import read_runs_csv
    from .simulator import load_scenario

    d = Path(results_dir)
    cols = read_runs_csv(d / "runs.csv")
    spec = load_scenario(d / "scenario.json")
    meta = {"Date": None}

    sel = cols["run"] == run
    if not np.any(sel):
        run = int(cols["run"][0])
        sel = cols["run"] == run
    steps = int(sel.sum())

    fig, ax = plt.subplots(figsize=(7, 6))
    ax.plot(cols["truth_x"][sel], cols["truth_y"][sel], "k-", lw=1, label="truth")
    ax.plot(cols["est_x"][sel], cols["est_y"][sel], "g--", lw=1, label="estimate")
    for i, f in enumerate(_frames(steps, spec.plot_frames)):
        idx = np.flatnonzero(sel)[f]
        tr = ellipse_outline(
            (cols["truth_x"][idx], cols["truth_y"][idx]), cols["truth_theta"][idx],
            (cols["truth_ax1"][idx], cols["truth_ax2"][idx]),
        )
        es = ellipse_outline(
            (cols["est_x"][idx], cols["est_y"][idx]), cols["est_theta"][idx],
            (cols["est_ax1"][idx], cols["est_ax2"][idx]),
        )
        ax.plot(tr[:, 0], tr[:, 1], "k-", lw=0.8, label="true extent" if i == 0 else None)
        ax.plot(es[:, 0], es[:, 1], "g-", lw=1.2, label="estimated extent" if i == 0 else None)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel("x [m]")
    ax.set_ylabel("y [m]")
    ax.set_title(f"{spec.name}: run {run}")
    ax.legend(loc="best", fontsize=8)
    traj = d / "trajectory.svg"
    fig.savefig(traj, format="svg", metadata=meta)
    plt.close(fig)

    runs = np.unique(cols["run"])
    gw = np.stack([cols["gw"][cols["run"] == r] for r in runs])
    t = np.arange(gw.shape[1]) * spec.sample_time
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.plot(t, gw.mean(axis=0), "b-", lw=1.2, label=f"mean over {len(runs)} runs")
    if len(runs) > 1:
        lo, hi = np.percentile(gw, [10, 90], axis=0)
        ax.fill_between(t, lo, hi, color="b", alpha=0.15, label="10-90%")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("GW distance [m]")
    ax.set_yscale("log")
    ax.legend(loc="best", fontsize=8)
    gwp = d / "gw.svg"
    fig.tight_layout()
    fig.savefig(gwp, format="svg", metadata=meta)
    plt.close(fig)
    return [traj, gwp]
