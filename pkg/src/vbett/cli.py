"""Command-line entry point.

    vbett run <scenario> [--seed N] [--runs N] [--out DIR] [--workers N]
    vbett oracle <scenario> --samples N [--seed N] [--out DIR] [--min-ess E] [--rao-blackwell] [--trace]
    vbett plot <results-dir>
    vbett presets [--write DIR]

``<scenario>`` is a JSON scenario file or the name of a shipped preset.
Exit status: 0 on success, 2 on configuration errors, 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, VbettError

log = logging.getLogger("vbett")


def _load(arg: str):
    from .presets import PRESETS, get_preset
    from .simulator import load_scenario

    if Path(arg).exists():
        return load_scenario(arg)
    if arg in PRESETS:
        return get_preset(arg)
    raise ConfigError(f"{arg!r} is neither a scenario file nor a preset ({', '.join(sorted(PRESETS))})")


def cmd_run(args) -> int:
    from .harness import emit_report, run_campaign

    spec = _load(args.scenario)
    if args.runs is not None and args.runs < 1:
        raise ConfigError("--runs must be >= 1")
    report = run_campaign(spec, runs=args.runs, seed=args.seed, workers=args.workers, wrap_heading=not args.no_wrap)
    out = Path(args.out or f"results/{report.spec.name}")
    for p in emit_report(report, out, plots=not args.no_plots):
        print(p)
    agg = report.aggregate()
    for k, v in agg.items():
        print(f"{k:>18}: {v['mean']:.4g} +/- {v['std']:.3g}")
    return 0


def cmd_oracle(args) -> int:
    from .core import estimated_extent_matrix
    from .measurement_update import measurement_update
    from .metrics import gw_distance
    from .oracle import oracle_posterior, oracle_posterior_min_ess, oracle_summary, write_cloud_csv
    from .rotation import rotation
    from .simulator import generate_measurements, run_streams, simulate_trajectory

    spec = _load(args.scenario)
    seed = spec.seed if args.seed is None else args.seed
    traj_rng, meas_rng = run_streams(seed, 0)
    truth = simulate_trajectory(spec.with_(steps=1), traj_rng)[0]
    batch = generate_measurements(truth, spec, meas_rng)
    trace = []
    post = measurement_update(spec.prior, batch, spec.model, trace=trace.append)
    if args.min_ess > 0:
        cloud = oracle_posterior_min_ess(
            spec.prior, batch, spec.model, args.samples, seed, args.min_ess, marginalize_kinematics=args.rao_blackwell
        )
    else:
        cloud = oracle_posterior(
            spec.prior, batch, spec.model, args.samples, np.random.default_rng([seed, 0]), args.rao_blackwell
        )
    summ = oracle_summary(cloud)
    T = rotation(summ.theta)
    X_or = (T * summ.sigma) @ T.T
    m_or = summ.kinematics[: spec.model.n_y]

    def gw_to_oracle(b):
        return gw_distance(b.position, estimated_extent_matrix(b), m_or, X_or).distance

    out = Path(args.out or f"results/{spec.name}-oracle")
    out.mkdir(parents=True, exist_ok=True)
    write_cloud_csv(cloud, out / "oracle_samples.csv")
    with open(out / "measurements.csv", "w") as fh:
        fh.write("x,y\n")
        for p in batch.points:
            fh.write(f"{p[0]:.9g},{p[1]:.9g}\n")
    summary = {
        "samples": len(cloud),
        "ess": cloud.ess(),
        "oracle_median": {
            "kinematics": summ.kinematics.tolist(),
            "theta": summ.theta,
            "sigma": summ.sigma.tolist(),
        },
        "vb_posterior": {
            "kinematics.mean": post.kinematics.mean.tolist(),
            "orientation.mean": post.orientation.mean,
            "extent.alpha": post.extent.alpha.tolist(),
            "extent.beta": post.extent.beta.tolist(),
        },
        "gw_prior_to_oracle": gw_to_oracle(spec.prior),
        "gw_vb_to_oracle": gw_to_oracle(post),
    }
    (out / "oracle_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    if args.trace:
        with open(out / "vb_trace.jsonl", "w") as fh:
            for rec in trace:
                fh.write(json.dumps(rec) + "\n")
    print(json.dumps({k: summary[k] for k in ("samples", "ess", "gw_prior_to_oracle", "gw_vb_to_oracle")}))
    return 0


def cmd_plot(args) -> int:
    from .plots import plot_results

    d = Path(args.results_dir)
    if not (d / "runs.csv").exists():
        raise ConfigError(f"{d} does not contain runs.csv")
    for p in plot_results(d, run=args.run):
        print(p)
    return 0


def cmd_presets(args) -> int:
    from .presets import PRESETS, get_preset
    from .simulator import save_scenario

    for name in sorted(PRESETS):
        if args.write:
            Path(args.write).mkdir(parents=True, exist_ok=True)
            path = Path(args.write) / f"{name}.json"
            save_scenario(get_preset(name), path)
            print(path)
        else:
            print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vbett", description=__doc__.split("\n\n")[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a Monte-Carlo campaign")
    r.add_argument("scenario")
    r.add_argument("--seed", type=int)
    r.add_argument("--runs", type=int)
    r.add_argument("--out")
    r.add_argument("--workers", type=int, default=1)
    r.add_argument("--no-plots", action="store_true")
    r.add_argument("--no-wrap", action="store_true", help="score raw heading differences")
    r.set_defaults(func=cmd_run)

    o = sub.add_parser("oracle", help="compare one VB update with an importance-sampled posterior")
    o.add_argument("scenario")
    o.add_argument("--samples", type=int, default=1_000_000)
    o.add_argument("--seed", type=int)
    o.add_argument("--out")
    o.add_argument("--min-ess", type=float, default=0.0, help="double the budget until the ESS exceeds this")
    o.add_argument(
        "--rao-blackwell", action="store_true", help="integrate the kinematics out of the weights (much higher ESS)"
    )
    o.add_argument("--trace", action="store_true", help="write per-sweep records to vb_trace.jsonl")
    o.set_defaults(func=cmd_oracle)

    pl = sub.add_parser("plot", help="regenerate SVG plots of a results directory")
    pl.add_argument("results_dir")
    pl.add_argument("--run", type=int, default=0)
    pl.set_defaults(func=cmd_plot)

    ps = sub.add_parser("presets", help="list shipped scenario presets")
    ps.add_argument("--write", metavar="DIR", help="dump every preset as JSON into DIR")
    ps.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (VbettError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
