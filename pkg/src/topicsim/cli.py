"""Command-line front end: simulate, verify-dist, evaluate, report."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, PRESETS, RunConfig
from .engine import simulate
from .evaluation import EvalConfig, evaluate_log, write_judges_csv
from .lifecycle import (
    AccessSampler,
    LifecycleParams,
    density_unnormalized,
    normalizer,
    verify_smoothness,
)
from .reporting import build_report

logger = logging.getLogger(__name__)

VALUE_GAP_TOL = 1e-12
SLOPE_GAP_TOL = 1e-12
MASS_TOL = 1e-6
KS_TOL = 0.01


def verify_dist(params: LifecycleParams, draws: int = 100_000, seed: int = 0) -> dict:
    """Junction gaps, normalization error, and sampler KS statistic.

    The mass and KS references are rebuilt here on a fine trapezoid grid
    (16x the sampler's table), independent of the sampler's own table.
    """
    report = {}
    smooth = verify_smoothness(params)
    report["value_gap_at_peak_onset"] = smooth.value_gap_at_peak_onset
    report["value_gap_at_plateau_end"] = smooth.value_gap_at_plateau_end
    report["slope_gap_at_peak_onset"] = smooth.slope_gap_at_peak_onset
    report["slope_gap_at_plateau_end"] = smooth.slope_gap_at_plateau_end

    grid = np.linspace(0.0, params.horizon, 2**17 + 1)
    values = density_unnormalized(grid, params)
    steps = np.diff(grid) * (values[1:] + values[:-1]) / 2.0
    cumulative = np.concatenate(([0.0], np.cumsum(steps)))
    fine_mass = float(cumulative[-1])

    sampler = AccessSampler(params)
    report["mass_error"] = abs(fine_mass / normalizer(params) - 1.0)

    times = sampler.sample_first(draws, np.random.default_rng(seed))
    sorted_times = np.sort(times)
    reference_cdf = np.interp(sorted_times, grid, cumulative / fine_mass)
    n = len(sorted_times)
    upper = float(np.max(np.arange(1, n + 1) / n - reference_cdf))
    lower = float(np.max(reference_cdf - np.arange(0, n) / n))
    report["ks_statistic"] = max(upper, lower)

    report["ok"] = (
        report["value_gap_at_peak_onset"] <= VALUE_GAP_TOL
        and report["value_gap_at_plateau_end"] <= VALUE_GAP_TOL
        and report["slope_gap_at_peak_onset"] <= SLOPE_GAP_TOL
        and report["slope_gap_at_plateau_end"] <= SLOPE_GAP_TOL
        and report["mass_error"] <= MASS_TOL
        and report["ks_statistic"] < KS_TOL
    )
    return report


def _cmd_simulate(args) -> int:
    if args.config is not None:
        config = RunConfig.from_file(args.config, preset=args.preset)
    else:
        config = RunConfig.from_dict({}, preset=args.preset)
    if args.seed is not None:
        config.seed = args.seed
    result = simulate(config, args.out)
    print(f"run complete: {result.degree_label}, {len(result.topic_ids)} topics, "
          f"{result.elapsed_seconds:.1f}s")
    for topic_id, path in result.log_paths.items():
        print(f"  {topic_id}: {path}")
    print(f"  stats: {result.out_dir / 'stats.csv'}")
    return 0


def _cmd_verify_dist(args) -> int:
    params = LifecycleParams(
        breaking_degree=args.breaking_degree,
        peak_onset=args.peak_onset,
        plateau_rate=args.plateau_rate,
        horizon=args.horizon,
    )
    report = verify_dist(params, draws=args.draws, seed=args.seed)
    checks = [
        ("value gap at peak onset", report["value_gap_at_peak_onset"], VALUE_GAP_TOL, "<="),
        ("value gap at plateau end", report["value_gap_at_plateau_end"], VALUE_GAP_TOL, "<="),
        ("slope gap at peak onset", report["slope_gap_at_peak_onset"], SLOPE_GAP_TOL, "<="),
        ("slope gap at plateau end", report["slope_gap_at_plateau_end"], SLOPE_GAP_TOL, "<="),
        ("normalization error", report["mass_error"], MASS_TOL, "<="),
        (f"KS statistic ({args.draws} draws)", report["ks_statistic"], KS_TOL, "<"),
    ]
    for name, value, tol, op in checks:
        passed = value <= tol if op == "<=" else value < tol
        print(f"{name:<32} {value:.3e}  (tolerance {op} {tol:g})  "
              f"{'PASS' if passed else 'FAIL'}")
    print("all checks passed" if report["ok"] else "verification FAILED")
    return 0 if report["ok"] else 1


def _expand_logs(paths: list[Path]) -> list[Path]:
    logs = []
    for path in paths:
        if path.is_dir():
            found = sorted(path.glob("logs/*.events.jsonl")) or sorted(
                path.glob("*.events.jsonl")
            )
            if not found:
                raise ConfigError(f"no event logs under {path}")
            logs.extend(found)
        else:
            logs.append(path)
    return logs


def _cmd_evaluate(args) -> int:
    eval_config = (
        EvalConfig.from_file(args.judge_config) if args.judge_config else EvalConfig()
    )
    rows = []
    for log_path in _expand_logs(args.log):
        rows.extend(evaluate_log(log_path, eval_config))
    judges = [spec.name for spec in eval_config.judges]
    write_judges_csv(rows, judges, args.out)
    scored = sum(1 for r in rows if r["value"] is not None)
    print(f"wrote {args.out}: {scored} scores from {len(judges)} judge(s)")
    return 0


def _cmd_report(args) -> int:
    paths = build_report(args.runs, args.out)
    print(f"summary table: {paths['summary']}")
    print(f"timelines:     {paths['timeline']}")
    print(f"group table:   {paths['groups']}")
    for figure in paths["figures"]:
        print(f"figure:        {figure}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicsim",
        description="Simulate a trending topic's lifecycle under comment poisoning.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one configuration over the topic file")
    sim.add_argument("--config", type=Path, help="JSON run config (defaults used if omitted)")
    sim.add_argument("--out", type=Path, required=True, help="output run directory")
    sim.add_argument("--preset", choices=sorted(PRESETS), help="named config preset")
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.set_defaults(fn=_cmd_simulate)

    vd = sub.add_parser("verify-dist", help="check the access-time distribution machinery")
    vd.add_argument("--breaking-degree", type=float, default=1.0)
    vd.add_argument("--peak-onset", type=float, default=240.0)
    vd.add_argument("--plateau-rate", type=float, default=0.01)
    vd.add_argument("--horizon", type=float, default=960.0)
    vd.add_argument("--draws", type=int, default=100_000)
    vd.add_argument("--seed", type=int, default=0)
    vd.set_defaults(fn=_cmd_verify_dist)

    ev = sub.add_parser("evaluate", help="judge recorded transcripts from event logs")
    ev.add_argument("--log", type=Path, action="append", required=True,
                    help="event log file or run directory (repeatable)")
    ev.add_argument("--judge-config", type=Path, help="JSON judge configuration")
    ev.add_argument("--out", type=Path, required=True, help="judges.csv destination")
    ev.set_defaults(fn=_cmd_evaluate)

    rp = sub.add_parser("report", help="compare finished runs and render figures")
    rp.add_argument("runs", nargs="+", type=Path, help="run directories")
    rp.add_argument("--out", type=Path, required=True, help="report output directory")
    rp.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
