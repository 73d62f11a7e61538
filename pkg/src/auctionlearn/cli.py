"""Command-line entry point: run, sweep, and verify subcommands.

Exit codes: 0 success, 1 configuration error, 2 runtime infeasibility,
3 property-verification failure.
"""

from __future__ import annotations

import argparse
import copy
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import verify as verify_mod
from .config import ExperimentConfig, load_config, load_config_file
from .errors import ConfigError, Infeasible
from .report import emit_run_outputs, render_sweep_figure, write_manifest, write_sweep_csv
from .simulation import AuctionGame, aggregate_runs

SWEEP_PARAMETERS = ("K", "alpha_hat", "eta", "T", "Q")


def _run_seed(args):
    config, seed = args
    game = AuctionGame(config.market, config.learners, config.horizon)
    return game.run(seed)


def run_experiment(config: ExperimentConfig, workers: int = 1):
    """Execute every seed (optionally in parallel) and aggregate."""
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_seed, [(config, s) for s in config.seeds]))
    else:
        game = AuctionGame(config.market, config.learners, config.horizon)
        reports = [game.run(s) for s in config.seeds]
    return aggregate_runs(reports)


def _apply_override(raw: dict, parameter: str, value) -> dict:
    data = copy.deepcopy(raw)
    if parameter == "K":
        data["strategies"]["actions"] = int(value)
    elif parameter == "alpha_hat":
        data["learning"]["alpha_hat"] = float(value)
    elif parameter == "eta":
        data["learning"]["eta"] = float(value)
    elif parameter == "T":
        data["learning"]["horizon"] = int(value)
    elif parameter == "Q":
        data["market"]["demand"] = float(value)
    else:
        raise ConfigError(f"unknown sweep parameter {parameter!r}")
    return data


def cmd_run(args) -> int:
    config = load_config_file(args.config)
    if args.seed_override:
        data = copy.deepcopy(config.raw)
        data["runs"] = {"seeds": [int(s) for s in args.seed_override.split(",")]}
        config = load_config(data)
    summary = run_experiment(config, workers=args.workers)
    paths = emit_run_outputs(args.out_dir, config, summary)
    for p in paths:
        print(f"wrote {p}")
    print(
        f"final mean regret {summary.final_regret_mean:.3f} $, "
        f"mean social cost {summary.social_cost_mean:.3f} $, "
        f"alpha_avg {summary.alpha_mean.round(3).tolist()}"
    )
    return 0


def cmd_sweep(args) -> int:
    config = load_config_file(args.config)
    values = [v for v in args.values.split(",") if v]
    if not values:
        raise ConfigError("sweep needs at least one value")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summaries = []
    parsed_values = []
    for v in values:
        data = _apply_override(config.raw, args.parameter, v)
        sub = load_config(data)
        summary = run_experiment(sub, workers=args.workers)
        summaries.append(summary)
        parsed_values.append(float(v))
        print(
            f"{args.parameter}={v}: alpha_avg={summary.alpha_mean.mean():.3f}, "
            f"final regret={summary.final_regret_mean:.3f}"
        )
    sweep_csv = out_dir / "sweep.csv"
    write_sweep_csv(sweep_csv, args.parameter, parsed_values, summaries)
    write_manifest(out_dir / "manifest.json", config,
                   extra={"sweep": {"parameter": args.parameter, "values": parsed_values}})
    print(f"wrote {sweep_csv}")
    if "png" in config.output_formats:
        fig = out_dir / "sweep.png"
        render_sweep_figure(fig, args.parameter, parsed_values, summaries)
        print(f"wrote {fig}")
    return 0


def cmd_verify(_args) -> int:
    return 0 if verify_mod.run_all() else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="auctionlearn",
        description="Repeated-auction no-regret learning simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config over its seeds")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--workers", type=int, default=1)
    p_run.add_argument("--seed-override", default=None,
                       help="comma-separated seed list replacing the config's")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="re-run the config over a parameter range")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--parameter", required=True, choices=SWEEP_PARAMETERS)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out-dir", default="out")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="run the brute-force oracle property suite")
    p_verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Infeasible as exc:
        print(f"infeasible market: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
