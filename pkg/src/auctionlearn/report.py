"""Report emission: delimited data files, figures, and the run manifest.

Schemas are versioned; changing any column set requires bumping
SCHEMA_VERSION so downstream consumers can detect the break.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

SCHEMA_VERSION = 1

REGRET_COLUMNS = ("t", "regret_mean", "regret_std", "loss_regret_mean")
SUMMARY_COLUMNS = (
    "bidder",
    "eta",
    "alpha_avg_mean",
    "alpha_avg_std",
    "zero_allocations_mean",
    "zero_allocations_std",
    "final_regret_mean",
    "cce_gap",
    "theorem_bound_loss",
    "theorem_bound_dollar",
)
SOCIAL_COST_COLUMNS = ("metric", "value")
SWEEP_COLUMNS = (
    "parameter",
    "value",
    "alpha_avg_mean",
    "final_regret_mean",
    "zero_allocations_mean",
    "social_cost_mean",
)


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_regret_csv(path: Path, summary):
    rows = []
    per_bidder = summary.regret_mean
    header = list(REGRET_COLUMNS) + [
        f"bidder{i}_regret_mean" for i in range(per_bidder.shape[0])
    ]
    overall = summary.overall_regret_mean
    overall_std = summary.regret_std.mean(axis=0)
    loss_mean = summary.regret_loss_mean.mean(axis=0)
    for t in range(summary.horizon):
        rows.append(
            [t + 1, f"{overall[t]:.6f}", f"{overall_std[t]:.6f}", f"{loss_mean[t]:.6f}"]
            + [f"{per_bidder[i, t]:.6f}" for i in range(per_bidder.shape[0])]
        )
    _write_csv(path, header, rows)


def write_summary_csv(path: Path, summary, etas):
    rows = []
    n = len(summary.alpha_mean)
    for i in range(n):
        rows.append(
            [
                i,
                f"{etas[i]:.8f}",
                f"{summary.alpha_mean[i]:.6f}",
                f"{summary.alpha_std[i]:.6f}",
                f"{summary.zero_alloc_mean[i]:.4f}",
                f"{summary.zero_alloc_std[i]:.4f}",
                f"{summary.regret_mean[i, -1]:.6f}",
                f"{summary.cce_gap_mean:.6f}",
                f"{summary.theorem_bound_loss_mean[i]:.6f}",
                f"{summary.theorem_bound_dollar_mean[i]:.6f}",
            ]
        )
    _write_csv(path, SUMMARY_COLUMNS, rows)


def write_social_cost_csv(path: Path, summary):
    rows = [
        ("social_cost_mean", f"{summary.social_cost_mean:.6f}"),
        ("social_cost_std", f"{summary.social_cost_std:.6f}"),
    ]
    _write_csv(path, SOCIAL_COST_COLUMNS, rows)


def write_sweep_csv(path: Path, parameter, values, summaries):
    rows = []
    for v, s in zip(values, summaries):
        rows.append(
            [
                parameter,
                v,
                f"{s.alpha_mean.mean():.6f}",
                f"{s.final_regret_mean:.6f}",
                f"{s.zero_alloc_mean.mean():.4f}",
                f"{s.social_cost_mean:.6f}",
            ]
        )
    _write_csv(path, SWEEP_COLUMNS, rows)


def write_manifest(path: Path, config, extra=None):
    """Everything needed to reproduce the run bit-exactly."""
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config": config.raw,
        "config_sha256": config.config_hash,
        "seeds": list(config.seeds),
        "horizon": config.horizon,
        "etas": list(config.resolved_etas()),
        "utility_bounds": [list(b) for b in config.market.utility_bounds],
        "feedback_modes": [spec.mode.value for spec in config.learners],
        "tolerances": {
            "bisection_lambda": 1e-12,
            "feasibility": 1e-6,
            "bid_comparison": 1e-9,
            "revelation": 1e-12,
        },
    }
    if extra:
        manifest.update(extra)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def render_regret_figure(path: Path, summary, title="Mean regret"):
    t = np.arange(1, summary.horizon + 1)
    mean = summary.overall_regret_mean
    std = summary.regret_std.mean(axis=0)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(t, mean, label="mean regret")
    ax.fill_between(t, mean - std, mean + std, alpha=0.25, label="± std")
    ax.set_xlabel("round")
    ax.set_ylabel("cumulative regret ($)")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_sweep_figure(path: Path, parameter, values, summaries):
    fig, ax = plt.subplots(figsize=(5, 4))
    alphas = [s.alpha_mean.mean() for s in summaries]
    ax.plot(values, alphas, marker="o", label="mean feedback information")
    if parameter == "K":
        ax.plot(values, values, linestyle="--", color="gray", label="full information (K)")
    ax.set_xlabel(parameter)
    ax.set_ylabel("average feedback information")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def emit_run_outputs(out_dir, config, summary, figure_title="Mean regret"):
    """Write all run artifacts into out_dir; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    etas = config.resolved_etas()
    if "csv" in config.output_formats:
        for name, writer in (
            ("regret.csv", lambda p: write_regret_csv(p, summary)),
            ("summary.csv", lambda p: write_summary_csv(p, summary, etas)),
            ("social_cost.csv", lambda p: write_social_cost_csv(p, summary)),
        ):
            p = out_dir / name
            writer(p)
            paths.append(p)
    manifest = out_dir / "manifest.json"
    write_manifest(manifest, config)
    paths.append(manifest)
    if "png" in config.output_formats:
        fig = out_dir / "regret.png"
        render_regret_figure(fig, summary, figure_title)
        paths.append(fig)
    return paths
