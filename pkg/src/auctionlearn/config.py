"""Experiment configuration: YAML parsing, validation, and strategy generation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .bids import DiscreteBid, QuadraticBid, StrategySet
from .clearing import MarketFamily, MarketInstance, PaymentRule
from .errors import ConfigError
from .learning import FeedbackMode, default_eta
from .simulation import LearnerSpec


def _require_keys(section: dict, allowed, required, where: str):
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown fields in {where}: {sorted(unknown)}")
    missing = set(required) - set(section)
    if missing:
        raise ConfigError(f"missing fields in {where}: {sorted(missing)}")


def generate_quadratic_strategy_set(true_bid: QuadraticBid, n_actions, low, high, rng) -> StrategySet:
    """True cost plus n_actions-1 curves with the linear term shifted by
    uniform draws from [low, high]; shifts keeping d >= 0 are resampled."""
    bids = [true_bid]
    while len(bids) < n_actions:
        delta = rng.uniform(low, high)
        d = true_bid.d + delta
        if d < 0:
            continue
        bids.append(QuadraticBid(a=true_bid.a, d=d, x_max=true_bid.x_max))
    return StrategySet(bids)


def generate_discrete_strategy_set(true_bid: DiscreteBid, multipliers) -> StrategySet:
    """One action per price multiplier; the multiplier 1 entry must come
    first so action 0 stays the true cost."""
    if abs(multipliers[0] - 1.0) > 1e-12:
        raise ConfigError("first price multiplier must be 1 (true cost)")
    return StrategySet(
        DiscreteBid([(q, p * m) for q, p in true_bid.steps]) for m in multipliers
    )


def default_utility_bounds(strategy_set: StrategySet):
    """(-true cost at the set's max capacity, max bid value at full capacity)."""
    cap = strategy_set.max_capacity()
    if strategy_set.is_quadratic:
        u_min = -strategy_set.true_cost.value(min(cap, strategy_set.true_cost.x_max))
        u_max = max(b.value(b.x_max) for b in strategy_set.bids)
    else:
        u_min = -strategy_set.true_cost.cumulative_values[-1]
        u_max = max(b.cumulative_values[-1] for b in strategy_set.bids)
    return (u_min, u_max)


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated experiment: market, learners, horizon, seeds."""

    market: MarketInstance
    learners: tuple  # of LearnerSpec
    horizon: int
    seeds: tuple
    output_formats: tuple
    raw: dict  # normalized config dict, for the manifest

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()
        ).hexdigest()

    def resolved_etas(self) -> tuple:
        return tuple(
            spec.eta
            if spec.eta is not None
            else default_eta(spec.mode, len(sset), self.horizon, spec.alpha_hat)
            for spec, sset in zip(self.learners, self.market.bidders)
        )


def _parse_cost(cost: dict, family: MarketFamily):
    if family is MarketFamily.CONVEX:
        _require_keys(cost, {"a", "d", "x_max"}, {"a", "d", "x_max"}, "bidder cost")
        return QuadraticBid(a=float(cost["a"]), d=float(cost["d"]), x_max=float(cost["x_max"]))
    _require_keys(cost, {"steps"}, {"steps"}, "bidder cost")
    return DiscreteBid(cost["steps"])


def _parse_mode(name: str) -> FeedbackMode:
    try:
        return FeedbackMode(name)
    except ValueError:
        raise ConfigError(
            f"unknown feedback mode {name!r}; expected one of "
            f"{[m.value for m in FeedbackMode]}"
        ) from None


def load_config(data: dict) -> ExperimentConfig:
    """Validate a config dict and build the experiment objects."""
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    _require_keys(
        data,
        {"market", "bidders", "strategies", "learning", "runs", "output"},
        {"market", "bidders", "strategies", "learning", "runs"},
        "config",
    )

    mk = data["market"]
    _require_keys(mk, {"family", "demand", "payment_rule", "vcg_sign"},
                  {"family", "demand", "payment_rule"}, "market")
    try:
        family = MarketFamily(mk["family"])
        rule = PaymentRule(mk["payment_rule"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    st = data["strategies"]
    if family is MarketFamily.CONVEX:
        _require_keys(st, {"actions", "seed", "perturbation"},
                      {"actions", "seed", "perturbation"}, "strategies")
        low, high = st["perturbation"]
        n_actions = int(st["actions"])
        if n_actions < 1:
            raise ConfigError("strategies.actions must be >= 1")
    else:
        _require_keys(st, {"multipliers"}, {"multipliers"}, "strategies")

    bidders = []
    bounds = []
    if not data["bidders"]:
        raise ConfigError("at least one bidder required")
    for i, b in enumerate(data["bidders"]):
        _require_keys(b, {"cost", "utility_bounds"}, {"cost"}, f"bidders[{i}]")
        true_bid = _parse_cost(b["cost"], family)
        if family is MarketFamily.CONVEX:
            rng = np.random.default_rng([int(st["seed"]), i])
            sset = generate_quadratic_strategy_set(true_bid, n_actions, low, high, rng)
        else:
            sset = generate_discrete_strategy_set(true_bid, st["multipliers"])
        bidders.append(sset)
        if "utility_bounds" in b:
            lo, hi = b["utility_bounds"]
            bounds.append((float(lo), float(hi)))
        else:
            bounds.append(default_utility_bounds(sset))

    try:
        market = MarketInstance(
            demand=float(mk["demand"]),
            family=family,
            payment_rule=rule,
            bidders=tuple(bidders),
            utility_bounds=tuple(bounds),
            vcg_sign=mk.get("vcg_sign", "standard"),
        )
    except Exception as exc:
        raise ConfigError(str(exc)) from exc

    lg = data["learning"]
    _require_keys(lg, {"mode", "horizon", "alpha_hat", "eta", "modes"},
                  {"horizon"}, "learning")
    horizon = int(lg["horizon"])
    if horizon < 1:
        raise ConfigError("learning.horizon must be >= 1")
    if "modes" in lg:
        if "mode" in lg:
            raise ConfigError("give either learning.mode or learning.modes, not both")
        if len(lg["modes"]) != len(bidders):
            raise ConfigError("learning.modes must list one mode per bidder")
        modes = [_parse_mode(m) for m in lg["modes"]]
    elif "mode" in lg:
        modes = [_parse_mode(lg["mode"])] * len(bidders)
    else:
        raise ConfigError("learning.mode (or learning.modes) is required")
    alpha_hat = lg.get("alpha_hat")
    eta = lg.get("eta")
    learners = tuple(
        LearnerSpec(
            mode=m,
            eta=float(eta) if eta is not None else None,
            alpha_hat=float(alpha_hat) if alpha_hat is not None else None,
        )
        for m in modes
    )

    rn = data["runs"]
    _require_keys(rn, {"seeds", "count", "base_seed"}, set(), "runs")
    if "seeds" in rn:
        seeds = tuple(int(s) for s in rn["seeds"])
    elif "count" in rn:
        base = int(rn.get("base_seed", 0))
        seeds = tuple(range(base, base + int(rn["count"])))
    else:
        raise ConfigError("runs needs either a seeds list or a count")
    if not seeds:
        raise ConfigError("seed list must be nonempty")
    if len(set(seeds)) != len(seeds):
        raise ConfigError("duplicate seeds")

    out = data.get("output", {})
    _require_keys(out, {"formats"}, set(), "output")
    formats = tuple(out.get("formats", ("csv", "png")))
    for f in formats:
        if f not in ("csv", "png", "json"):
            raise ConfigError(f"unknown output format {f!r}")

    config = ExperimentConfig(
        market=market,
        learners=learners,
        horizon=horizon,
        seeds=seeds,
        output_formats=formats,
        raw=json.loads(json.dumps(data)),
    )
    # Fail fast on bad learning rates (e.g. alpha_hat outside [1, K]).
    try:
        config.resolved_etas()
    except Exception as exc:
        raise ConfigError(str(exc)) from exc
    return config


def load_config_file(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    return load_config(data)
