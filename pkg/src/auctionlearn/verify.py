"""On-demand property verification against the brute-force oracles."""

from __future__ import annotations

import numpy as np

from .bids import DiscreteBid, QuadraticBid
from .clearing import clear_convex, clear_discrete, clear_without, MarketFamily
from .oracles import (
    enumerate_bandit_second_moment,
    enumerate_discrete,
    enumerate_extended_expectation,
    grid_clear_convex,
)


def _random_convex_instance(rng):
    n = int(rng.integers(2, 6))
    bids = [
        QuadraticBid(
            a=float(rng.uniform(0.05, 0.5)),
            d=float(rng.uniform(1, 30)),
            x_max=float(rng.uniform(1, 20)),
        )
        for _ in range(n)
    ]
    cap = sum(b.x_max for b in bids)
    demand = float(rng.uniform(0.2, 0.95) * cap)
    return bids, demand


def _random_discrete_instance(rng):
    n = int(rng.integers(2, 5))
    bids = [
        DiscreteBid(
            [
                (float(rng.uniform(1, 10)), float(rng.uniform(1, 20)))
                for _ in range(int(rng.integers(1, 4)))
            ]
        )
        for _ in range(n)
    ]
    cap = sum(b.capacity for b in bids)
    demand = float(rng.uniform(0.2, 0.9) * cap)
    return bids, demand


def check_convex_oracle(n_instances=100, seed=0):
    """Bisection vs 1e-5 price-grid oracle on random instances."""
    rng = np.random.default_rng(seed)
    worst_lam, worst_x = 0.0, 0.0
    for _ in range(n_instances):
        bids, demand = _random_convex_instance(rng)
        x, lam, _ = clear_convex(bids, demand)
        x_grid, lam_grid = grid_clear_convex(bids, demand)
        worst_lam = max(worst_lam, abs(lam - lam_grid))
        worst_x = max(worst_x, float(np.max(np.abs(x - x_grid))))
    ok = worst_lam <= 1e-4 and worst_x <= 1e-3
    return ok, f"max |lambda| err {worst_lam:.2e}, max |x| err {worst_x:.2e}"


def check_discrete_oracle(n_instances=100, seed=1):
    """Exhaustive product-order solver vs recursive enumerator, exact cost match."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        bids, demand = _random_discrete_instance(rng)
        _, obj = clear_discrete(bids, demand)
        _, obj_oracle = enumerate_discrete(bids, demand)
        worst = max(worst, abs(obj - obj_oracle))
    return worst == 0.0, f"max objective mismatch {worst:.2e}"


def check_unbiasedness(n_configs=100, seed=2, tol=1e-12):
    """Exact expectation of the extended estimator equals the true losses."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_configs):
        k = int(rng.integers(2, 9))
        w = rng.dirichlet(np.ones(k))
        n_lose = int(rng.integers(1, k + 1))
        losing = frozenset(rng.choice(k, size=n_lose, replace=False).tolist())
        loser_loss = float(rng.uniform(0, 1))
        winner_losses = rng.uniform(0, 1, size=k)
        expectation, _, true_loss = enumerate_extended_expectation(
            w, losing, loser_loss, winner_losses
        )
        worst = max(worst, float(np.max(np.abs(expectation - true_loss))))
    return worst <= tol, f"max |E[est] - l| = {worst:.2e}"


def check_variance_dominance(n_configs=100, seed=3):
    """Extended estimator's second moment never exceeds the bandit one."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(n_configs):
        k = int(rng.integers(2, 9))
        w = rng.dirichlet(np.ones(k))
        n_lose = int(rng.integers(1, k + 1))
        losing = frozenset(rng.choice(k, size=n_lose, replace=False).tolist())
        loser_loss = float(rng.uniform(0, 1))
        winner_losses = rng.uniform(0, 1, size=k)
        _, second_ext, _ = enumerate_extended_expectation(
            w, losing, loser_loss, winner_losses
        )
        second_bandit = enumerate_bandit_second_moment(
            w, losing, loser_loss, winner_losses
        )
        worst = max(worst, float(np.max(second_ext - second_bandit)))
    return worst <= 1e-12, f"max (ext - bandit) second moment = {worst:.2e}"


def check_vcg_externality(n_instances=50, seed=4):
    """Removing a bidder never decreases the clearing cost."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(n_instances):
        bids, demand = _random_convex_instance(rng)
        cap_wo = [
            sum(b.x_max for j, b in enumerate(bids) if j != i)
            for i in range(len(bids))
        ]
        _, _, obj = clear_convex(bids, demand)
        for i in range(len(bids)):
            if cap_wo[i] < demand:
                continue
            obj_wo = clear_without(bids, demand, i, MarketFamily.CONVEX)
            worst = max(worst, obj - obj_wo)
    return worst <= 1e-6, f"max J - J_without = {worst:.2e}"


ALL_CHECKS = (
    ("convex_solver_vs_grid_oracle", check_convex_oracle),
    ("discrete_solver_vs_enumerator", check_discrete_oracle),
    ("extended_estimator_unbiasedness", check_unbiasedness),
    ("extended_variance_dominance", check_variance_dominance),
    ("clearing_cost_monotonicity", check_vcg_externality),
)


def run_all(print_fn=print):
    """Run every check; returns True iff all pass."""
    all_ok = True
    for name, check in ALL_CHECKS:
        ok, detail = check()
        all_ok = all_ok and ok
        print_fn(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return all_ok
