"""Independent brute-force oracles used by the verification suite and tests.

These deliberately avoid the production solvers: the convex oracle scans a
fine price grid, the discrete oracle enumerates recursively, and the
estimator checks enumerate the sampling distribution exactly.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import Infeasible


def grid_clear_convex(bids, demand, step=1e-5):
    """Pick the first grid price whose aggregate supply reaches the demand.

    The grid is the multiples of `step`; because aggregate supply is monotone
    in the price, a coarse scan may bracket the answer first and only the
    bracketing cell needs the fine scan — the returned point is identical to
    a full fine-grid sweep. Returns (allocation, price).
    """
    a = np.array([b.a for b in bids])
    d = np.array([b.d for b in bids])
    xmax = np.array([b.x_max for b in bids])
    if xmax.sum() < demand - 1e-9:
        raise Infeasible("demand exceeds capacity")
    hi = float(np.max(d + 2 * a * xmax))
    n_points = int(math.ceil(hi / step)) + 1

    def supply(lams):
        return np.clip((lams[:, None] - d) / (2 * a), 0.0, xmax).sum(axis=1)

    coarse_stride = max(int(1e-2 / step), 1)
    coarse_idx = np.arange(0, n_points, coarse_stride)
    coarse_hit = np.flatnonzero(supply(coarse_idx * step) >= demand)
    if coarse_hit.size:
        hi_idx = int(coarse_idx[coarse_hit[0]])
        lo_idx = max(hi_idx - coarse_stride, 0)
    else:
        lo_idx, hi_idx = max(n_points - 1 - coarse_stride, 0), n_points - 1
    fine_idx = np.arange(lo_idx, hi_idx + 1)
    fine_supply = supply(fine_idx * step)
    fine_hit = np.flatnonzero(fine_supply >= demand)
    # Fall back to the last grid point when demand equals total capacity.
    idx = int(fine_idx[fine_hit[0]]) if fine_hit.size else n_points - 1
    lam = idx * step
    return np.clip((lam - d) / (2 * a), 0.0, xmax), float(lam)


def enumerate_discrete(bids, demand):
    """Recursive enumeration of prefix choices; returns (allocation, cost)."""
    cumq = [b.cumulative_quantities for b in bids]
    cumv = [b.cumulative_values for b in bids]
    n = len(bids)
    best = {"cost": math.inf, "choice": None}

    def recurse(i, qty, cost, choice):
        if i == n:
            if qty >= demand - 1e-6 and cost < best["cost"]:
                best["cost"] = cost
                best["choice"] = tuple(choice)
            return
        for m in range(len(cumq[i])):
            choice.append(m)
            recurse(i + 1, qty + cumq[i][m], cost + cumv[i][m], choice)
            choice.pop()

    recurse(0, 0.0, 0.0, [])
    if best["choice"] is None:
        raise Infeasible("no feasible prefix choice")
    alloc = np.array([cumq[i][m] for i, m in enumerate(best["choice"])])
    return alloc, best["cost"]


def enumerate_extended_expectation(w, losing, loser_loss, winner_losses):
    """Exact expectation and second moment of the extended estimator.

    Enumerates every sampled action with its probability under w, builds the
    resulting estimate (simple-market revelation: every losing action reveals
    all losing actions), and returns (expectation, second_moment, true_loss).
    """
    w = np.asarray(w, dtype=float)
    n = len(w)
    losing = frozenset(losing)
    true_loss = np.array(
        [loser_loss if k in losing else winner_losses[k] for k in range(n)]
    )
    r_lose = w[sorted(losing)].sum()
    expectation = np.zeros(n)
    second = np.zeros(n)
    for k in range(n):
        est = np.zeros(n)
        if k in losing:
            for j in losing:
                est[j] = loser_loss / r_lose
        else:
            est[k] = winner_losses[k] / w[k]
        expectation += w[k] * est
        second += w[k] * est**2
    return expectation, second, true_loss


def enumerate_bandit_second_moment(w, losing, loser_loss, winner_losses):
    """Exact per-coordinate second moment of the bandit estimator."""
    w = np.asarray(w, dtype=float)
    n = len(w)
    losing = frozenset(losing)
    second = np.zeros(n)
    for k in range(n):
        loss_k = loser_loss if k in losing else winner_losses[k]
        second[k] += w[k] * (loss_k / w[k]) ** 2
    return second
