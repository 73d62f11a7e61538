"""Market clearing: convex (KKT water-filling) and discrete (exhaustive) solvers."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .bids import DiscreteBid, QuadraticBid, StrategySet
from .errors import Infeasible, InstanceTooLarge

FEAS_TOL = 1e-6
SIZE_CAP = 10**7


class MarketFamily(Enum):
    CONVEX = "convex"
    DISCRETE = "discrete"


class PaymentRule(Enum):
    MARGINAL_PRICE = "marginal_price"
    PAY_AS_BID = "pay_as_bid"
    VCG = "vcg"


@dataclass(frozen=True)
class MarketInstance:
    """Demand, payment rule, and per-bidder strategy sets for one experiment."""

    demand: float
    family: MarketFamily
    payment_rule: PaymentRule
    bidders: tuple  # of StrategySet
    utility_bounds: tuple  # of (u_min, u_max) per bidder
    vcg_sign: str = "standard"  # "standard" or "flipped"

    def __post_init__(self):
        if self.demand <= 0:
            raise ValueError("demand must be > 0")
        if self.payment_rule is PaymentRule.MARGINAL_PRICE and self.family is not MarketFamily.CONVEX:
            raise ValueError("marginal pricing requires the convex market family")
        if self.vcg_sign not in ("standard", "flipped"):
            raise ValueError(f"unknown vcg_sign {self.vcg_sign!r}")
        if len(self.utility_bounds) != len(self.bidders):
            raise ValueError("one (u_min, u_max) pair required per bidder")
        for lo, hi in self.utility_bounds:
            if not lo < hi:
                raise ValueError(f"need u_min < u_max, got ({lo}, {hi})")
        cap = sum(s.max_capacity() for s in self.bidders)
        if cap < self.demand - FEAS_TOL:
            raise Infeasible(
                f"total capacity {cap} cannot cover demand {self.demand}"
            )

    @property
    def n_bidders(self) -> int:
        return len(self.bidders)


@dataclass(frozen=True)
class ClearingResult:
    """Solved allocation plus the payment/utility bookkeeping for one profile."""

    allocation: tuple
    objective: float
    marginal_price: float | None
    payments: tuple
    utilities: tuple


def clear_convex(bids, demand):
    """Minimize total bid cost s.t. sum(x) >= demand, 0 <= x <= x_max.

    Water-filling: x_l(lam) = clamp((lam - d_l)/(2 a_l), 0, x_max_l); the
    aggregate supply is monotone in lam, so lam* is found by bisection.
    Returns (allocation array, lam*, objective).
    """
    a = np.array([b.a for b in bids])
    d = np.array([b.d for b in bids])
    xmax = np.array([b.x_max for b in bids])
    if np.any(a <= 0):
        raise ValueError("convex clearing requires strictly positive curvature")
    if xmax.sum() < demand - FEAS_TOL:
        raise Infeasible(f"capacity {xmax.sum()} < demand {demand}")

    def supply(lam):
        return np.clip((lam - d) / (2 * a), 0.0, xmax).sum()

    lo, hi = 0.0, float(np.max(d + 2 * a * xmax))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if supply(mid) >= demand:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12:
            break
    lam = hi
    x = np.clip((lam - d) / (2 * a), 0.0, xmax)
    obj = float(np.sum(a * x * x + d * x))
    return x, float(lam), obj


def clear_discrete(bids, demand):
    """Exhaustive minimum-cost prefix selection meeting the demand.

    Ties are broken lexicographically by the per-bidder prefix-length vector
    (iteration order of itertools.product with strict improvement).
    Returns (allocation array, objective).
    """
    cumq = [b.cumulative_quantities for b in bids]
    cumv = [b.cumulative_values for b in bids]
    counts = [len(q) for q in cumq]
    if math.prod(counts) > SIZE_CAP:
        raise InstanceTooLarge(f"{math.prod(counts)} joint prefix choices exceed cap")
    if sum(q[-1] for q in cumq) < demand - FEAS_TOL:
        raise Infeasible("total discrete capacity below demand")

    best_choice = None
    best_cost = math.inf
    for choice in itertools.product(*(range(c) for c in counts)):
        qty = sum(cumq[i][m] for i, m in enumerate(choice))
        if qty < demand - FEAS_TOL:
            continue
        cost = sum(cumv[i][m] for i, m in enumerate(choice))
        if cost < best_cost:
            best_cost = cost
            best_choice = choice
    alloc = np.array([cumq[i][m] for i, m in enumerate(best_choice)])
    return alloc, float(best_cost)


def clear_profile(bids, demand, family):
    """Dispatch to the family's solver; returns (allocation, lam-or-None, J)."""
    if family is MarketFamily.CONVEX:
        x, lam, obj = clear_convex(bids, demand)
        return x, lam, obj
    x, obj = clear_discrete(bids, demand)
    return x, None, obj


def clear_without(bids, demand, excluded, family):
    """Objective of the market re-cleared with bidder `excluded` forced to 0."""
    reduced = [b for i, b in enumerate(bids) if i != excluded]
    if not reduced:
        raise Infeasible("cannot exclude the only bidder")
    _, _, obj = clear_profile(reduced, demand, family)
    return obj
