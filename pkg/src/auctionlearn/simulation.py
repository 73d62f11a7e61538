"""Repeated-auction game loop, regret accounting, and multi-run aggregation.

Each round every bidder samples an action from its mixed strategy, the market
is cleared, and every bidder's full counterfactual outcome vector (holding
opponents fixed) is computed for regret bookkeeping. Clearing results are
memoized on the joint action profile, which stays valid across rounds and
seeds because strategy sets are frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import clearing as clr
from .bids import dominates, losing_set_from_price, reveal_sets
from .clearing import MarketFamily, MarketInstance, PaymentRule
from .errors import BadAlpha
from .feedback import (
    AlphaAccumulator,
    WinnerHistory,
    revelation_general,
    revelation_heuristic,
    revelation_simple,
)
from .learning import (
    FeedbackMode,
    default_eta,
    estimate_bandit,
    estimate_extended,
    estimate_full,
    mwu_update,
    sample_action,
    uniform_strategy,
)
from .payments import LossMap, pay_as_bid, pay_marginal, pay_vcg, utility_and_loss

ALLOC_TOL = 1e-9


@dataclass(frozen=True)
class LearnerSpec:
    """Per-bidder learning configuration; eta defaults from the mode."""

    mode: FeedbackMode
    eta: float | None = None
    alpha_hat: float | None = None


@dataclass
class RoundRecord:
    """Realized and counterfactual outcomes of one auction round."""

    t: int
    actions: tuple
    allocations: tuple
    payments: tuple
    utilities: tuple
    losses: tuple
    counterfactual_utilities: list  # per bidder, shape (K,)
    counterfactual_losses: list
    counterfactual_allocations: list
    losing_sets: list  # certified L_t per bidder, or None when winning
    all_losing_sets: list  # full losing set per bidder
    revelations: list  # r used by the estimator, or None


@dataclass
class RunReport:
    """All per-run measurements the experiments report on."""

    seed: int
    horizon: int
    regret_dollar: np.ndarray  # (n_bidders, T) cumulative trajectories
    regret_loss: np.ndarray
    alpha_avg: np.ndarray  # (n_bidders,)
    zero_allocations: np.ndarray  # (n_bidders,) counts
    social_cost: np.ndarray  # (T,) per-round true production cost
    cce_gap_per_bidder: np.ndarray
    cce_gap: float
    theorem_bound_loss: np.ndarray
    theorem_bound_dollar: np.ndarray
    joint_counts: dict  # profile tuple -> occurrences
    records: list = field(repr=False, default_factory=list)

    @property
    def mean_social_cost(self) -> float:
        return float(self.social_cost.mean())


def theorem_bound(n_actions: int, horizon: int, alpha_avg: float) -> float:
    """Expected-regret bound sqrt(2 (K / alpha_avg) T ln K), in loss units."""
    if not 1.0 <= alpha_avg <= n_actions:
        raise BadAlpha(f"alpha_avg={alpha_avg} outside [1, {n_actions}]")
    return math.sqrt(2.0 * (n_actions / alpha_avg) * horizon * math.log(n_actions))


@dataclass(frozen=True)
class _Outcome:
    allocation: tuple
    marginal_price: float | None
    objective: float
    payments: tuple
    utilities: tuple
    losses: tuple


class AuctionGame:
    """One market plus learner specs; `run(seed)` plays T rounds.

    A clearing cache may be shared between games on the same market to reuse
    profile clearings across seeds and feedback modes.
    """

    def __init__(self, market: MarketInstance, learners, horizon: int, clearing_cache=None):
        if len(learners) != market.n_bidders:
            raise ValueError("one LearnerSpec required per bidder")
        self.market = market
        self.learners = tuple(learners)
        self.horizon = horizon
        self.loss_maps = tuple(LossMap(lo, hi) for lo, hi in market.utility_bounds)
        self._cache = clearing_cache if clearing_cache is not None else {}
        self._without_cache = {}
        self.etas = tuple(
            spec.eta
            if spec.eta is not None
            else default_eta(spec.mode, len(sset), horizon, spec.alpha_hat)
            for spec, sset in zip(self.learners, market.bidders)
        )
        # Epigraph structure, used by the general-market feedback machinery.
        self._reveal_sets = tuple(reveal_sets(s) for s in market.bidders)
        self._dominates = tuple(
            np.array(
                [[dominates(s[j], s[k]) for k in range(len(s))] for j in range(len(s))]
            )
            for s in market.bidders
        )

    # -- clearing with profile memoization ---------------------------------

    def _objective_without(self, profile, excluded):
        opp = tuple(k for i, k in enumerate(profile) if i != excluded)
        key = (excluded, opp)
        if key not in self._without_cache:
            self._without_cache[key] = clr.clear_without(
                [self.market.bidders[i][k] for i, k in enumerate(profile)],
                self.market.demand,
                excluded,
                self.market.family,
            )
        return self._without_cache[key]

    def outcome(self, profile) -> _Outcome:
        out = self._cache.get(profile)
        if out is not None:
            return out
        market = self.market
        bids = [market.bidders[i][k] for i, k in enumerate(profile)]
        alloc, lam, obj = clr.clear_profile(bids, market.demand, market.family)
        payments = []
        for i, x in enumerate(alloc):
            if market.payment_rule is PaymentRule.MARGINAL_PRICE:
                p = pay_marginal(lam, x)
            elif market.payment_rule is PaymentRule.PAY_AS_BID:
                p = pay_as_bid(bids[i], x)
            else:
                obj_wo = self._objective_without(profile, i) if x > ALLOC_TOL else obj
                p = pay_vcg(bids[i], x, obj, obj_wo, market.vcg_sign)
            payments.append(p)
        utilities = []
        losses = []
        for i, (p, x) in enumerate(zip(payments, alloc)):
            u, l = utility_and_loss(p, market.bidders[i].true_cost, x, self.loss_maps[i])
            utilities.append(u)
            losses.append(l)
        out = _Outcome(
            allocation=tuple(float(x) for x in alloc),
            marginal_price=lam,
            objective=obj,
            payments=tuple(payments),
            utilities=tuple(utilities),
            losses=tuple(losses),
        )
        self._cache[profile] = out
        return out

    # -- feedback plumbing --------------------------------------------------

    def _certified_losing_set(self, bidder, k_played, lam):
        """Actions the loser can certify as losing: marginal-price rule uses
        the announced price, otherwise epigraph domination by the played bid."""
        sset = self.market.bidders[bidder]
        if (
            self.market.family is MarketFamily.CONVEX
            and self.market.payment_rule is PaymentRule.MARGINAL_PRICE
        ):
            return losing_set_from_price(sset, lam)
        dom = self._dominates[bidder]
        return frozenset(int(k) for k in np.flatnonzero(dom[k_played]))

    def _true_revelation(self, bidder, w, losing_set, all_losing, won):
        """Exact revelation probabilities (also used for alpha accounting)."""
        if (
            self.market.family is MarketFamily.CONVEX
            and self.market.payment_rule is PaymentRule.MARGINAL_PRICE
        ):
            return revelation_simple(w, losing_set, won)
        return revelation_general(w, losing_set, all_losing, self._reveal_sets[bidder], won)

    # -- main loop ----------------------------------------------------------

    def run(self, seed: int, keep_records: bool = False) -> RunReport:
        market = self.market
        n = market.n_bidders
        horizon = self.horizon
        rngs = [np.random.default_rng([seed, i]) for i in range(n)]
        sizes = [len(s) for s in market.bidders]
        w = [uniform_strategy(k) for k in sizes]
        alpha_acc = [AlphaAccumulator(k) for k in sizes]
        histories = [WinnerHistory(k) for k in sizes]

        realized_u = np.zeros((n, horizon))
        realized_l = np.zeros((n, horizon))
        cf_u = [np.zeros((horizon, k)) for k in sizes]
        cf_l = [np.zeros((horizon, k)) for k in sizes]
        zero_alloc = np.zeros(n, dtype=int)
        social = np.zeros(horizon)
        joint_counts: dict = {}
        records = []

        for t in range(horizon):
            profile = tuple(sample_action(w[i], rngs[i]) for i in range(n))
            joint_counts[profile] = joint_counts.get(profile, 0) + 1
            out = self.outcome(profile)
            social[t] = sum(
                market.bidders[i].true_cost.value(x) if x > ALLOC_TOL else 0.0
                for i, x in enumerate(out.allocation)
            )

            round_losing, round_all_losing, round_revelations = [], [], []
            round_cf_alloc = []
            for i in range(n):
                k_played = profile[i]
                spec = self.learners[i]
                cf_alloc = np.zeros(sizes[i])
                for k in range(sizes[i]):
                    o = out if k == k_played else self.outcome(
                        profile[:i] + (k,) + profile[i + 1 :]
                    )
                    cf_u[i][t, k] = o.utilities[i]
                    cf_l[i][t, k] = o.losses[i]
                    cf_alloc[k] = o.allocation[i]
                realized_u[i, t] = out.utilities[i]
                realized_l[i, t] = out.losses[i]
                won = out.allocation[i] > ALLOC_TOL
                if not won:
                    zero_alloc[i] += 1
                all_losing = frozenset(
                    int(k) for k in np.flatnonzero(cf_alloc <= ALLOC_TOL)
                )
                losing_set = (
                    None
                    if won
                    else self._certified_losing_set(i, k_played, out.marginal_price)
                )
                # Feedback-information accounting: full information counts
                # every action each round; bandit counts the played action;
                # the extended modes count the partial-observation rounds,
                # where the losing set is revealed at the true (exact)
                # revelation probabilities.
                r_true = None
                if spec.mode in (FeedbackMode.EXTENDED_TRUE, FeedbackMode.EXTENDED_HEURISTIC):
                    r_true = self._true_revelation(i, w[i], losing_set, all_losing, won)
                    if not won:
                        alpha_acc[i].record(w[i], r_true, losing_set)
                elif spec.mode is FeedbackMode.FULL_INFORMATION:
                    alpha_acc[i].record(w[i], np.ones(sizes[i]), None)
                else:
                    alpha_acc[i].record(w[i], w[i].copy(), {k_played})

                loser_loss = self.loss_maps[i].loss(0.0)
                if spec.mode is FeedbackMode.FULL_INFORMATION:
                    est = estimate_full(cf_l[i][t])
                    r_used = None
                elif spec.mode is FeedbackMode.BANDIT:
                    est = estimate_bandit(k_played, realized_l[i, t], w[i])
                    r_used = None
                elif spec.mode is FeedbackMode.EXTENDED_TRUE:
                    r_used = r_true
                    est = estimate_extended(
                        won, k_played, realized_l[i, t], loser_loss,
                        losing_set or frozenset(), r_used, w[i],
                    )
                else:
                    r_used = revelation_heuristic(
                        w[i], losing_set or frozenset(),
                        self._reveal_sets[i], histories[i].current(), won,
                    )
                    est = estimate_extended(
                        won, k_played, realized_l[i, t], loser_loss,
                        losing_set or frozenset(), r_used, w[i],
                    )
                histories[i].update(k_played, won)
                round_losing.append(losing_set)
                round_all_losing.append(all_losing)
                round_revelations.append(r_used)
                round_cf_alloc.append(cf_alloc)
                w[i] = mwu_update(w[i], est, self.etas[i])

            if keep_records:
                records.append(
                    RoundRecord(
                        t=t,
                        actions=profile,
                        allocations=out.allocation,
                        payments=out.payments,
                        utilities=out.utilities,
                        losses=out.losses,
                        counterfactual_utilities=[cf_u[i][t].copy() for i in range(n)],
                        counterfactual_losses=[cf_l[i][t].copy() for i in range(n)],
                        counterfactual_allocations=round_cf_alloc,
                        losing_sets=round_losing,
                        all_losing_sets=round_all_losing,
                        revelations=round_revelations,
                    )
                )

        regret_dollar = np.zeros((n, horizon))
        regret_loss = np.zeros((n, horizon))
        alpha = np.zeros(n)
        bound_loss = np.zeros(n)
        bound_dollar = np.zeros(n)
        for i in range(n):
            cum_cf_u = np.cumsum(cf_u[i], axis=0)
            cum_cf_l = np.cumsum(cf_l[i], axis=0)
            regret_dollar[i] = cum_cf_u.max(axis=1) - np.cumsum(realized_u[i])
            regret_loss[i] = np.cumsum(realized_l[i]) - cum_cf_l.min(axis=1)
            alpha[i] = alpha_acc[i].finalize()
            bound_loss[i] = theorem_bound(sizes[i], horizon, alpha[i])
            bound_dollar[i] = bound_loss[i] * self.loss_maps[i].span
        gap_per_bidder = regret_dollar[:, -1] / horizon
        return RunReport(
            seed=seed,
            horizon=horizon,
            regret_dollar=regret_dollar,
            regret_loss=regret_loss,
            alpha_avg=alpha,
            zero_allocations=zero_alloc,
            social_cost=social,
            cce_gap_per_bidder=gap_per_bidder,
            cce_gap=float(max(gap_per_bidder.max(), 0.0)),
            theorem_bound_loss=bound_loss,
            theorem_bound_dollar=bound_dollar,
            joint_counts=joint_counts,
            records=records,
        )


def regret_trajectory(records, bidder: int) -> np.ndarray:
    """Recompute the dollar regret trajectory directly from round records."""
    cf = np.array([rec.counterfactual_utilities[bidder] for rec in records])
    realized = np.array([rec.utilities[bidder] for rec in records])
    return np.cumsum(cf, axis=0).max(axis=1) - np.cumsum(realized)


def cce_gap(reports) -> float:
    """Positive part of the largest per-bidder time-averaged regret."""
    gaps = np.array([r.cce_gap for r in reports])
    return float(gaps.mean())


@dataclass
class RunSummary:
    """Across-seed means and standard deviations of the run measurements."""

    seeds: tuple
    horizon: int
    regret_mean: np.ndarray  # (n_bidders, T)
    regret_std: np.ndarray
    regret_loss_mean: np.ndarray
    alpha_mean: np.ndarray  # (n_bidders,)
    alpha_std: np.ndarray
    zero_alloc_mean: np.ndarray
    zero_alloc_std: np.ndarray
    social_cost_mean: float
    social_cost_std: float
    cce_gap_mean: float
    theorem_bound_loss_mean: np.ndarray
    theorem_bound_dollar_mean: np.ndarray

    @property
    def overall_regret_mean(self) -> np.ndarray:
        """Regret trajectory averaged over bidders as well as seeds."""
        return self.regret_mean.mean(axis=0)

    @property
    def final_regret_mean(self) -> float:
        return float(self.overall_regret_mean[-1])

    @property
    def final_loss_regret_mean(self) -> np.ndarray:
        return self.regret_loss_mean[:, -1]


def aggregate_runs(reports) -> RunSummary:
    """Combine per-seed reports into mean/std summaries, in seed order."""
    reports = sorted(reports, key=lambda r: r.seed)
    regret = np.stack([r.regret_dollar for r in reports])  # (S, n, T)
    regret_loss = np.stack([r.regret_loss for r in reports])
    alpha = np.stack([r.alpha_avg for r in reports])
    zero = np.stack([r.zero_allocations for r in reports]).astype(float)
    social = np.array([r.mean_social_cost for r in reports])
    return RunSummary(
        seeds=tuple(r.seed for r in reports),
        horizon=reports[0].horizon,
        regret_mean=regret.mean(axis=0),
        regret_std=regret.std(axis=0),
        regret_loss_mean=regret_loss.mean(axis=0),
        alpha_mean=alpha.mean(axis=0),
        alpha_std=alpha.std(axis=0),
        zero_alloc_mean=zero.mean(axis=0),
        zero_alloc_std=zero.std(axis=0),
        social_cost_mean=float(social.mean()),
        social_cost_std=float(social.std()),
        cce_gap_mean=cce_gap(reports),
        theorem_bound_loss_mean=np.stack([r.theorem_bound_loss for r in reports]).mean(axis=0),
        theorem_bound_dollar_mean=np.stack([r.theorem_bound_dollar for r in reports]).mean(axis=0),
    )
