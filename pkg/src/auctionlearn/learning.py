"""Multiplicative-weights core and the three loss-vector estimators.

The update is the classic exponential reweighting w[i] *= exp(-eta * l[i]);
estimators cover full information, bandit importance weighting, and the
extended estimator that also fills in revealed losing actions.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np

from .errors import BadAlpha, InvalidRevelation, NumericalUnderflow

REVEAL_TOL = 1e-12


class FeedbackMode(Enum):
    FULL_INFORMATION = "full_information"
    BANDIT = "bandit"
    EXTENDED_TRUE = "extended_true"
    EXTENDED_HEURISTIC = "extended_heuristic"


def uniform_strategy(n_actions: int) -> np.ndarray:
    return np.full(n_actions, 1.0 / n_actions)


def mwu_update(w: np.ndarray, losses: np.ndarray, eta: float) -> np.ndarray:
    """Exponentially reweight and renormalize, in log space.

    Max-subtraction before exponentiation keeps the update stable even when
    importance-weighted loss entries are large.
    """
    if eta <= 0:
        raise ValueError("learning rate must be > 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        logw = np.where(w > 0, np.log(np.maximum(w, 1e-300)), -np.inf) - eta * losses
        logw -= logw.max()
        new_w = np.exp(logw)
    total = new_w.sum()
    if not np.isfinite(total) or total <= 0:
        raise NumericalUnderflow("all weights collapsed after update")
    return new_w / total


def sample_action(w: np.ndarray, rng) -> int:
    """Draw an action index by inverse CDF on the cumulative weights."""
    u = rng.random()
    k = int(np.searchsorted(np.cumsum(w), u, side="right"))
    return min(k, len(w) - 1)


def estimate_full(counterfactual_losses: np.ndarray) -> np.ndarray:
    """Full-information feedback: the true loss vector itself."""
    return np.asarray(counterfactual_losses, dtype=float).copy()


def estimate_bandit(k_played: int, realized_loss: float, w: np.ndarray) -> np.ndarray:
    """Importance-weighted single-entry estimate l / w[k] at the played action."""
    if w[k_played] <= 0:
        raise ValueError("played an action with zero probability")
    est = np.zeros(len(w))
    est[k_played] = realized_loss / w[k_played]
    return est


def estimate_extended(
    won: bool,
    k_played: int,
    realized_loss: float,
    loser_loss: float,
    losing_set,
    r: np.ndarray,
    w: np.ndarray,
) -> np.ndarray:
    """Partial-observation estimate: bandit when winning, losing-set fill-in
    at loser_loss / r[k] otherwise."""
    if won:
        return estimate_bandit(k_played, realized_loss, w)
    if k_played not in losing_set:
        raise InvalidRevelation("played action missing from the losing set")
    est = np.zeros(len(w))
    for k in losing_set:
        if r[k] < w[k] - REVEAL_TOL or r[k] > 1.0 + REVEAL_TOL:
            raise InvalidRevelation(
                f"revelation probability r[{k}]={r[k]} outside [w[{k}]={w[k]}, 1]"
            )
        est[k] = loser_loss / r[k]
    return est


def default_eta(mode: FeedbackMode, n_actions: int, horizon: int, alpha_hat: float | None = None) -> float:
    """Learning-rate defaults per feedback mode.

    Hedge uses sqrt(8 ln K / T), the bandit rate is sqrt(2 ln K / (K T)),
    and the extended modes scale the bandit rate by sqrt(alpha_hat).
    """
    if n_actions < 2:
        raise ValueError("need at least 2 actions for a meaningful rate")
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    log_k = math.log(n_actions)
    if mode is FeedbackMode.FULL_INFORMATION:
        return math.sqrt(8 * log_k / horizon)
    if mode is FeedbackMode.BANDIT:
        return math.sqrt(2 * log_k / (n_actions * horizon))
    if alpha_hat is None:
        raise BadAlpha("extended modes require an alpha_hat in [1, K]")
    if not 1.0 <= alpha_hat <= n_actions:
        raise BadAlpha(f"alpha_hat={alpha_hat} outside [1, {n_actions}]")
    return math.sqrt(2 * alpha_hat * log_k / (n_actions * horizon))
