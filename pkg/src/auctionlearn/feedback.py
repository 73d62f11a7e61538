"""Revelation probabilities and the feedback-information accounting.

For a losing bidder, other losing actions may be revealed indirectly: in the
marginal-price market every losing action reveals the whole losing set; in
the general market an action is revealed by any losing action whose epigraph
contains it. The ratio r[k] / w[k] aggregated over rounds and actions gives
the average feedback information, which ranges from 1 (bandit) to K (full
information).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidRevelation

REVEAL_TOL = 1e-12


def revelation_simple(w: np.ndarray, losing_set, won: bool) -> np.ndarray:
    """Marginal-price market: every losing action reveals all losing actions,
    so r[k] = sum of w over the losing set for each losing k."""
    r = w.copy()
    if won:
        return r
    idx = sorted(losing_set)
    if not idx:
        raise InvalidRevelation("losing round requires a nonempty losing set")
    r[idx] = w[idx].sum()
    return r


def revelation_general(w: np.ndarray, losing_set, all_losing, reveal_sets, won: bool) -> np.ndarray:
    """Exact revelation probabilities: r[k] sums w over losing actions that
    dominate k (the simulator supplies the full losing set)."""
    r = w.copy()
    if won:
        return r
    all_losing = frozenset(all_losing)
    if not frozenset(losing_set) <= all_losing:
        raise InvalidRevelation("certified losing set not contained in the full losing set")
    for k in losing_set:
        r[k] = sum(w[j] for j in all_losing & reveal_sets[k])
    return r


def revelation_heuristic(w: np.ndarray, losing_set, reveal_sets, winners, won: bool) -> np.ndarray:
    """Bidder-computable approximation of the exact probabilities.

    The sum over dominating actions excludes `winners`, the actions that have
    won every time they were played so far; the result is clamped at 1.
    """
    r = w.copy()
    if won:
        return r
    winners = frozenset(winners)
    for k in losing_set:
        others = reveal_sets[k] - winners - {k}
        r[k] = min(w[k] + sum(w[j] for j in others), 1.0)
    return r


class WinnerHistory:
    """Tracks the actions that received a nonzero allocation at every play.

    Never-played actions are excluded: membership requires a nonempty play
    history with no losses.
    """

    def __init__(self, n_actions: int):
        self._played = np.zeros(n_actions, dtype=int)
        self._won = np.zeros(n_actions, dtype=int)

    def update(self, k_played: int, won: bool) -> None:
        self._played[k_played] += 1
        if won:
            self._won[k_played] += 1

    def current(self) -> frozenset:
        return frozenset(
            int(k)
            for k in np.flatnonzero((self._played > 0) & (self._won == self._played))
        )


class AlphaAccumulator:
    """Harmonic-mean aggregate of r[k]/w[k] over the revealed (round, action)
    pairs, clamped to [1, K].

    With every action revealed each round (full information) this is the plain
    per-(round, action) harmonic mean and equals K when r = 1; with only the
    played action revealed (bandit) it equals 1 exactly. Restricting to the
    pairs actually revealed is what makes the aggregate track the losing-set
    size for the partial-observation modes.
    """

    def __init__(self, n_actions: int):
        self.n_actions = n_actions
        self._total = 0.0
        self._pairs = 0

    def record(self, w: np.ndarray, r: np.ndarray, revealed=None) -> None:
        """Accumulate w[k]/r[k] over `revealed` action indices (None = all)."""
        if np.any(r < w - REVEAL_TOL) or np.any(r > 1.0 + REVEAL_TOL):
            raise InvalidRevelation("revelation probabilities outside [w, 1]")
        if revealed is None:
            self._total += float(np.sum(w / r))
            self._pairs += len(w)
        else:
            idx = sorted(revealed)
            self._total += float(np.sum(w[idx] / r[idx]))
            self._pairs += len(idx)

    def finalize(self) -> float:
        if self._pairs == 0:
            # No partial observations at all: bandit-equivalent feedback.
            return 1.0
        alpha = self._pairs / self._total
        return float(min(max(alpha, 1.0), self.n_actions))
