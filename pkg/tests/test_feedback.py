import numpy as np
import pytest

from auctionlearn.errors import InvalidRevelation
from auctionlearn.feedback import (
    AlphaAccumulator,
    WinnerHistory,
    revelation_general,
    revelation_heuristic,
    revelation_simple,
)


def test_revelation_simple_losing_mass():
    w = np.array([0.1, 0.2, 0.3, 0.4])
    r = revelation_simple(w, frozenset({2, 3}), won=False)
    assert r[0] == 0.1 and r[1] == 0.2  # untouched outside the losing set
    assert r[2] == pytest.approx(0.7)
    assert r[3] == pytest.approx(0.7)


def test_revelation_simple_win_is_identity():
    w = np.array([0.5, 0.5])
    assert np.array_equal(revelation_simple(w, frozenset(), won=True), w)
    with pytest.raises(InvalidRevelation):
        revelation_simple(w, frozenset(), won=False)


def test_revelation_general_uses_epigraph_structure():
    # Chain: action j reveals k iff j <= k.
    w = np.array([0.1, 0.2, 0.3, 0.4])
    reveal = tuple(frozenset(range(k + 1)) for k in range(4))
    all_losing = frozenset({1, 2, 3})
    r = revelation_general(w, frozenset({2, 3}), all_losing, reveal, won=False)
    # r[k] = mass of losing actions that dominate k (action 0 wins: excluded)
    assert r[2] == pytest.approx(0.2 + 0.3)
    assert r[3] == pytest.approx(0.2 + 0.3 + 0.4)
    assert r[1] == w[1]  # not in the certified set: untouched


def test_revelation_general_rejects_inconsistent_sets():
    w = np.array([0.5, 0.5])
    reveal = (frozenset({0}), frozenset({0, 1}))
    with pytest.raises(InvalidRevelation):
        revelation_general(w, frozenset({0, 1}), frozenset({1}), reveal, won=False)


def test_revelation_heuristic_excludes_winners_and_clamps():
    w = np.array([0.1, 0.2, 0.3, 0.4])
    reveal = tuple(frozenset(range(k + 1)) for k in range(4))
    r = revelation_heuristic(w, frozenset({2, 3}), reveal, winners={0}, won=False)
    assert r[2] == pytest.approx(0.3 + 0.2)  # own mass + action 1 (not a winner)
    assert r[3] == pytest.approx(0.4 + 0.3 + 0.2)
    # With no winner knowledge the winning action's mass leaks in.
    r_naive = revelation_heuristic(w, frozenset({2}), reveal, winners=frozenset(), won=False)
    assert r_naive[2] == pytest.approx(0.3 + 0.2 + 0.1)
    # Clamp at 1.
    big = np.array([0.9, 0.05, 0.05])
    rev = (frozenset({0}), frozenset({0, 1}), frozenset({0, 1, 2}))
    r_clamp = revelation_heuristic(big, frozenset({2}), rev, winners=frozenset(), won=False)
    assert r_clamp[2] <= 1.0


def test_winner_history_tracks_always_winners():
    h = WinnerHistory(3)
    assert h.current() == frozenset()  # never-played actions excluded
    h.update(0, won=True)
    h.update(1, won=False)
    assert h.current() == frozenset({0})
    h.update(0, won=True)
    h.update(0, won=False)  # one loss evicts for good
    assert h.current() == frozenset()


def test_alpha_accumulator_full_information_endpoint():
    acc = AlphaAccumulator(5)
    w = np.full(5, 0.2)
    for _ in range(10):
        acc.record(w, np.ones(5), None)
    assert acc.finalize() == pytest.approx(5.0, abs=1e-12)


def test_alpha_accumulator_bandit_endpoint():
    acc = AlphaAccumulator(5)
    rng = np.random.default_rng(0)
    for _ in range(10):
        w = rng.dirichlet(np.ones(5))
        k = int(rng.integers(5))
        acc.record(w, w.copy(), {k})
    assert acc.finalize() == pytest.approx(1.0, abs=1e-12)


def test_alpha_accumulator_partial_reveals_track_set_mass():
    # One action revealed at twice its own probability: ratio 1/2 per pair,
    # harmonic aggregate 2.
    acc = AlphaAccumulator(4)
    w = np.array([0.25, 0.25, 0.25, 0.25])
    r = np.array([0.25, 0.5, 0.5, 0.25])
    acc.record(w, r, {1, 2})
    assert acc.finalize() == pytest.approx(2.0, abs=1e-12)


def test_alpha_accumulator_validates_and_clamps():
    acc = AlphaAccumulator(3)
    w = np.array([0.2, 0.3, 0.5])
    with pytest.raises(InvalidRevelation):
        acc.record(w, np.array([0.1, 0.3, 0.5]), None)  # r < w
    with pytest.raises(InvalidRevelation):
        acc.record(w, np.array([0.2, 1.2, 0.5]), None)  # r > 1
    assert AlphaAccumulator(3).finalize() == 1.0  # nothing revealed
