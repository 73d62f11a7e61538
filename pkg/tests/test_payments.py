import numpy as np
import pytest

from auctionlearn.bids import QuadraticBid
from auctionlearn.clearing import MarketFamily, clear_convex, clear_without
from auctionlearn.payments import (
    LossMap,
    pay_as_bid,
    pay_marginal,
    pay_vcg,
    utility_and_loss,
)


def test_loss_map_is_affine_and_clamped():
    m = LossMap(-40.0, 160.0)
    assert m.span == 200.0
    assert m.loss(160.0) == 0.0
    assert m.loss(-40.0) == 1.0
    assert m.loss(60.0) == pytest.approx(0.5)
    # Utilities outside the declared bounds clamp to the interval ends.
    assert m.loss(1000.0) == 0.0
    assert m.loss(-1000.0) == 1.0
    with pytest.raises(ValueError):
        LossMap(5.0, 5.0)


def test_loss_map_monotone_randomized():
    rng = np.random.default_rng(2)
    m = LossMap(-7.0, 13.0)
    u = np.sort(rng.uniform(-20, 20, 100))
    losses = [m.loss(x) for x in u]
    assert all(a >= b - 1e-12 for a, b in zip(losses, losses[1:]))
    assert all(0.0 <= l <= 1.0 for l in losses)


def test_pay_marginal_and_pay_as_bid():
    bid = QuadraticBid(0.1, 8.0, 10.0)
    assert pay_marginal(9.97, 5.0) == pytest.approx(49.85)
    assert pay_marginal(9.97, 0.0) == 0.0
    assert pay_as_bid(bid, 5.0) == pytest.approx(bid.value(5.0))
    assert pay_as_bid(bid, 0.0) == 0.0


def test_vcg_payment_signs():
    # Externality: clearing cost without the bidder minus the residual cost
    # of the others under the full solution. Standard sign pays bid value
    # plus that (nonnegative) externality.
    bids = [QuadraticBid(0.1, 8.0, 10.0), QuadraticBid(0.095, 9.0, 10.0),
            QuadraticBid(0.105, 10.0, 10.0)]
    x, lam, obj = clear_convex(bids, 15.0)
    obj_wo = clear_without(bids, 15.0, 0, MarketFamily.CONVEX)
    standard = pay_vcg(bids[0], x[0], obj, obj_wo, "standard")
    flipped = pay_vcg(bids[0], x[0], obj, obj_wo, "flipped")
    bid_value = bids[0].value(x[0])
    assert standard >= bid_value - 1e-9  # winners are never paid below bid
    assert standard - bid_value == pytest.approx(bid_value - flipped, abs=1e-9)
    with pytest.raises(ValueError):
        pay_vcg(bids[0], x[0], obj, obj_wo, "sideways")


def test_utility_and_loss_consistency():
    m = LossMap(-40.0, 160.0)
    true_cost = QuadraticBid(0.1, 8.0, 10.0)
    u, l = utility_and_loss(98.0, true_cost, 5.0, m)
    assert u == pytest.approx(98.0 - true_cost.value(5.0))
    assert l == pytest.approx(m.loss(u))
    u0, l0 = utility_and_loss(0.0, true_cost, 0.0, m)
    assert u0 == 0.0
    assert l0 == pytest.approx(m.loss(0.0))
