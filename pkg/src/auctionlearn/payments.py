"""Payment rules (marginal price, pay-as-bid, VCG) and the utility-to-loss map."""

from __future__ import annotations

from dataclasses import dataclass

ALLOC_TOL = 1e-9


@dataclass(frozen=True)
class LossMap:
    """Affine map from utility in [u_min, u_max] to loss in [0, 1].

    u_max maps to loss 0, u_min to loss 1; utilities outside the bounds are
    clamped.
    """

    u_min: float
    u_max: float

    def __post_init__(self):
        if not self.u_min < self.u_max:
            raise ValueError(f"need u_min < u_max, got ({self.u_min}, {self.u_max})")

    @property
    def span(self) -> float:
        return self.u_max - self.u_min

    def loss(self, u: float) -> float:
        s = (u - self.u_min) / self.span
        return 1.0 - min(max(s, 0.0), 1.0)


def pay_marginal(lam: float, x: float) -> float:
    """Uniform-price payment lam * x; losers receive 0."""
    if x <= ALLOC_TOL:
        return 0.0
    return lam * x


def pay_as_bid(bid, x: float) -> float:
    """The winner's own bid value at its allocation; losers receive 0."""
    if x <= ALLOC_TOL:
        return 0.0
    return bid.value(x)


def pay_vcg(bid, x: float, obj: float, obj_without: float, sign: str = "standard") -> float:
    """Bid value plus the clearing-cost externality of the bidder.

    The default "standard" convention adds (J_without - J) >= 0; sign="flipped"
    uses the literal (J - J_without) instead. Losers receive 0 either way,
    since excluding a zero-allocation bidder leaves the objective unchanged.
    """
    base = bid.value(x) if x > ALLOC_TOL else 0.0
    if sign == "standard":
        return base + (obj_without - obj)
    if sign == "flipped":
        return base + (obj - obj_without)
    raise ValueError(f"unknown vcg sign convention {sign!r}")


def utility_and_loss(payment: float, true_cost, x: float, loss_map: LossMap):
    """Utility p - c(x) and its [0, 1] loss under the bidder's loss map."""
    u = payment - (true_cost.value(x) if x > ALLOC_TOL else 0.0)
    return u, loss_map.loss(u)
