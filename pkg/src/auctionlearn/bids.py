"""Bid curves and the epigraph-domination relations between them.

Two bid families are supported: quadratic curves a*x^2 + d*x on [0, x_max],
and discrete step bids where a prefix of (quantity, unit price) blocks may be
accepted. Action indices are 0-based throughout; action 0 of a strategy set
is the bidder's true cost function.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DomainError, FamilyMismatch

# Tolerance for floating-point comparisons of quantities and bid values.
TOL = 1e-9


@dataclass(frozen=True)
class QuadraticBid:
    """Convex quadratic bid curve a*x^2 + d*x on the interval [0, x_max]."""

    a: float
    d: float
    x_max: float

    def __post_init__(self):
        if self.a < 0:
            raise ValueError(f"quadratic coefficient must be >= 0, got {self.a}")
        if self.d < 0:
            raise ValueError(f"linear coefficient must be >= 0, got {self.d}")
        if self.x_max <= 0:
            raise ValueError(f"capacity must be > 0, got {self.x_max}")

    @property
    def capacity(self) -> float:
        return self.x_max

    def value(self, x: float) -> float:
        if x < -TOL or x > self.x_max + TOL:
            raise DomainError(f"x={x} outside [0, {self.x_max}]")
        if x <= 0:
            return 0.0
        return self.a * x * x + self.d * x

    def marginal_at_zero(self) -> float:
        """Derivative of the bid curve at x = 0 (equals the linear term)."""
        return self.d


@dataclass(frozen=True)
class DiscreteBid:
    """Step bid: ordered (quantity, unit price) blocks, accepted by prefix.

    The feasible allocations are the cumulative quantities
    {0, q1, q1+q2, ...}; the value at a cumulative quantity is the sum of
    quantity*price over the accepted prefix.
    """

    steps: tuple

    def __init__(self, steps):
        object.__setattr__(self, "steps", tuple((float(q), float(p)) for q, p in steps))
        if not self.steps:
            raise ValueError("discrete bid needs at least one step")
        for q, p in self.steps:
            if q <= 0:
                raise ValueError(f"step quantity must be > 0, got {q}")
            if p < 0:
                raise ValueError(f"step price must be >= 0, got {p}")

    @property
    def cumulative_quantities(self) -> tuple:
        """Feasible allocations including 0, strictly increasing."""
        out = [0.0]
        for q, _ in self.steps:
            out.append(out[-1] + q)
        return tuple(out)

    @property
    def cumulative_values(self) -> tuple:
        out = [0.0]
        for q, p in self.steps:
            out.append(out[-1] + q * p)
        return tuple(out)

    @property
    def capacity(self) -> float:
        return self.cumulative_quantities[-1]

    def value(self, x: float) -> float:
        for q, v in zip(self.cumulative_quantities, self.cumulative_values):
            if abs(x - q) <= TOL:
                return v
        raise DomainError(f"x={x} is not a cumulative quantity of {self.steps}")


def evaluate(bid, x: float) -> float:
    """Bid value at quantity x; 0 at x = 0."""
    return bid.value(x)


def same_family(j, k) -> bool:
    return type(j) is type(k)


def dominates(j, k) -> bool:
    """True iff bid j lies at or below bid k on k's entire domain.

    Requires j's domain to contain k's. Ties (equality at some or all points)
    count as domination. Quadratics are decided analytically: the difference
    (a_j - a_k)x^2 + (d_j - d_k)x is sign-checked via its linear factor on
    (0, x_max_k].
    """
    if not same_family(j, k):
        raise FamilyMismatch(f"cannot compare {type(j).__name__} with {type(k).__name__}")
    if isinstance(j, QuadraticBid):
        if j.x_max < k.x_max - TOL:
            return False
        da = j.a - k.a
        dd = j.d - k.d
        # g(x) = da*x^2 + dd*x <= 0 on (0, x_max_k] iff da*x + dd <= 0 there;
        # linear, so the endpoints suffice.
        return dd <= TOL and da * k.x_max + dd <= TOL
    # Discrete: every cumulative quantity of k must appear in j with value <=.
    jq = j.cumulative_quantities
    jv = j.cumulative_values
    for kq, kv in zip(k.cumulative_quantities, k.cumulative_values):
        matched = False
        for q, v in zip(jq, jv):
            if abs(q - kq) <= TOL:
                matched = v <= kv + TOL
                break
        if not matched:
            return False
    return True


class StrategySet:
    """A bidder's finite, immutable action set; action 0 is the true cost."""

    def __init__(self, bids):
        bids = tuple(bids)
        if not bids:
            raise ValueError("strategy set must be nonempty")
        first = type(bids[0])
        if any(type(b) is not first for b in bids):
            raise FamilyMismatch("strategy set mixes quadratic and discrete bids")
        self._bids = bids

    @property
    def bids(self) -> tuple:
        return self._bids

    @property
    def true_cost(self):
        return self._bids[0]

    @property
    def size(self) -> int:
        return len(self._bids)

    @property
    def is_quadratic(self) -> bool:
        return isinstance(self._bids[0], QuadraticBid)

    def __len__(self):
        return len(self._bids)

    def __getitem__(self, k):
        return self._bids[k]

    def max_capacity(self) -> float:
        return max(b.capacity for b in self._bids)


def reveal_set(strategy_set: StrategySet, k: int) -> frozenset:
    """Actions whose bid curves dominate action k (k always included)."""
    return frozenset(
        j for j in range(len(strategy_set)) if dominates(strategy_set[j], strategy_set[k])
    )


def reveal_sets(strategy_set: StrategySet) -> tuple:
    """reveal_set for every action, computed once per strategy set."""
    return tuple(reveal_set(strategy_set, k) for k in range(len(strategy_set)))


def losing_set_from_price(strategy_set: StrategySet, lam: float) -> frozenset:
    """Actions whose marginal at zero is >= the announced marginal price.

    Only defined for quadratic sets; these are exactly the actions a losing
    bidder can certify as losing from the price announcement.
    """
    if not strategy_set.is_quadratic:
        raise FamilyMismatch("marginal price losing set requires quadratic bids")
    return frozenset(
        k
        for k in range(len(strategy_set))
        if strategy_set[k].marginal_at_zero() >= lam - TOL
    )
