"""Repeated procurement auctions with no-regret learning bidders.

Library layout:
  bids       bid curves and epigraph domination
  clearing   convex and discrete market clearing
  payments   payment rules and the utility-to-loss map
  learning   multiplicative weights and loss estimators
  feedback   revelation probabilities and feedback-information accounting
  simulation repeated-game loop, regret, and aggregation
  config     experiment configuration loading
  report     CSV/figure/manifest emission
  cli        run / sweep / verify commands
"""

from .bids import (
    DiscreteBid,
    QuadraticBid,
    StrategySet,
    dominates,
    losing_set_from_price,
    reveal_set,
    reveal_sets,
)
from .clearing import (
    ClearingResult,
    MarketFamily,
    MarketInstance,
    PaymentRule,
    clear_convex,
    clear_discrete,
    clear_without,
)
from .errors import (
    AuctionError,
    BadAlpha,
    ConfigError,
    DomainError,
    FamilyMismatch,
    Infeasible,
    InstanceTooLarge,
    InvalidRevelation,
    NumericalUnderflow,
)
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
from .simulation import (
    AuctionGame,
    LearnerSpec,
    RunReport,
    RunSummary,
    aggregate_runs,
    cce_gap,
    theorem_bound,
)

__version__ = "0.1.0"
