"""Exception types shared across the package."""


class AuctionError(Exception):
    """Base class for all package errors."""


class DomainError(AuctionError):
    """Quantity outside a bid function's domain."""


class FamilyMismatch(AuctionError):
    """Operation mixing quadratic and discrete bid families."""


class Infeasible(AuctionError):
    """Market cannot be cleared (demand exceeds available capacity)."""


class InstanceTooLarge(AuctionError):
    """Discrete instance exceeds the exhaustive-search size cap."""


class InvalidRevelation(AuctionError):
    """Revelation probabilities inconsistent with the mixed strategy."""


class BadAlpha(AuctionError):
    """Feedback-information parameter outside [1, K]."""


class NumericalUnderflow(AuctionError):
    """All MWU weights collapsed below representable range."""


class ConfigError(AuctionError):
    """Invalid or unreadable experiment configuration."""
