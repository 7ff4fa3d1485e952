"""Exception hierarchy shared by every module."""


class UctError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DomainError(UctError):
    """Input is well formed but mathematically outside the supported domain."""

    exit_code = 1


class FormatError(UctError):
    """Input text does not follow the measure file format."""

    exit_code = 2


class UnknownFormat(UctError):
    """Requested export format is not supported."""

    exit_code = 2


class OrderOutOfRange(DomainError):
    """The order must satisfy rho > 1/2."""


class NegativeMass(DomainError):
    """An atom carries negative mass."""


class NotRegular(DomainError):
    """Integer order with a measure whose rho-th moment does not vanish."""


class IllposedIntegerOrder(NotRegular):
    """h_Delta requested for integer order and a non-regular measure."""


class NotConvex(DomainError):
    """A piecewise function has a negative derivative jump."""


class BadWindow(DomainError):
    """Window parameters violate 0 < beta - alpha <= pi/rho."""


class WrongOrder(DomainError):
    """A construction was called for an order it does not cover."""


class SurgeryMismatch(DomainError):
    """A geometric construction failed its own post-verification."""


class NoFeasiblePoint(DomainError):
    """Every restart of the search violated the spacing constraints."""


class VerificationFailed(DomainError):
    """A claimed type-minimizing measure does not reach the uniqueness type."""
