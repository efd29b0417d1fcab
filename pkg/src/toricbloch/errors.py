"""Exception and warning types raised across the package."""


class ToricBlochError(Exception):
    """Base class for all package errors."""


class BlockTooLarge(ToricBlochError, ValueError):
    """The L x L block does not fit the k x k torus without wrap-around."""


class ScaleTooLarge(ToricBlochError, ValueError):
    """Requested size exceeds what the explicit (oracle-scale) routines allow."""


class SubsetTooLarge(ToricBlochError, ValueError):
    """Subset too large for a dense reduced density matrix."""


class PrecisionTooLow(ToricBlochError, ArithmeticError):
    """Cancellation consumed nearly all bits of the working precision."""


class NonRealResidue(ToricBlochError, ArithmeticError):
    """An expression that must be real kept a non-negligible imaginary part."""


class InsufficientPoints(ToricBlochError, ValueError):
    """Too few block sizes for the requested fit."""


class NotInPlane(ToricBlochError, ValueError):
    """Two-level state is not in the real X-Z plane of the Bloch sphere."""


class ConditionViolated(UserWarning):
    """An approximation is used outside the regime where it is accurate."""
