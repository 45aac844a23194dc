"""Exception hierarchy shared by every solver in the package."""


class ProductLineError(Exception):
    """Base class for all errors raised by :mod:`productline`."""


class ValidationError(ProductLineError, ValueError):
    """Raised when model primitives violate their invariants."""


class OrderingError(ValidationError):
    """``v_L`` must be strictly below ``v_H``."""


class NonPositiveError(ValidationError):
    """A quantity that must be strictly positive is not."""


class CapTooSmallError(ValidationError):
    """The quality cap cannot accommodate the top type's quality ``1/c``."""


class DomainError(ProductLineError, ValueError):
    """A type or posterior mean fell outside ``[0, 1]``."""


class RegimeError(ProductLineError):
    """A regime-specific routine was called with parameters outside its regime."""


class NoRootError(ProductLineError, ArithmeticError):
    """No root (or more than one root) of a threshold equation lies in its bracket."""


class ConsistencyError(ProductLineError):
    """Two independent computations of the same quantity disagree."""


class InfeasibleError(ProductLineError):
    """The discretised relaxed program has no feasible point."""


class UnboundedError(ProductLineError):
    """The discretised relaxed program is unbounded."""
