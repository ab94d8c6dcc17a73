"""Exception hierarchy shared by every module of the package."""


class LiouvilleError(Exception):
    """Base class for all package errors."""


class DomainError(LiouvilleError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class SingularPoint(DomainError):
    """Evaluation requested within the exclusion radius of a coincidence."""


class LightConePoint(DomainError):
    """Evaluation requested within the exclusion radius of the light cone."""


class LightConeViolation(LightConePoint):
    """A pair of insertions violates the non-light-cone condition.

    ``pair`` holds the two labels, ``margin`` the measured distance.
    """

    def __init__(self, message, pair=None, margin=None):
        super().__init__(message)
        self.pair = pair
        self.margin = margin


class SingularConfiguration(DomainError):
    """Two insertions coincide."""


class NonIntegerScreening(DomainError):
    """The screening number is not an integer within tolerance."""

    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class ChargeOutOfRange(DomainError):
    """A smeared factor carries a charge index outside the allowed range."""


class NotSpacelike(DomainError):
    """Supports that were required to be spacelike separated are not."""

    def __init__(self, message, closest=None):
        super().__init__(message)
        self.closest = closest


class ConfigError(LiouvilleError, ValueError):
    """Invalid configuration or spec file."""


class BudgetExceeded(LiouvilleError):
    """The evaluation budget ran out before the tolerance was met.

    The best available estimate is attached as ``result``.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class MCAbort(LiouvilleError):
    """Monte Carlo integrand produced non-finite values."""

    def __init__(self, message, count=0, first_point=None):
        super().__init__(message)
        self.count = count
        self.first_point = first_point


class SlowConvergence(RuntimeWarning):
    """A series hit its term cap before meeting the stopping rule."""
