"""Exception hierarchy shared across the toolkit."""


class OccamError(Exception):
    """Base class for toolkit errors."""


class ValidationError(OccamError, ValueError):
    pass


class DimensionError(ValidationError):
    pass


class WavFormatError(OccamError, ValueError):
    pass


class UndefinedSNRError(OccamError, ValueError):
    pass


class BudgetExhausted(OccamError):
    """The oracle's query budget has been used up."""


class TransportError(OccamError):
    """A remote oracle could not be reached or answered with an error."""


class InvalidStart(OccamError, ValueError):
    """The attack start points violate the adversarial/benign precondition."""
