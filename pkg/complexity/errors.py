class LiftLabError(Exception):
    """Base class for every error raised by the complexity package."""


class DomainError(LiftLabError, ValueError):
    """An input lies outside the domain of the requested operation."""


class FormatError(DomainError):
    """A text file could not be parsed in the expected format."""


class UnrealizableError(DomainError):
    """A requested gadget value cannot be realized by any cell."""


class UnsupportedGadgetError(DomainError):
    """The gadget lacks a structural property the operation relies on."""


class BudgetError(LiftLabError, RuntimeError):
    """A desk-scale budget (cells or search nodes) was exceeded."""


class InvariantError(LiftLabError, RuntimeError):
    """An internal guarantee failed; always a bug in the caller or library."""


class RegimeError(LiftLabError, ValueError):
    """A gadget is in the wrong bias regime for the requested construction.

    Attributes:
        regime (str): The regime the gadget is actually in.
    """
    def __init__(self, message, regime):
        super().__init__(message)
        self.regime = regime


class NotBiasedError(RegimeError):
    """Raised by the biased-case construction on a balanced gadget."""
    def __init__(self, message):
        super().__init__(message, 'balanced')


class NotBalancedError(RegimeError):
    """Raised by balanced-case routines on a biased gadget."""
    def __init__(self, message):
        super().__init__(message, 'biased')
