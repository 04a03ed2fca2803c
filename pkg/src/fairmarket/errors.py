"""Exception hierarchy shared by every module."""


class FairMarketError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInstance(FairMarketError, ValueError):
    pass


class EmptyInstance(InvalidInstance):
    pass


class NegativeValue(InvalidInstance):
    pass


class UnvaluedGood(InvalidInstance):
    pass


class UnvaluedAgent(InvalidInstance):
    pass


class NotPositiveInstance(InvalidInstance):
    pass


class InstanceTooLarge(FairMarketError):
    """An exhaustive routine was asked to exceed its enumeration cap."""


CapExceeded = InstanceTooLarge


class NotFound(FairMarketError):
    """No allocation satisfies the requested predicate."""


class BudgetExceeded(FairMarketError):
    """A solver safety valve fired. This always indicates a bug."""


class IterationBudgetExceeded(BudgetExceeded):
    pass


class StepBudgetExceeded(BudgetExceeded):
    pass


class NoFiniteFactor(FairMarketError):
    """Both price-rise factors are infinite."""


class DegeneracyUnresolved(FairMarketError):
    pass


class ParseError(FairMarketError, ValueError):
    def __init__(self, message: str, locus: str | None = None):
        super().__init__(message if locus is None else f"{locus}: {message}")
        self.locus = locus


class InvalidParams(FairMarketError, ValueError):
    """Generator parameters that no instance of the family can satisfy."""
