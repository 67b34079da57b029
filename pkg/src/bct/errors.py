class BCTError(ValueError):
    """Base class for data and validation errors raised by the package."""


class AlphabetError(BCTError):
    pass


class SequenceError(BCTError):
    pass


class TreeError(BCTError):
    pass


class BudgetError(BCTError):
    """The requested tree space exceeds the configured node budget."""


class WeightError(BCTError):
    pass


class PriorError(BCTError):
    """The prior cannot be normalized (no tree has positive weight)."""


class ModelError(BCTError):
    pass
