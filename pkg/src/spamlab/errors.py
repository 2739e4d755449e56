"""Exception hierarchy shared across the package."""


class SpamLabError(Exception):
    """Base class for all errors raised by spamlab."""


class ConfigurationError(SpamLabError):
    pass


class MalformedCorpusError(SpamLabError):
    pass


class BalanceError(SpamLabError):
    pass


class StratificationError(SpamLabError):
    pass


class EmptyDictionaryError(SpamLabError):
    pass


class NumericalFailure(SpamLabError, ArithmeticError):
    """Raised when an objective or gradient evaluates to a non-finite value."""


class DegenerateTrainingError(SpamLabError, ValueError):
    """Training data is empty or contains a single class."""


class IncompatibleFeaturesError(SpamLabError, ValueError):
    """Feature columns differ from the ones the model was trained on."""


class FeasibilityError(SpamLabError):
    pass
