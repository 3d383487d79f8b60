"""Exception hierarchy shared by every module."""


class AbelnetError(Exception):
    """Base class for all errors raised by the package."""


class UnknownLetter(AbelnetError, KeyError):
    pass


class InvalidSpec(AbelnetError, ValueError):
    pass


class NotLocallyIrreducible(AbelnetError):
    pass


class NotCritical(AbelnetError):
    pass


class NotStronglyConnected(AbelnetError):
    pass


class BadWitnessVector(AbelnetError, ValueError):
    pass


class NotAgentNetwork(AbelnetError):
    pass


class NotLocallyRecurrent(AbelnetError, ValueError):
    pass


class BoxTooSmall(AbelnetError):
    """The capacity search touched the box boundary where the optimum may continue."""

    def __init__(self, message, value=None, maximizer=None):
        super().__init__(message)
        self.value = value
        self.maximizer = maximizer


class RuleNotApplicable(AbelnetError):
    pass


class OrbitCapExceeded(AbelnetError):
    pass


class IllegalInput(AbelnetError, ValueError):
    pass


class PreconditionViolated(AbelnetError, ValueError):
    pass
