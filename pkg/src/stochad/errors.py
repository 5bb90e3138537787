"""Exception hierarchy shared by the numerical modules."""


class StochADError(Exception):
    """Base class for all errors raised by this package."""


class LengthMismatchError(StochADError, ValueError):
    """Two random variables over different sample counts were combined."""


class DomainError(StochADError, ValueError):
    """An elementwise operation was applied outside its domain."""


class TapeError(StochADError):
    """Invalid use of a recording tape (foreign or unknown node)."""


class EmptyWindowError(StochADError):
    """No sample path falls into the localization window."""


class SingularRegressionError(StochADError):
    """The normal matrix of a least-squares problem is (numerically) singular."""


class TooFewSamplesError(StochADError):
    """A regression received fewer samples than basis functions."""
