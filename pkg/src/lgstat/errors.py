"""Exception hierarchy shared by all modules."""


class LgstatError(Exception):
    """Base class for every error raised by this package."""


class GraphFormatError(LgstatError, ValueError):
    """Malformed graph or coloring input (parse failure, loop, duplicate edge, degree overflow)."""


class InfeasibleParameters(LgstatError, ValueError):
    pass


class BallSizeCapExceeded(LgstatError):
    pass


class EnumerationCapExceeded(LgstatError):
    pass


class UniverseMismatch(LgstatError, ValueError):
    """Two distributions (or sets) live over different atom universes."""


class PreconditionError(LgstatError):
    """A checked precondition of a proof-machinery operation does not hold."""


class InternalContradiction(LgstatError):
    """A verification step failed although every precondition held.

    The property tests assert that this never happens.
    """
