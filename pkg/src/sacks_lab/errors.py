"""Exception hierarchy shared by every module of the package."""


class SacksLabError(Exception):
    """Base class for all errors raised by sacks_lab."""


class NodeNotInTree(SacksLabError, ValueError):
    pass


class NotARefinement(SacksLabError, ValueError):
    pass


class IncompatibleSuitable(SacksLabError, ValueError):
    pass


class InsufficientDepth(SacksLabError, ValueError):
    pass


class InvalidCode(SacksLabError, ValueError):
    pass


class IndexBeyondOutput(SacksLabError, IndexError):
    """A formula consulted a code output past its decided length."""


class FreeVariable(SacksLabError, ValueError):
    pass


class BudgetExceeded(SacksLabError):
    """The finite resources of a construction (code depth, rounds) ran out."""


class PremiseFailure(SacksLabError):
    """An engine found its input violating a premise it relies on."""


class MissingX(SacksLabError, ValueError):
    pass


class NotNice(SacksLabError, ValueError):
    pass


class InfiniteFix(SacksLabError, ValueError):
    pass


class NotBijective(SacksLabError, ValueError):
    pass


class UnknownType(SacksLabError, KeyError):
    pass


class BackendMismatch(SacksLabError, TypeError):
    pass


class PreservationFailure(SacksLabError):
    """A computed extension failed its own brute-force verification."""
