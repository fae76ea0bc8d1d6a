"""Exception hierarchy.

Everything a reducer can give up with derives from :class:`Escalation`, so a
caller can catch one class and hand the problem to a more robust method.
"""


class RecombinationError(Exception):
    """Base class for all errors raised by this package."""


class Escalation(RecombinationError):
    """A randomized reducer stopped without a solution.

    ``tau`` is the number of loop iterations spent and ``basis_attempts`` the
    number of cone-basis inversions tried before giving up.
    """

    def __init__(self, message="", *, tau=0, basis_attempts=0):
        super().__init__(message)
        self.tau = tau
        self.basis_attempts = basis_attempts


class NotFound(Escalation):
    pass


class InfeasibleInput(NotFound):
    pass


class ActiveExhausted(Escalation):
    pass


class SingularBasisPersistent(Escalation):
    pass


class GiveUp(Escalation):
    pass


class SingularBasis(RecombinationError):
    pass


class DegenerateSwap(RecombinationError):
    pass


class NotInNegativeCone(RecombinationError):
    pass


class EmptyActive(RecombinationError):
    pass


class SingularPerturbation(RecombinationError):
    pass


class ZeroKappa(RecombinationError):
    pass


class NegativeWeight(RecombinationError):
    pass


class IndexOutOfRange(RecombinationError, IndexError):
    pass


class TooLarge(RecombinationError, ValueError):
    pass


class BadGroupCount(RecombinationError, ValueError):
    pass


class RankDeficient(RecombinationError):
    pass
