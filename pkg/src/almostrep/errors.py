"""Exception hierarchy shared by all modules.

The CLI maps :class:`InputError` subclasses to exit code 2 and every other
:class:`AlmostRepError` to exit code 1.
"""


class AlmostRepError(Exception):
    pass


class InputError(AlmostRepError, ValueError):
    """Malformed or inconsistent input (bad literal, group mismatch, ...)."""


class GroupMismatch(InputError):
    pass


class RelationViolation(AlmostRepError):
    pass


class SupportError(AlmostRepError, KeyError):
    """A tabulated cochain was evaluated outside its declared support."""


class NotACycle(AlmostRepError):
    pass


class RingError(InputError):
    pass


class NumericalError(AlmostRepError):
    pass


class NotUnitary(NumericalError):
    pass


class BranchError(NumericalError):
    """An eigenvalue sits too close to -1 for the principal logarithm."""


class SpectralGapError(NumericalError):
    pass


class DefectTooLarge(NumericalError):
    pass


class SingularError(NumericalError):
    pass


class HypothesisViolation(AlmostRepError):
    pass
