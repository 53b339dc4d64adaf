"""Exception hierarchy shared by all modules."""


class EpsNetError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3


class InputError(EpsNetError):
    exit_code = 1


class DegeneratePolytope(InputError):
    pass


class DegenerateVertex(InputError):
    pass


class InvalidEpsilon(InputError):
    pass


class EmptyInput(InputError):
    pass


class UnhittableRange(InputError):
    pass


class UncoverablePoint(InputError):
    pass


class CapExceeded(EpsNetError):
    pass


class PerturbationFailed(EpsNetError):
    pass


class FlattenFailed(EpsNetError):
    pass


class ProjectionMiss(EpsNetError):
    pass


class NotATriangulation(EpsNetError):
    pass


class NetVerificationFailed(EpsNetError):
    exit_code = 2


class NonTermination(EpsNetError):
    pass
