"""Exception hierarchy shared by every module."""


class DeskError(Exception):
    """Base class for all library errors."""


class InputError(DeskError):
    """Malformed or inconsistent user input."""


class UnknownPoint(InputError):
    pass


class DuplicateId(InputError):
    pass


class NotABijection(InputError):
    pass


class UnknownFixture(InputError):
    pass


class ParameterOutOfRange(InputError):
    pass


class NotPsd(DeskError):
    """Raised when an operation needs a PSD kernel and the kernel is not PSD."""

    def __init__(self, certificate, message="kernel is not positive semidefinite"):
        super().__init__(message)
        self.certificate = certificate


class ExtensionNotPsd(NotPsd):
    """Adjoining a point would break positive semidefiniteness."""


class MaxRoundsExceeded(DeskError):
    def __init__(self, last, rounds):
        super().__init__(f"no exact fixed point after {rounds} rounds")
        self.last = last
        self.rounds = rounds


class OrderCapExceeded(DeskError):
    def __init__(self, lower_bound):
        super().__init__(f"group order exceeds cap (at least {lower_bound})")
        self.lower_bound = lower_bound


class NotASubgroup(InputError):
    pass


class SearchBudgetExceeded(DeskError):
    pass


class AmbiguousEventualValue(DeskError):
    def __init__(self, point, values):
        super().__init__(f"no strict majority for context point {point!r}: {values}")
        self.point = point
        self.values = values


class NotStrictlyDefinable(DeskError):
    pass


class CycleDetected(DeskError):
    def __init__(self, cycle):
        super().__init__(f"limit order has a cycle: {cycle}")
        self.cycle = cycle


class NotNested(InputError):
    pass


class NotNormal(InputError):
    pass


class NotClosedUnderMeet(InputError):
    pass


class NotClosedUnderJoin(InputError):
    pass


class IncomparableWithoutJoin(InputError):
    pass


class ValidationRequired(DeskError):
    pass


class ValidationFailed(DeskError):
    def __init__(self, report):
        super().__init__(f"inverse system failed validation: {report.first_failure()}")
        self.report = report


class NotExtendable(DeskError):
    pass


class ActionInvalid(InputError):
    pass


class NotInvariant(DeskError):
    pass


class NotFree(DeskError):
    pass


class NotBlockTransitive(DeskError):
    pass


class InconsistentHomomorphism(InputError):
    """Matrices assigned to generators do not define a group homomorphism."""
