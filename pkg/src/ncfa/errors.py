"""Exception hierarchy shared by every module."""


class NcfaError(ValueError):
    """Base class for all errors raised by :mod:`ncfa`."""


class NonHermitian(NcfaError):
    pass


class NoConvergence(NcfaError):
    pass


class DomainViolation(NcfaError):
    pass


class DimensionMismatch(NcfaError):
    pass


class NotInAlgebra(NcfaError):
    """Matrix is not block diagonal for the ambient direct sum."""


class NotInSubalgebra(NcfaError):
    pass


class NotFaithfulOnD(NcfaError):
    pass


class PreconditionViolated(NcfaError):
    def __init__(self, message, quantity=None):
        super().__init__(message)
        self.quantity = quantity


class NotInvertible(NcfaError):
    pass


class DiskConditionViolated(NcfaError):
    def __init__(self, message, quantity=None):
        super().__init__(message)
        self.quantity = quantity


class NotModuleMap(NcfaError):
    pass


class NotStrictContraction(NcfaError):
    pass


class SingularResolvent(NcfaError):
    pass


class DomainMismatch(NcfaError):
    pass


class AtomOnOrOutsideCircle(NcfaError):
    pass


class DegenerateState(NcfaError):
    pass


class TruncationTooSmall(NcfaError):
    pass


class NonPositiveWeight(NcfaError):
    pass


class BadConfig(NcfaError):
    pass
