"""Exception hierarchy shared by every module."""


class Sl2GrowthError(Exception):
    """Base class for all package errors."""


class NotPrime(Sl2GrowthError, ValueError):
    pass


class ZeroInput(Sl2GrowthError, ValueError):
    pass


class NonResidue(Sl2GrowthError, ValueError):
    pass


class NoSuchOrder(Sl2GrowthError, ValueError):
    pass


class ModulusMismatch(Sl2GrowthError, ValueError):
    pass


class NotInSL2(Sl2GrowthError, ValueError):
    """Matrix entries do not have determinant 1."""


class MatrixParseError(Sl2GrowthError, ValueError):
    pass


class BudgetExceeded(Sl2GrowthError, MemoryError):
    pass


class TableMismatch(Sl2GrowthError, ValueError):
    pass


class NotASubgroup(Sl2GrowthError, ValueError):
    pass


class XInH(Sl2GrowthError, ValueError):
    pass


class XSquaredNotInH(Sl2GrowthError, ValueError):
    pass


class OrderTwo(Sl2GrowthError, ValueError):
    pass


class NotCentrallyClosed(Sl2GrowthError, ValueError):
    pass


class SymmetryViolation(Sl2GrowthError, ValueError):
    pass


class NotRealizable(Sl2GrowthError, ValueError):
    pass


class SearchExhausted(Sl2GrowthError, RuntimeError):
    pass


class NoneFound(Sl2GrowthError, LookupError):
    pass


class BadIndex(Sl2GrowthError, ValueError):
    pass


class DomainError(Sl2GrowthError, ValueError):
    pass


class InterpretationMismatch(Sl2GrowthError, AssertionError):
    pass
