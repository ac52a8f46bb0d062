"""Exception hierarchy shared by every module of the package."""


class LgsgError(Exception):
    """Base class for all package errors."""


class CapExceeded(LgsgError):
    """An enumeration would exceed the caller's cap."""


class ModeMismatch(LgsgError):
    """Operation requested for the wrong utility mode (LIN vs BIN)."""


class UnknownEdge(LgsgError):
    pass


class InvalidGraph(LgsgError):
    pass


class InvalidStrategy(LgsgError):
    pass


class NumericalFailure(LgsgError):
    """The simplex could not find an acceptable pivot or exceeded its iteration budget."""


class EmptyStartSet(LgsgError):
    pass


class SetupTooLong(LgsgError):
    pass


class NoExit(LgsgError):
    pass


class EmptyFormula(LgsgError):
    pass


class EmptySupport(LgsgError):
    pass


class StaleModel(LgsgError):
    """An oracle model update does not match the support it was built against."""


class NoIncumbent(LgsgError):
    pass


class NoPath(LgsgError):
    pass


class InexactBr(LgsgError):
    pass


class NonFiniteEntry(LgsgError):
    pass


class MaxItersExceeded(LgsgError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
