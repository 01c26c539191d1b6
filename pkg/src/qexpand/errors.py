"""Exception hierarchy."""


class QExpandError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(QExpandError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)


class IntegrityError(QExpandError):
    """Input is well formed but internally inconsistent."""


class ContractViolation(QExpandError, ValueError):
    """A precondition of an operation does not hold."""


class CapacityError(QExpandError):
    """Request exceeds what an index was built to answer."""


class ExpansionOverflow(QExpandError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"synonym expansion of {size} phrases exceeds cap {cap}")


class EmptyQueryError(QExpandError):
    def __init__(self, message: str = "empty query"):
        super().__init__(message)


class DegenerateQueryError(QExpandError):
    def __init__(self, message: str = "degenerate query"):
        super().__init__(message)


class IndexFormatError(QExpandError):
    """Serialized index is missing, unreadable or of an unsupported version."""
