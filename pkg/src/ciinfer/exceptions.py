"""Exception hierarchy shared across the package."""


class CIError(Exception):
    """Base class for all errors raised by ciinfer."""


class ParseError(CIError, ValueError):
    """Malformed statement, instance file or table text.

    ``line`` and ``column`` are 1-based when known.
    """

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(where + message)


class UniverseMismatchError(CIError, ValueError):
    """Objects built over different variable universes were combined."""


class CapExceededError(CIError):
    """An enumeration or closure would exceed its configured size cap."""


class ContractError(CIError):
    """A documented precondition was violated by the caller."""


class NodeBudgetExceeded(CIError):
    """Branch-and-bound gave up before deciding integer feasibility."""
