"""Exception and warning types shared across the package."""


class LinQuboError(Exception):
    """Base class for all errors raised by linqubo."""


class DimensionMismatch(LinQuboError, ValueError):
    pass


class NotSymmetric(LinQuboError, ValueError):
    pass


class NotPSD(LinQuboError, ValueError):
    pass


class NotRepresentable(LinQuboError, ValueError):
    pass


class TooLarge(LinQuboError, ValueError):
    pass


class ParseError(LinQuboError, ValueError):
    """Malformed input file.

    ``line`` is 1-based when known; ``field`` names the offending key.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DuplicateEntry(ParseError):
    pass


class SingularWarning(UserWarning):
    """A pivot of the Gram matrix vanished; the system is rank deficient."""
