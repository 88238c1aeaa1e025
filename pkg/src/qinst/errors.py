"""Exception types shared across the solver, trainer and harness."""


class QinstError(Exception):
    pass


class ArityMismatch(QinstError):
    pass


class SortMismatch(QinstError):
    pass


class UnboundVariable(QinstError):
    pass


class ParseError(QinstError):
    """Syntax error with source position."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.line = line
        self.col = col


class UnknownSymbol(QinstError):
    pass


class BlowupGuard(QinstError):
    pass


class NoTrigger(QinstError):
    pass


class WidthMismatch(QinstError):
    pass


class FormatError(QinstError):
    pass


class KindChecksumMismatch(QinstError):
    pass


class DegenerateData(QinstError):
    pass


class NotUnsat(QinstError):
    pass


class TooSmall(QinstError):
    pass
