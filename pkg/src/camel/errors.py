"""Exception hierarchy shared by every compiler stage."""

from __future__ import annotations


class CamelError(Exception):
    """Base class for user-facing compiler errors (CLI exit code 1)."""


class QasmSyntaxError(CamelError):
    def __init__(self, message: str, line: int, column: int, token: str):
        super().__init__(f"{message} at line {line}, column {column}: {token!r}")
        self.line = line
        self.column = column
        self.token = token


class UnsupportedGate(CamelError):
    def __init__(self, name: str):
        super().__init__(f"unsupported gate {name!r}")
        self.name = name


class QubitOutOfRange(CamelError):
    pass


class NotDownwardClosed(CamelError):
    pass


class MissingDuration(CamelError):
    pass


class InvalidDimensions(CamelError):
    pass


class DisconnectedGraph(CamelError):
    pass


class WindowTooLarge(CamelError):
    pass


class SchemaError(CamelError):
    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class CircuitTooLarge(CamelError):
    pass


class NoProgress(CamelError):
    pass


class CycleIntroduced(CamelError):
    pass


class TooManyQubits(CamelError):
    pass


class PatternMismatch(CamelError):
    pass


class TooLarge(CamelError):
    pass


class UnknownBenchmark(CamelError):
    pass


class InvariantViolation(Exception):
    """Raised by validators when a compiled result breaks a guaranteed property.

    Deliberately not a CamelError: it signals a compiler bug (CLI exit code 2).
    """
