"""Exception hierarchy shared by every layer of the interpreter."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Span:
    file: str
    line: int
    col: int
    end_col: int | None = None

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: Span | None = None

    def __str__(self) -> str:
        if self.span is None:
            return self.message
        return f"{self.span}: {self.message}"


class KBError(Exception):
    """Base class for all errors raised by kbscript."""


class ParseError(KBError):
    def __init__(self, message: str, span: Span | None = None, diagnostics=None):
        self.span = span
        self.diagnostics = list(diagnostics) if diagnostics else [Diagnostic(message, span)]
        super().__init__(message if span is None else f"{span}: {message}")


class ResolveError(ParseError):
    pass


class SortError(ParseError):
    pass


class StructureError(KBError):
    pass


class ConflictError(StructureError):
    pass


class DomainError(StructureError):
    pass


class OracleError(StructureError):
    pass


class UnboundedSortError(KBError):
    pass


class GroundingError(KBError):
    pass


class DivisionByZero(GroundingError):
    pass


class RangeError(GroundingError):
    pass


class InferenceError(KBError):
    pass


class NotTwoValuedError(InferenceError):
    pass


class OpenSymbolUnknownError(InferenceError):
    pass


class SolverTimeout(InferenceError, TimeoutError):
    pass


class ExportUnsupportedError(InferenceError):
    pass


class ShapeError(InferenceError):
    pass
