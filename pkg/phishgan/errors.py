"""Exceptions raised across the package."""

from __future__ import annotations


class PhishGanError(Exception):
    """Base class for errors raised by phishgan."""


class ShapeError(PhishGanError, ValueError):
    """A tensor does not have the shape a layer or loss expects."""

    def __init__(self, where: str, expected, actual) -> None:
        self.where = where
        self.expected = tuple(expected) if expected is not None else None
        self.actual = tuple(actual)
        super().__init__(
            f"{where}: expected input shape {self.expected}, got {self.actual}"
        )


class DataError(PhishGanError):
    """An input dataset cannot be read or contains invalid rows."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CheckpointError(PhishGanError):
    """A checkpoint file is malformed or was written by another format version."""


class NumericAbort(PhishGanError, ArithmeticError):
    """Training produced a non-finite loss."""

    def __init__(self, term: str, iteration: int, value: float) -> None:
        self.term = term
        self.iteration = iteration
        self.value = value
        super().__init__(
            f"non-finite loss term {term}={value!r} at iteration {iteration}"
        )


class GradientCheckError(PhishGanError):
    """A gradient check could not be carried out."""
