"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class GameError(Exception):
    """Base class for every error raised by dggames."""


class ValidationError(GameError, ValueError):
    """A game, situation or file violates a structural invariant.

    ``position`` names the offending position when there is one and ``line``
    carries the 1-based source line for parse errors.
    """

    def __init__(self, message: str, position: str | None = None, line: int | None = None,
                 column: int | None = None):
        self.message = message
        self.position = position
        self.line = line
        self.column = column
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{loc}: {message}"
        super().__init__(message)


class PreconditionError(GameError):
    """An operation was called on input outside its domain."""


class NotApplicable(PreconditionError):
    """A reduction rule does not apply to the given game."""


class CyclicGraphError(PreconditionError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("graph not acyclic: " + " -> ".join(cycle + cycle[:1]))


class InstanceTooLarge(GameError):
    """The situation space does not fit the enumeration index width or limit."""


class SolverInvariantError(GameError, AssertionError):
    """An internal consistency check of a constructive solver failed."""
