"""Exception types shared by the solver, the sweep runner and the CLI."""

from __future__ import annotations


class ThueError(Exception):
    """Base class for errors raised by binthue."""


class PrecisionError(ThueError, ValueError):
    """A precision request outside what the numerics layer will attempt."""


class PrecisionExhausted(ThueError):
    """A partial quotient stayed ambiguous up to the precision cap."""

    def __init__(self, m: int, n: int, j: int, digits: int):
        self.m = m
        self.n = n
        self.j = j
        self.digits = digits
        super().__init__(
            f"partial quotient a_{j} of {m}^(1/{n}) still ambiguous at {digits} digits"
        )


class ReducibleInputError(ThueError, ValueError):
    """x^n - m factors over the rationals, so the equation is skipped."""

    def __init__(self, n: int, m: int):
        self.n = n
        self.m = m
        super().__init__(f"x^{n} - {m} is reducible")


class FixtureParseError(ThueError, ValueError):
    """A solutions CSV could not be parsed."""

    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class CheckpointMismatch(ThueError, ValueError):
    """A checkpoint belongs to a different sweep configuration."""
