"""Exception types shared across the package."""

from __future__ import annotations


class TDLError(Exception):
    """Base class for all errors raised by tdl."""


class ParseError(TDLError, ValueError):
    """Malformed edge-list input.  Carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SpecError(TDLError, ValueError):
    """Parameters violate an ensemble or query precondition."""


class CapacityError(TDLError):
    """A request is well-formed but refused: too large, infeasible, or not achievable.

    ``constraint`` names the binding limit so callers can report it.
    """

    def __init__(self, message: str, constraint: str | None = None, required: int | None = None):
        self.constraint = constraint
        self.required = required
        super().__init__(message)


class RejectionBudgetExhausted(CapacityError):
    pass


class LemmaViolation(TDLError):
    """A counted graph broke one of the proven occupancy/link bounds."""

    def __init__(self, violations):
        self.violations = list(violations)
        head = "; ".join(str(v) for v in self.violations[:5])
        super().__init__(f"{len(self.violations)} lemma violation(s): {head}")
