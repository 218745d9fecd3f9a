"""Exception types shared across the package."""

from __future__ import annotations


class RankTwoError(Exception):
    """Base class for library errors."""


class DfaoFormatError(RankTwoError):
    """Malformed automaton text; carries a 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class BudgetExceededError(RankTwoError):
    """An operation hit a resource cap; carries the stage and the cap."""

    def __init__(self, stage: str, cap, detail: str = ""):
        msg = f"budget exceeded at {stage} (cap {cap})"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.stage = stage
        self.cap = cap


class InfiniteLanguageError(RankTwoError):
    """Enumeration asked for a provably infinite set of values."""


class EnumerationLimitError(RankTwoError):
    """The accepted set is finite but larger than the requested limit."""
