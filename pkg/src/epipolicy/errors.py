"""Exception taxonomy shared across the toolkit.

Errors carry enough context (row index, R-hat values, violation lists) for
the CLI and HTTP layers to produce useful diagnostics without string parsing.
"""
from __future__ import annotations


class EpipolicyError(Exception):
    """Base class for all toolkit errors."""


# --- data ingestion ---

class MalformedCsv(EpipolicyError):
    def __init__(self, message: str, row_index: int | None = None):
        self.row_index = row_index
        if row_index is not None:
            message = f"row {row_index}: {message}"
        super().__init__(message)


class UnknownCountry(EpipolicyError):
    pass


class EmptyWindow(EpipolicyError):
    pass


class TooFewPoints(EpipolicyError):
    pass


class DegenerateSeries(EpipolicyError):
    pass


# --- dynamics ---

class NonFiniteState(EpipolicyError):
    pass


# --- mcmc ---

class NonFiniteDensity(EpipolicyError):
    pass


class DivergentTrajectory(EpipolicyError):
    pass


class TooFewDraws(EpipolicyError):
    pass


class NotConverged(EpipolicyError):
    """Raised when chains fail the R-hat gate; carries per-parameter values."""

    def __init__(self, rhat: dict[str, float], threshold: float):
        self.rhat = rhat
        self.threshold = threshold
        worst = max(rhat.values()) if rhat else float("nan")
        super().__init__(
            f"chains did not converge: max R-hat {worst:.4f} >= {threshold}"
        )


# --- derived quantities ---

class ZeroSlope(EpipolicyError):
    pass


class ZeroBaseline(EpipolicyError):
    pass


# --- schedules and scenarios ---

class OverlappingBlocks(EpipolicyError):
    pass


class BlockOutOfRange(EpipolicyError):
    pass


class InvalidSchedule(EpipolicyError):
    """Raised when a schedule fails validation; carries the violation list."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class HorizonMismatch(EpipolicyError):
    pass


class SpaceTooLarge(EpipolicyError):
    def __init__(self, size: int, cap: int):
        self.size = size
        self.cap = cap
        super().__init__(f"search space has {size} schedules, cap is {cap}")
