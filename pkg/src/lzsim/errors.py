"""Exception types shared across the package."""

from __future__ import annotations


class DomainError(ValueError):
    """An input violates a documented precondition (non-finite, out of range)."""


class IntegrationError(RuntimeError):
    """Propagation failed; ``last_good_time`` is the last trusted time in ns."""

    def __init__(self, message: str, last_good_time: float = 0.0):
        super().__init__(message)
        self.last_good_time = last_good_time


class ExtractionError(RuntimeError):
    """Splitting extraction failed; ``stage`` names the pipeline step."""

    def __init__(self, message: str, stage: str):
        super().__init__(message)
        self.stage = stage
