from __future__ import annotations


class DiracGraphError(Exception):
    """Base class for every error raised by diracgraph."""


class GraphError(DiracGraphError, ValueError):
    pass


class ConfigError(DiracGraphError, ValueError):
    pass


class BoundaryError(DiracGraphError, ValueError):
    pass


class CheckpointError(DiracGraphError, ValueError):
    pass


class InstabilityError(DiracGraphError, RuntimeError):
    """Raised when the overflow guard trips or a non-finite value appears."""

    def __init__(self, step: int, magnitude: float, threshold: float) -> None:
        self.step = step
        self.magnitude = magnitude
        self.threshold = threshold
        super().__init__(
            f"numerical instability at step {step}: max |value| = {magnitude:.6g} "
            f"exceeds guard {threshold:.6g}"
        )
