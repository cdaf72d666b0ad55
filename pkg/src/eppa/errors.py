"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: format and usage problems
exit 3, resource limits exit 2, failed predicates and verifications exit 1.
"""

from __future__ import annotations


class EppaError(Exception):
    """Base class for everything raised deliberately by this package."""


class GraphFormatError(EppaError):
    """Malformed graph, label, map, or witness data."""


class UnknownVertex(EppaError):
    """A vertex id that the graph or map does not contain."""


class InvalidMap(EppaError):
    """A map violating a precondition (totality, injectivity, isometry)."""


class NotAMetricSpace(EppaError):
    """An operation needing a metric space got something else."""


class DisconnectedGraph(EppaError):
    """An operation needing a connected graph got a disconnected one."""


class VertexCapExceeded(EppaError):
    """A construction would exceed the configured vertex cap."""

    def __init__(self, stage: str, needed: int, cap: int):
        self.stage = stage
        self.needed = needed
        self.cap = cap
        super().__init__(f"{stage}: needs {needed} vertices, cap is {cap}")


class BudgetExhausted(EppaError):
    """A bounded search ran out of budget before reaching a verdict."""
