"""Shared exception types raised across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Raised when operands act on mismatched numbers of qubits."""


class CapacityError(ValueError):
    """Raised when a request would exceed a documented size limit."""


class UnabsorbablePulseError(ValueError):
    """Raised when a pulse reaching the buffer cannot be folded into it."""


class BindingConflictError(ValueError):
    """Raised when gates sharing a slot would need incompatible new angles."""
