#!/usr/bin/env python3
"""
Exception hierarchy for the hierarchical-environment simulator.

Every error knows the process exit code the CLI should use and can render
itself as a flat, JSON-ready record.
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_VALIDATION = 3
EXIT_SOLVER = 4
EXIT_BRACKET = 5
EXIT_VARIANT = 6


class HierarchicalEnvError(Exception):
    """Base class for all simulator errors."""

    exit_code = EXIT_UNEXPECTED

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_record(self) -> Dict[str, Any]:
        """Return a machine-readable error record."""
        record = {
            'error': type(self).__name__,
            'message': self.message,
            'exit_code': self.exit_code,
        }
        if self.field is not None:
            record['field'] = self.field
        return record


class NonPhysicalParameter(HierarchicalEnvError):
    """A model or solver parameter lies outside its physical range."""

    exit_code = EXIT_VALIDATION

    def __init__(self, field: str, value: Any, reason: str):
        super().__init__(f"{field}={value!r}: {reason}", field=field)
        self.value = value


class ConfigError(HierarchicalEnvError):
    """The run configuration could not be parsed."""

    exit_code = EXIT_VALIDATION


class VariantMismatch(HierarchicalEnvError):
    """An operation was called with the wrong second-layer environment variant."""

    exit_code = EXIT_VARIANT


class StepSizeUnderflow(HierarchicalEnvError):
    """The adaptive integrator could not make progress."""

    exit_code = EXIT_SOLVER


class InvalidState(HierarchicalEnvError):
    """A qubit density matrix violates hermiticity, unit trace or positivity."""

    exit_code = EXIT_VALIDATION


class NoCrossoverInBracket(HierarchicalEnvError):
    """Both ends of a bisection bracket carry the same label."""

    exit_code = EXIT_BRACKET
