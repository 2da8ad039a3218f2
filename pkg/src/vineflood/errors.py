"""Exception hierarchy shared across the package."""


class VinefloodError(Exception):
    """Base class for all package errors."""


class ValidationError(VinefloodError):
    """Invalid input data or configuration (CLI exit code 2)."""


class NumericalError(VinefloodError):
    """Optimization or numerical failure (CLI exit code 3)."""


class StructureError(VinefloodError):
    """Invalid vine structure or conditioning request."""
