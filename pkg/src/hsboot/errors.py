"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes, so each class corresponds to one
failure category rather than one call site.
"""

from __future__ import annotations


class HsbootError(Exception):
    """Base class for all package errors."""


class ParameterError(HsbootError, ValueError):
    """A caller-supplied parameter is out of range or inconsistent."""


class DomainError(ParameterError):
    """An arithmetic operation is undefined for its operands."""


class SpecMismatchError(DomainError):
    """Operands belong to different fields."""


class FormatError(ParameterError):
    """Malformed serialized input or ragged data."""


class PreconditionError(ParameterError):
    """A documented precondition of an operation does not hold."""


class InfeasibleError(ParameterError):
    """The requested object cannot be guaranteed to exist."""


class FieldTooSmallError(ParameterError):
    """The field has too few elements for the requested construction."""

    def __init__(self, message: str, needed: int | None = None):
        super().__init__(message)
        self.needed = needed


class ResourceError(HsbootError):
    """A configured size budget would be exceeded."""

    def __init__(self, message: str, projected: int | None = None):
        super().__init__(message)
        self.projected = projected
