"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ContractViolation -> 2,
NumericalError -> 3, StorageError -> 4.
"""


class KsmetricsError(Exception):
    """Base class for all package errors."""


class ContractViolation(KsmetricsError):
    """An input violated a documented precondition or invariant."""


class NumericalError(KsmetricsError):
    """A numerical procedure failed to converge or lost accuracy."""


class DomainTooSmallError(NumericalError):
    """A bound-state solve leaked amplitude into the grid boundary."""


class QuadratureResolutionError(NumericalError):
    """A quadrature failed its internal self-check (e.g. normalization miss)."""


class StorageError(KsmetricsError):
    """Solution-file I/O failed (corrupt payload, version mismatch, paths)."""
