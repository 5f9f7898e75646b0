"""Exception hierarchy shared across the package."""


class LoopError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedStructureError(LoopError):
    """The input lacks a structural property the operation requires
    (two-sided inverses, latin property, odd order, ...)."""


class NonPowerAssociativeError(UnsupportedStructureError):
    """Left powers of an element never reach the identity within n steps."""


class PreconditionError(LoopError):
    """A documented precondition failed (e.g. the factor loop is not in
    the requested variety)."""


class RefusalError(PreconditionError):
    """The operation was refused because it would exceed a configured
    resource limit (coset-count limit, incomplete factor catalog)."""


class InternalConsistencyError(LoopError):
    """An internal invariant that should be unreachable was violated."""
