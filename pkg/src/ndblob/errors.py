"""Exception hierarchy for the ndblob package.

Every error raised by this library derives from :class:`BlobError`, so
callers can catch one type at the boundary (the SQL adapter and the CLI
both do exactly that).
"""


class BlobError(Exception):
    """Base class for all ndblob errors."""


class FormatError(BlobError):
    """Malformed blob bytes: bad header fields, truncation, length mismatch."""


class ShapeError(BlobError):
    """Rank or element-count mismatch between an operation and its operands."""


class BoundsError(BlobError):
    """An index or range falls outside the array extent."""


class RangeError(BlobError):
    """A value is not representable in the target element type."""


class TypeMismatchError(BlobError):
    """Runtime tag check failed: wrong element type or storage class."""


class CapacityError(BlobError):
    """The array does not satisfy the short storage-class limits."""


class DuplicateCellError(BlobError):
    """The same cell was assigned twice while assembling an array from rows."""


class CoverageError(BlobError):
    """Strict assembly finished with unassigned cells."""


class TextParseError(BlobError):
    """Array text form is ill-formed; `position` is the character offset."""

    def __init__(self, message, position=None):
        super().__init__(message if position is None
                         else f"{message} (at position {position})")
        self.position = position


class BackendError(BlobError):
    """A math backend failed registration, lookup, or convergence."""


class NonConvergenceError(BackendError):
    """Iterative decomposition did not converge within its sweep cap."""
