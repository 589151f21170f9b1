"""Exception types shared across the library.

Every error condition a caller can trigger maps to one of these; the CLI
translates them to exit codes (config errors -> 2, size caps -> 3).
"""


class MacPolarError(Exception):
    """Base class for all library errors."""


class ZeroInverseError(MacPolarError, ZeroDivisionError):
    """Multiplicative inverse of zero requested."""


class NotFullRankError(MacPolarError, ValueError):
    """Matrix does not have the full rank required by the operation."""


class SingularMatrixError(MacPolarError, ValueError):
    """Square matrix is not invertible."""


class AmbientMismatchError(MacPolarError, ValueError):
    """Subspaces live in different ambient spaces (m or q differ)."""


class BadIndexSetError(MacPolarError, ValueError):
    """User index set is empty or out of range."""


class TooManyUsersError(MacPolarError, ValueError):
    """Operation restricted to a small user count."""


class BadRowSumError(MacPolarError, ValueError):
    """A conditional probability row does not sum to one."""

    def __init__(self, row, total):
        self.row = row
        self.total = total
        super().__init__(f"row {row} sums to {total!r}, expected 1")


class NegativeProbabilityError(MacPolarError, ValueError):
    """A conditional probability entry is negative."""

    def __init__(self, row, col, value):
        self.row = row
        self.col = col
        self.value = value
        super().__init__(f"entry ({row}, {col}) is negative: {value!r}")


class NotSingleUserError(MacPolarError, ValueError):
    """Operation requires a single-user channel (m = 1)."""


class TooLargeError(MacPolarError, ValueError):
    """A configured size cap would be exceeded."""


class TooDeepError(MacPolarError, ValueError):
    """Requested recursion depth exceeds the enumeration cap."""


class LengthMismatchError(MacPolarError, ValueError):
    """Branch signatures of different lengths compared."""


class SpecMismatchError(MacPolarError, ValueError):
    """Message, codeword or channel is inconsistent with the code spec."""


class BadGridError(MacPolarError, ValueError):
    """Probe grid is empty or malformed."""


class ParseError(MacPolarError, ValueError):
    """Input file could not be parsed; message carries the location."""
