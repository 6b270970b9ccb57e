"""Exception hierarchy for sepscope.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Optional


class SepscopeError(Exception):
    """Base class for every error raised by sepscope."""
    pass


class ConfigError(SepscopeError):
    """Raised when a configuration file or env override is invalid."""
    pass


class NonSquareError(SepscopeError):
    """Raised when an operation needs a square matrix."""
    pass


class NotHermitianError(SepscopeError):
    """Raised when a matrix is outside the hermiticity tolerance."""
    pass


class NoConvergenceError(SepscopeError):
    """Raised when an eigen- or singular-value solver fails to converge."""
    pass


class DimensionMismatchError(SepscopeError):
    """Raised when matrix shapes disagree with the declared local dimensions."""
    pass


class NotNormalizedError(SepscopeError):
    """Raised when a pure-state coefficient set is not unit norm."""
    pass


class EmptyTermListError(SepscopeError):
    """Raised when a tensor-sum decomposition has no terms."""
    pass


class NotSymmetricError(SepscopeError):
    """Raised when a symmetric-state operation gets a non-symmetric state."""
    pass


class ParamOutOfRangeError(SepscopeError):
    """Raised when a state-family parameter is outside its valid range."""
    pass


class DimensionTooSmallError(SepscopeError):
    """Raised when the truncation dimension cannot hold the family's support."""
    pass


class WeightsInvalidError(SepscopeError):
    """Raised when mixture weights are negative or do not sum to one."""
    pass


class SupportOverlapError(SepscopeError):
    """Raised when an admixed state touches a support it must avoid."""
    pass


class InsufficientDimsError(SepscopeError):
    """Raised when a stability check has fewer than two dimensions per point."""
    pass


class ParseError(SepscopeError):
    """Raised on malformed input text, with the 1-based location of the fault."""

    def __init__(self, message: str, line: int, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = f"line {line}" if column is None else f"line {line}, column {column}"
        super().__init__(f"{where}: {message}")


class ValidationError(SepscopeError):
    """Raised when a parsed or constructed state breaks a named invariant."""

    def __init__(self, invariant: str, message: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {message}")
