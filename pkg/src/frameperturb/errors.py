"""Exception types raised by the library.

All of them derive from ``ValueError`` or ``ArithmeticError`` so callers that
only care about "bad input" vs "numerical failure" can catch the builtins.
"""


class DimensionMismatch(ValueError):
    """Objects living in different spaces, or sequences of different length."""


class FrameError(ValueError):
    """An operation that requires a frame received a non-frame pair."""


class EnumerationCapExceeded(ValueError):
    """Exact sign enumeration requested beyond the configured cap."""


class CriterionNotSatisfied(RuntimeError):
    """Emission attempted on a candidate whose criterion did not hold."""


class NeumannError(ArithmeticError):
    """The Neumann series cannot be certified (Q >= 1 or iteration cap hit)."""
