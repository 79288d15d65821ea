"""Exception hierarchy shared by all hsframe modules.

The split mirrors the CLI exit codes: validation / precondition problems
(exit 2), numeric failures (exit 3), and file-level problems (exit 4).
"""


class HSFrameError(Exception):
    """Base class for all errors raised by hsframe."""


class ValidationError(HSFrameError):
    """Bad shapes, inconsistent dimensions, or violated preconditions."""


class NotAFrameError(ValidationError):
    """An operation that needs a frame got a family with lower bound zero."""


class NumericError(HSFrameError):
    """A numerical computation failed (solver breakdown, lost certificate)."""


class SectionSingularError(NumericError):
    """A sectional operator is numerically singular on its own section space.

    Usually means the rank tolerance used to build the section basis was
    too loose for the family at hand.
    """


class InternalConsistencyError(NumericError):
    """A certified inequality failed numerically; indicates a bug, not data."""


class ParseError(HSFrameError):
    """A file could not be parsed as the expected format."""
