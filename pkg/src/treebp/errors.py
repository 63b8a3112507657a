"""Exception hierarchy shared by all treebp modules.

Every domain error derives from :class:`TreebpError` so callers (and the
CLI) can map failures to machine-readable names.
"""


class TreebpError(Exception):
    """Base class for all treebp domain errors."""


class SymmetryViolation(TreebpError):
    """A signed atom cloud does not satisfy the symmetric mass-ratio law."""


class NotAnLlrDistribution(TreebpError):
    """A signed distribution violates the LLR integral constraint."""


class TrivialDistribution(TreebpError):
    """An operation requiring non-trivial inputs received the point mass at 0."""


class AtomBudgetExceeded(TreebpError):
    """Exact convolution produced more atoms than the configured hard limit."""


class ExceptionalCase(TreebpError):
    """The BP operator is the identity map (no survey, degree 1, noiseless edge)."""


class UnboundedSurvey(TreebpError):
    """A survey law with unbounded support where a finite essential range is required."""


class TooLarge(TreebpError):
    """Problem size exceeds the exact-enumeration limit."""
