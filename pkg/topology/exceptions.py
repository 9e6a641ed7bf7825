"""
Error types for persistence computations.

Everything derives from ValueError so callers that only guard against bad
input keep working; the subclasses let the CLI and API tell causes apart.
"""


class TopologyError(ValueError):
    """Base class for all invalid-input errors raised by the topology app."""


class InvalidSimplexError(TopologyError):
    """Vertex list is empty or not made of non-negative integers."""


class ComplexValidationError(TopologyError):
    """A complex failed validate(); `violations` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        preview = '; '.join(str(v) for v in self.violations[:5])
        more = '' if len(self.violations) <= 5 else f' (+{len(self.violations) - 5} more)'
        super().__init__(f"Invalid filtered complex: {preview}{more}")


class ArityError(TopologyError):
    """Length or dimension of an input does not match what the operation expects."""


class EmptyInputError(TopologyError):
    """An operation that needs at least one element received none."""


class TooSmallError(TopologyError):
    """Too few points to build the requested complex."""


class DegeneracyError(TopologyError):
    """Input points are in a configuration the triangulation cannot resolve."""


class InvalidMetricError(TopologyError):
    """Distance matrix is not symmetric, non-negative, with zero diagonal."""


class InvalidTruncationError(TopologyError):
    """Truncation value lies below the largest filtration value."""


class KernelDomainError(TopologyError):
    """Kernel parameter outside its domain (non-positive bandwidth, negative bound, ...)."""


class UnboundedBandwidthError(TopologyError):
    """No finite bandwidth reaches the requested Lipschitz target."""


# Failures of a persistence pipeline that are mapped to the empty state by summaries.
EMPTY_STATE_ERRORS = (EmptyInputError, TooSmallError, DegeneracyError)
