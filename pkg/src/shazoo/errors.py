"""Exception hierarchy shared across the package.

Two broad families matter for callers: :class:`DataError` (bad input files,
broken graph invariants, inconsistent states) and :class:`ConfigError`
(invalid parameters or unsupported mode combinations).  The CLI maps them to
exit codes 1 and 2 respectively.
"""


class ShazooError(Exception):
    """Base class for every error raised by this package."""


class DataError(ShazooError):
    """Invalid input data: malformed files or violated graph invariants."""


class ConfigError(ShazooError):
    """Invalid configuration, parameters, or mode for an operation."""


class EdgeListError(DataError):
    """Malformed edge-list or label stream; carries the offending line."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"{message} (line {line_number})"
        super().__init__(message)
        self.line_number = line_number


class CycleDetected(DataError):
    """The edge set contains a cycle where a tree was required."""


class Disconnected(DataError):
    """The graph is not connected where connectivity was required."""


class RevealedQuery(DataError):
    """A prediction or cut query was issued for an already revealed node."""


class SignedModeRequired(ConfigError):
    """The operation only makes sense on graphs built in signed mode."""


class PositiveWeightsRequired(ConfigError):
    """The operation needs strictly positive weights (got a negative one)."""


class DegenerateSigma(DataError):
    """A kNN kernel bandwidth collapsed to zero (duplicate points)."""

    def __init__(self, node):
        super().__init__(f"zero kernel bandwidth around node {node}; "
                         "duplicate points dominate its neighborhood")
        self.node = node


class NoTrainingLabels(DataError):
    """Label propagation was asked to solve a system with no clamped nodes."""
