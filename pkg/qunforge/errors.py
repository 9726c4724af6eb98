"""
Exception hierarchy for the workbench.

Library code raises these; main.py maps them to exit codes.
"""


class WorkbenchError(Exception):
    """Base class for every error raised by the workbench."""


class DimensionMismatchError(WorkbenchError, ValueError):
    """Register layouts or matrix shapes do not fit together, or a state is malformed."""


class InvalidParameterError(WorkbenchError, ValueError):
    """A numeric parameter (mu, epsilon, kappa, a bit width, ...) is out of range."""


class OracleError(WorkbenchError):
    """An oracle was queried with a state it cannot act on."""


class QueryBudgetError(WorkbenchError):
    """An adversary issued more queries than the game allows."""


class ManifestError(WorkbenchError):
    """An experiment manifest or config file failed validation."""


class TranscriptError(WorkbenchError):
    """A game transcript was used out of order."""
