"""Exception hierarchy shared by all gridcube modules.

Every error carries an ``exit_code`` so the CLI can map failures onto its
documented exit codes (2 precondition, 3 degeneracy, 4 size cap).
"""


class GridcubeError(Exception):
    exit_code = 1


class PreconditionError(GridcubeError):
    """An operation was called on input that violates its preconditions."""

    exit_code = 2


class InvalidSelectorError(PreconditionError):
    pass


class DimensionError(PreconditionError):
    pass


class NotStochasticKError(PreconditionError):
    """Matrix is not in stochastic K form; ``row`` names a violating row."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NotPMatrixError(PreconditionError):
    """A solver asserted the P-property and hit a singular representative."""


class DegenerateInstanceError(GridcubeError):
    """An exact zero was met where nondegeneracy is presupposed."""

    exit_code = 3


class TooLargeError(GridcubeError):
    """An enumeration would exceed the configured cap."""

    exit_code = 4
