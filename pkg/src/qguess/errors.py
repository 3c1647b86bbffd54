"""Exception hierarchy shared by every qguess module."""


class QGuessError(Exception):
    """Base class for all library errors."""


class ValidationError(QGuessError, ValueError):
    """Input violates a documented invariant.

    ``path`` names the offending location (for example ``states[2].p``) when
    the error comes from a parsed file.
    """

    def __init__(self, message, path=None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DegenerateOutcomeError(QGuessError, ValueError):
    """A measurement operator has zero probability under the ensemble."""


class SolverError(QGuessError, RuntimeError):
    """An iterative numerical routine failed to converge."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")


class RecoveryError(QGuessError, RuntimeError):
    """An optimal measurement could not be reconstructed from a solver result."""
