"""Exception types shared across the package."""


class GnlstabError(Exception):
    """Base class for every package-specific error."""


class ParameterError(GnlstabError, ValueError):
    """Invalid argument or violated precondition."""


class BasisError(ParameterError):
    """Requested parity basis is incompatible with the operator's potential."""


class DegenerateSolutionError(GnlstabError):
    """An iteration collapsed onto the zero field."""


class ConvergenceError(GnlstabError):
    """An iterative solve failed to reach its tolerance.

    Carries the last iterate and its gradient/residual norm so a caller can
    inspect (or restart from) the best available state.
    """

    def __init__(self, message, last_iterate=None, gradient_norm=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.gradient_norm = gradient_norm


class NewtonBasinError(ParameterError):
    """Residual too large for a Newton polish to be trusted."""


class SingularJacobianError(GnlstabError):
    """Newton linearization is singular on the search subspace."""


class InvalidMultiplierError(ParameterError):
    """Lagrange multiplier must be positive for the unit rescaling."""


class ReductionError(GnlstabError):
    """A complex pair is not a common phase times one real profile."""


class WaveAcceptanceError(GnlstabError):
    """A computed profile violates the acceptance checks for its parity class."""


class NumericalConsistencyError(GnlstabError):
    """Two independent discretizations of the same quantity disagree."""


class IntegratorError(GnlstabError):
    """Time integration became unstable for the chosen step size."""


class FormatError(GnlstabError, ValueError):
    """Serialized record is malformed or has an unsupported schema version."""
