"""Exception types shared across the toolkit."""


class LqGamesError(Exception):
    """Base class for all toolkit-specific failures."""


class SingularInertiaError(LqGamesError):
    """Inertia matrix is not invertible within the conditioning threshold."""


class DivergenceError(LqGamesError):
    """Integration produced a non-finite or runaway state."""


class NonHurwitzError(LqGamesError):
    """Lyapunov coefficient matrix has an eigenvalue with real part >= 0."""


class IndefiniteWeightError(LqGamesError):
    """An effort weight matrix that must be positive definite is not."""


class NoStabilizingSolutionError(LqGamesError):
    """Riccati iteration failed to produce a stabilizing solution."""


class NoConvergenceError(LqGamesError):
    """Coupled Riccati iteration exhausted its budget.

    Carries the last residuals of both players' equations so callers can
    report how far from a fixed point the iteration stopped.
    """

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class SingularWeightError(LqGamesError):
    """Combined state weight is singular and leaves the reference undetermined."""


class DegenerateNormalizerError(LqGamesError):
    """Nominal-effort normalizer is too small to divide by."""


class ScenarioValidationError(LqGamesError):
    """A scenario document failed schema or invariant validation."""
