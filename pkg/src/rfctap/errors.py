"""Exception types shared across the package."""


class RfctapError(Exception):
    """Base class for all package errors."""


class DomainError(RfctapError, ValueError):
    """An input violates a precondition (bad value, wrong range)."""


class ConfigError(RfctapError, ValueError):
    """Invalid experiment configuration.  Carries the offending field path."""

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class SingularityError(RfctapError, ValueError):
    """An off-resonant Stark denominator fell below the safety floor."""


class StitchingError(RfctapError, RuntimeError):
    """Adjacent resonance windows do not join within the stitching tolerance."""

    def __init__(self, boundary_index, jump, tol):
        self.boundary_index = boundary_index
        self.jump = jump
        self.tol = tol
        super().__init__(
            f"potential discontinuity at window boundary {boundary_index}: "
            f"|jump| = {jump:.3e} J exceeds tolerance {tol:.3e} J"
        )


class GeometryError(RfctapError, RuntimeError):
    """Trap geometry extraction failed (too few minima, merged wells)."""


class ScheduleError(RfctapError, ValueError):
    """A frequency schedule became invalid (comb ordering lost)."""


class StabilityError(RfctapError, ValueError):
    """Requested time step violates the solver stability rule."""


class ConvergenceError(RfctapError, RuntimeError):
    """Iterative solver did not reach the requested tolerance."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class ExtractionError(RfctapError, RuntimeError):
    """Tunneling-splitting extraction failed (doublet not resolved)."""
