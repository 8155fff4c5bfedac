"""Exception types raised across the package."""


class ConfigurationError(ValueError):
    """Invalid optical, phantom, noise or solver parameters."""


class DegenerateOpticsError(ValueError):
    """Source and pupil do not overlap, so no background light reaches the camera."""


class SymmetryViolationError(ValueError):
    """A transfer function lacks the odd symmetry a real DPC kernel requires."""


class SingularDeconvolutionError(ZeroDivisionError):
    """A spectral division hit a zero denominator away from DC."""


class DivisionDegenerateError(ZeroDivisionError):
    """Raw intensities sum to zero at one or more pixels."""


class DivergenceError(RuntimeError):
    """An iterative solver produced a non-finite cost."""


class ManifestError(RuntimeError):
    """A manifest is unreadable, incomplete, or its checksums are stale."""
