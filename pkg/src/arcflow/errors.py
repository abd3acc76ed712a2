"""Exception hierarchy shared by all arcflow modules."""


class ArcflowError(Exception):
    """Base class for every error raised by this package."""


class SpaceMismatchError(ArcflowError):
    """Two operands live on different metric spaces."""


class SamplerError(ArcflowError):
    """A space sampler failed to produce points."""


class PointEscapedError(ArcflowError):
    """A point left the representable region of its space.

    Carries enough context to reconstruct where the escape happened
    (fraction of the requested time, steps completed so far).
    """

    def __init__(self, message, steps_completed=None, time_fraction=None):
        super().__init__(message)
        self.steps_completed = steps_completed
        self.time_fraction = time_fraction


class CurveEscapedError(ArcflowError):
    """Curve evaluation escaped; ``index`` is the offending grid position."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class InsufficientDataError(ArcflowError):
    """Too few usable samples to produce an estimate or fit."""


class NoConvergenceError(ArcflowError):
    """Step doubling hit its cap before meeting the tolerance.

    ``result`` holds the last (best) SolveResult so callers can inspect
    the final Richardson estimate.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class SurfaceDegenerateError(ArcflowError):
    """Distinct surface parameters collided; transversality is suspect."""


class GridMismatchError(ArcflowError):
    """Grid functions with incompatible half-width or spacing."""


class WeightOverflowError(ArcflowError):
    """The Gaussian-inverse weight overflows on the target support."""


class ExpressionError(ArcflowError):
    """Arc-field expression failed to parse; names the offending token."""

    def __init__(self, message, token=None):
        super().__init__(message)
        self.token = token
