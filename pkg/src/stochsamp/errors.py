"""Exception types shared across the package."""


class InputValidationError(ValueError):
    """Malformed input: bad shapes, non-finite entries, out-of-range parameters."""


class SupportViolationError(InputValidationError):
    """A custom distribution assigns zero probability to an index with a
    nonzero interaction vector."""


class DegenerateModelError(InputValidationError):
    """The model carries no usable information (e.g. the Gram section has
    zero trace)."""


class DegenerateVarianceError(InputValidationError):
    """A tail bound was requested with zero variance scale, where the bound
    is vacuous."""


class BoundValidityError(ValueError):
    """The requested deviation is below the admissible threshold of the tail
    bound.  Carries the threshold so callers can adjust."""

    def __init__(self, message: str, threshold: float):
        super().__init__(message)
        self.threshold = threshold


class NumericalAccuracyError(RuntimeError):
    """An adaptive numerical procedure hit its resolution cap without
    converging to the requested accuracy."""


class TruncationError(InputValidationError):
    """A requested truncation retains too little mass for reliable use."""
