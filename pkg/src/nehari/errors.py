"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid domain or run configuration (bad dim, extents, resolution, keys)."""


class ParameterError(ValueError):
    """A numeric parameter is outside its admissible range."""


class ContractError(ValueError):
    """Inputs violate an operation contract (shape or grid mismatch, non-finite data)."""


class DegenerateDirectionError(ValueError):
    """A ray operation received the zero field as its direction."""


class HypothesisViolationError(RuntimeError):
    """The configured functional fails the ray geometry the projection relies on.

    ``trace`` holds the (t, slope) evaluations seen before giving up, so a
    caller can inspect where the expected sign change never appeared.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class OracleFailureError(RuntimeError):
    """An independent reference computation could not produce an answer."""


class MultiStartError(RuntimeError):
    """Every restart of the minimizer failed; per-run statuses are attached."""

    def __init__(self, message, statuses):
        super().__init__(message)
        self.statuses = list(statuses)
