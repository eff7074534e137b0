"""Exception types shared across the solver and the benchmark harness."""


class ResolutionError(ValueError):
    """A grid is too coarse for the requested number of modes."""


class AlignmentError(ValueError):
    """A time interval is not aligned to the fine sampling grid."""


class BlowupError(RuntimeError):
    """A simulated path left the numerically trusted range.

    Raised when a drift evaluation produces non-finite values or a state
    coefficient exceeds the blowup threshold.  Carries enough context to
    point at the offending step and Monte Carlo sample.
    """

    def __init__(self, message: str, *, step_index: int | None = None,
                 sample_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index
        self.sample_index = sample_index
