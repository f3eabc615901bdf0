"""Exception hierarchy shared by the cycle, emissions and surrogate code."""


class TurboshaftError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TurboshaftError, ValueError):
    """An input lies outside the validity window of a correlation or model."""


class InfeasibleError(TurboshaftError):
    """A component cannot reach a thermodynamically admissible state.

    ``station`` names the component or station where the violation occurred.
    """

    def __init__(self, station, message):
        super().__init__(f"{station}: {message}")
        self.station = station


class SolverError(TurboshaftError):
    """A fixed-point or iterative solve failed to converge."""

    def __init__(self, message, residual=None):
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)
        self.residual = residual


class IntegrationError(TurboshaftError):
    """The NO kinetics integration produced a non-finite value."""


class EnvelopeError(TurboshaftError):
    """A sampling envelope is malformed, out of range, or yields too few feasible points."""


class NormalizationError(TurboshaftError, ValueError):
    pass


class FormatError(TurboshaftError, ValueError):
    """A dataset, model or config file is malformed or of the wrong version."""


class TrainingDivergedError(TurboshaftError):
    def __init__(self, epoch):
        super().__init__(f"training loss became non-finite at epoch {epoch}")
        self.epoch = epoch
