"""Exception hierarchy shared by all polent modules."""


class PolentError(Exception):
    """Base class for every error raised by polent."""


class InvalidArgumentError(PolentError, ValueError):
    pass


class DomainError(InvalidArgumentError):
    """A value lies outside the domain where the operation is defined."""


class DegenerateNormalizationError(InvalidArgumentError):
    """No shot-noise reference exists (all-zero weights, no carrier, ...)."""


class UnsupportedConfigurationError(InvalidArgumentError):
    pass


class CorrectionUndefinedError(DomainError):
    """A spectrum-analyzer reading sits at or below the electronic floor."""


class NumericalConsistencyError(PolentError):
    """A result violates a structural invariant (symmetry, PSD, orthogonality)."""


class TruncationError(NumericalConsistencyError):
    """A state has too much weight near the Fock-space cutoff."""


class OptimizerAmbiguityError(NumericalConsistencyError):
    def __init__(self, message, samples=None):
        super().__init__(message)
        self.samples = samples


class InconsistencyError(PolentError):
    """Measured data cannot be produced by the model for any parameter value."""

    def __init__(self, message, floor=None):
        super().__init__(message)
        self.floor = floor


class NotApplicableError(PolentError):
    """The precondition of a witness or measure does not hold for this state."""


class ConfigError(PolentError):
    """Invalid experiment configuration (schema, unknown keys, bad values)."""
