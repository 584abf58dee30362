"""Exception hierarchy shared across the package."""


class PurityWitnessError(ValueError):
    """Base class for all errors raised by this package."""


class DomainError(PurityWitnessError):
    """An argument lies outside the mathematically valid range."""


class DimensionError(PurityWitnessError):
    """A matrix or state has the wrong Hilbert-space dimension."""


class QubitAssumptionError(PurityWitnessError):
    """An observed value is incompatible with a two-dimensional system."""


class ConsistencyError(PurityWitnessError):
    """Mutually contradictory inputs (e.g. claimed purity vs. observed value)."""


class CountsFormatError(PurityWitnessError):
    """A counts file failed schema validation."""
