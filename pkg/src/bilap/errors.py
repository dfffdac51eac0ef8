"""Exception types raised across the package."""


class BilapError(ValueError):
    """Base class for all domain errors raised by bilap."""


class BandLimitExceeded(BilapError):
    """Input spectrum carries energy above the dealiasing cutoff."""


class DomainError(BilapError):
    """A parameter lies outside the range where an operator is defined."""


class DimensionError(BilapError):
    """Operation requires a different torus dimension."""


class ScaleRangeError(BilapError):
    """Spectrum or sampling lattice is not covered by the dyadic scale range."""


class DegenerateInput(BilapError):
    """A normalizing quantity is too small for a ratio to be meaningful."""
