"""Spectral numerics for bilinear multipliers, fractional Leibniz rules and
Littlewood-Paley theory on periodic grids."""

from .errors import (
    BandLimitExceeded,
    BilapError,
    DegenerateInput,
    DimensionError,
    DomainError,
    ScaleRangeError,
)
from .spectral_core import SpectralField, TorusGrid

__version__ = "0.1.0"

__all__ = [
    "BandLimitExceeded",
    "BilapError",
    "DegenerateInput",
    "DimensionError",
    "DomainError",
    "ScaleRangeError",
    "SpectralField",
    "TorusGrid",
    "__version__",
]
