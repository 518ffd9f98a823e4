"""Thermodynamics of a particle in a periodic box containing a rectangular barrier array."""

from .geometry import (
    CONSTANTS,
    INFINITE,
    BarrierGeometry,
    GeometryError,
    SpectrumConfig,
    make_geometry,
    parse_barrier_count,
)
from .spectrum import EnergySpectrum, cached_find_levels, find_levels, free_spectrum, tail_energies

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "INFINITE",
    "BarrierGeometry",
    "GeometryError",
    "SpectrumConfig",
    "make_geometry",
    "parse_barrier_count",
    "EnergySpectrum",
    "find_levels",
    "cached_find_levels",
    "free_spectrum",
    "tail_energies",
]
