"""Barrier-array geometry, fixed units and spectrum-solver configuration.

Units are fixed: hbar = 1, m = 1/2 and the Boltzmann constant is 1, so the
free wavenumber is ``k = sqrt(e)`` and ``beta = 1/T``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Union


class Infinite:
    """Marker for the N -> infinity limit of the barrier count."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __str__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (Infinite, ())


INFINITE = Infinite()

BarrierCount = Union[int, Infinite]


class GeometryError(ValueError):
    """Invalid geometry or solver parameters."""


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 0.5
    boltzmann: float = 1.0


CONSTANTS = PhysicalConstants()


def parse_barrier_count(value) -> BarrierCount:
    """Accept an int, ``INFINITE`` or one of the strings 'inf'/'infinite'."""
    if value is INFINITE or isinstance(value, Infinite):
        return INFINITE
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "infinite", "infinity", "oo"):
            return INFINITE
        try:
            value = int(text)
        except ValueError:
            raise GeometryError(f"cannot parse barrier count {value!r}") from None
    if isinstance(value, float):
        if math.isinf(value):
            return INFINITE
        if not value.is_integer():
            raise GeometryError(f"barrier count must be an integer, got {value}")
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise GeometryError(f"barrier count must be an integer or 'inf', got {value!r}")
    return value


@dataclass(frozen=True)
class BarrierGeometry:
    """N identical rectangular barriers of height v packed into a length L.

    The barriers occupy a total width ``a`` and the N-1 gaps between them a
    total width ``b = c a``; the array spans ``[-L/2, L/2]``.
    """

    L: float
    N: BarrierCount
    c: float
    v: float

    @property
    def infinite(self) -> bool:
        return self.N is INFINITE

    @property
    def a(self) -> float:
        return self.L / (1.0 + self.c)

    @property
    def b(self) -> float:
        return self.L * self.c / (1.0 + self.c)

    @property
    def cell_width(self) -> float:
        if self.infinite:
            raise GeometryError("cell width is zero for infinitely many barriers")
        return self.a / self.N

    @property
    def gap_width(self) -> float:
        if self.infinite:
            raise GeometryError("gap width is zero for infinitely many barriers")
        return self.b / (self.N - 1)

    @property
    def mean_potential(self) -> float:
        """Spatial average of the potential over the array, v a / L."""
        return self.v / (1.0 + self.c)

    def label(self) -> str:
        return f"N={self.N}, c={self.c:g}"

    def to_dict(self) -> dict:
        return {"L": self.L, "N": "inf" if self.infinite else self.N, "c": self.c, "v": self.v}


def make_geometry(L: float, N, c: float, v: float, allow_free: bool = False) -> BarrierGeometry:
    """Validate parameters and build a :class:`BarrierGeometry`.

    ``allow_free=True`` admits ``v = 0``, the free-particle reference case.

    Raises
    ------
    GeometryError
        If ``L``, ``c`` or ``v`` is not a positive finite number, or a finite
        ``N`` is below 2 (the gap width b/(N-1) needs at least two barriers).
    """
    for name, val in (("L", L), ("c", c), ("v", v)):
        if not isinstance(val, (int, float)) or isinstance(val, bool):
            raise GeometryError(f"{name} must be a number, got {val!r}")
        free_ok = allow_free and name == "v" and val == 0
        if not math.isfinite(val) or (val <= 0 and not free_ok):
            raise GeometryError(f"{name} must be positive and finite, got {val}")
    count = parse_barrier_count(N)
    if count is not INFINITE and count < 2:
        raise GeometryError(f"barrier count below minimum: N={count} (need N >= 2 or 'inf')")
    return BarrierGeometry(L=float(L), N=count, c=float(c), v=float(v))


@dataclass(frozen=True)
class SpectrumConfig:
    """Periodic-box and root-finding parameters.

    ``C`` is the half-width of the periodic box ``[-C, C]``. Levels below
    ``e_split`` are found numerically; above it the analytic tail
    ``(pi n / C)**2, n >= n0`` takes over.
    """

    C: float = 90.0
    e_split: float = 1080.0
    e_min: float = 0.1
    dk: float = 0.004
    dedup_dk: float = 1e-6
    refine_rtol: float = 1e-12
    accept_rtol: float = 1e-8
    accept_atol: float = 1e-10
    tail_degeneracy: int = 1

    def __post_init__(self):
        for name in ("C", "e_split", "e_min", "dk", "dedup_dk", "refine_rtol", "accept_rtol"):
            val = getattr(self, name)
            if not math.isfinite(val) or val <= 0:
                raise GeometryError(f"{name} must be positive and finite, got {val}")
        if self.accept_atol < 0:
            raise GeometryError("accept_atol must be non-negative")
        if self.e_min >= self.e_split:
            raise GeometryError(f"e_min={self.e_min} must be below e_split={self.e_split}")
        if self.tail_degeneracy not in (1, 2):
            raise GeometryError("tail_degeneracy must be 1 or 2")

    @property
    def n0(self) -> int:
        """First tail index, the integer nearest (C/pi) sqrt(e_split)."""
        return max(int(round(self.C / math.pi * math.sqrt(self.e_split))), 0)

    def check_box(self, geom: BarrierGeometry) -> None:
        """Warn when the box is too small relative to the array (C/L < 4.5)."""
        if self.C / geom.L < 4.5:
            warnings.warn(
                f"C/L = {self.C / geom.L:.3g} is below 4.5; periodic boundaries sit close to the array",
                stacklevel=2,
            )
        if 2.0 * self.C <= geom.L:
            raise GeometryError(f"box [-C, C] with C={self.C} does not contain the array of length {geom.L}")

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "e_split": self.e_split,
            "e_min": self.e_min,
            "dk": self.dk,
            "dedup_dk": self.dedup_dk,
            "refine_rtol": self.refine_rtol,
            "accept_rtol": self.accept_rtol,
            "accept_atol": self.accept_atol,
            "tail_degeneracy": self.tail_degeneracy,
        }


REFERENCE_GEOMETRY = dict(L=20.0, v=60.0)
REFERENCE_CONFIG = SpectrumConfig()
