"""Canonical-ensemble observables of a spectrum.

All sums are taken relative to the lowest level ``e0``: weights are
``exp(-beta (e - e0))`` so that the dominant term is 1 and nothing
overflows at low temperature. The variance is accumulated about the mean
(two passes) instead of as ``E2/Z - (E1/Z)**2`` to avoid cancellation when
one level dominates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .geometry import SpectrumConfig
from .spectrum import EnergySpectrum, free_spectrum

LOG_WEIGHT_FLOOR = -700.0
TAIL_EXPONENT_CUTOFF = -40.0
MAX_TAIL_TERMS = 10_000_000
_TAIL_CHUNK = 1_000_000

CSV_COLUMNS = ("T", "avg_energy", "specific_heat", "entropy", "free_energy")


class ThermoError(ArithmeticError):
    """The requested temperature cannot be handled by direct summation."""


@dataclass(frozen=True)
class PartitionSums:
    """Boltzmann sums at one ``beta``.

    ``Z``, ``E1``, ``E2`` are the plain sums of ``w``, ``e w`` and ``e**2 w``
    with ``w = exp(-beta e)``. ``Z_shifted`` and ``central2`` (the sum of
    ``(e - mean)**2 w``) are relative to the shift ``e0`` and are what the
    observables use.
    """

    beta: float
    Z: float
    E1: float
    E2: float
    tail_terms_used: int
    e0: float
    Z_shifted: float
    central2: float
    mean: float


def _tail_range(spec: EnergySpectrum, beta: float, e0: float):
    tail = spec.tail
    # last n with beta (e_n - e0) <= 40
    n_max = int(math.floor(tail.C / math.pi * math.sqrt(max(e0 - TAIL_EXPONENT_CUTOFF / beta, 0.0))))
    n_from = tail.n0
    if n_max < n_from:
        return n_from, n_from
    if n_max - n_from + 1 > MAX_TAIL_TERMS:
        raise ThermoError(
            f"beta={beta:g} needs {n_max - n_from + 1} tail terms (cap {MAX_TAIL_TERMS}); "
            "use a larger beta or an analytic high-temperature approximation"
        )
    return n_from, n_max + 1


def _tail_chunks(spec: EnergySpectrum, lo: int, hi: int):
    for start in range(lo, hi, _TAIL_CHUNK):
        n = np.arange(start, min(hi, start + _TAIL_CHUNK), dtype=float)
        yield spec.tail.energy(n)


def partition_sums(spec: EnergySpectrum, beta: float) -> PartitionSums:
    if not (beta > 0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    levels = spec.levels
    e_tail0 = float(spec.tail.energy(spec.tail.n0))
    e0 = min(float(levels[0]) if len(levels) else e_tail0, e_tail0)
    tail_lo, tail_hi = _tail_range(spec, beta, e0)
    g = spec.tail.degeneracy

    parts_e, parts_w = [], []
    x = -beta * (levels - e0)
    keep = x > LOG_WEIGHT_FLOOR
    parts_e.append(levels[keep])
    parts_w.append(np.exp(x[keep]))
    for e in _tail_chunks(spec, tail_lo, tail_hi):
        x = -beta * (e - e0)
        keep = x > LOG_WEIGHT_FLOOR
        parts_e.append(np.repeat(e[keep], g))
        parts_w.append(np.repeat(np.exp(x[keep]), g))
    e = np.concatenate(parts_e)
    w = np.concatenate(parts_w)
    if not len(w):
        raise ThermoError("no level carries a representable Boltzmann weight")

    zs = math.fsum(w)
    e1s = math.fsum(w * e)
    mean = e1s / zs
    c2 = math.fsum(w * (e - mean) ** 2)
    e2s = math.fsum(w * e * e)
    scale = math.exp(-beta * e0)
    return PartitionSums(
        beta=beta,
        Z=zs * scale,
        E1=e1s * scale,
        E2=e2s * scale,
        tail_terms_used=max(tail_hi - tail_lo, 0) * g,
        e0=e0,
        Z_shifted=zs,
        central2=c2,
        mean=mean,
    )


class Observables(NamedTuple):
    avg_energy: float
    specific_heat: float
    entropy: float
    free_energy: float


def _from_sums(ps: PartitionSums) -> Observables:
    T = 1.0 / ps.beta
    zs = ps.Z_shifted
    mean = ps.mean
    var = ps.central2 / zs
    ln_z = math.log(zs) - ps.beta * ps.e0
    return Observables(
        avg_energy=mean,
        specific_heat=var / (T * T),
        entropy=ln_z + ps.beta * mean,
        free_energy=-T * ln_z,
    )


def observables(spec: EnergySpectrum, T: float) -> Observables:
    """(<e>, C_h, S, F) at temperature ``T`` with k_B = 1."""
    if not (T > 0 and math.isfinite(T)):
        raise ValueError(f"temperature must be positive and finite, got {T}")
    return _from_sums(partition_sums(spec, 1.0 / T))


def c_infinity_observables(config: SpectrumConfig, T: float) -> tuple[float, float]:
    """<e> and C_h for the gapless limit: levels (pi n / C)**2 for n = 0, 1, 2, ..."""
    obs = observables(free_spectrum(config, n_from=0), T)
    return obs.avg_energy, obs.specific_heat


def log_grid(t_min: float = 0.1, t_max: float = 100.0, count: int = 600) -> np.ndarray:
    return temperature_grid(t_min, t_max, count, "log")


def temperature_grid(t_min: float, t_max: float, count: int, spacing: str = "log") -> np.ndarray:
    if count < 1:
        raise ValueError("temperature grid is empty")
    if not (0 < t_min <= t_max) or not math.isfinite(t_max):
        raise ValueError(f"invalid temperature range [{t_min}, {t_max}]")
    if count > 1 and t_min == t_max:
        raise ValueError("temperature range has zero width")
    if spacing == "log":
        return np.geomspace(t_min, t_max, count)
    if spacing == "lin":
        return np.linspace(t_min, t_max, count)
    raise ValueError(f"unknown spacing {spacing!r}")


@dataclass
class ThermoCurve:
    N: object
    c: float
    T: np.ndarray
    avg_energy: np.ndarray
    specific_heat: np.ndarray
    entropy: np.ndarray
    free_energy: np.ndarray

    def __len__(self) -> int:
        return len(self.T)

    @property
    def label(self) -> str:
        return f"N={self.N}, c={self.c:g}"

    def violations(self, rel_tol: float = 1e-12) -> list[str]:
        """Curve invariants that fail; ``rel_tol`` only absorbs rounding in S."""
        out = []
        if np.any(np.diff(self.T) <= 0):
            out.append("T not strictly increasing")
        if np.any(self.specific_heat < 0):
            out.append("negative specific heat")
        slack = rel_tol * np.maximum(1.0, np.abs(self.entropy[1:]))
        if np.any(np.diff(self.entropy) < -slack):
            out.append("entropy decreases")
        return out

    def to_csv(self, path) -> None:
        from .spectrum import atomic_write_text

        rows = [",".join(CSV_COLUMNS)]
        for row in zip(self.T, self.avg_energy, self.specific_heat, self.entropy, self.free_energy):
            rows.append(",".join(f"{float(x):.17g}" for x in row))
        atomic_write_text(Path(path), "\n".join(rows) + "\n")

    @classmethod
    def from_csv(cls, path, N=None, c=float("nan")) -> "ThermoCurve":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(header) != CSV_COLUMNS:
                raise ValueError(f"{path}: unexpected columns {header}")
            data = np.array([[float(x) for x in row] for row in reader if row])
        if data.size == 0:
            raise ValueError(f"{path}: no samples")
        return cls(N, c, *(data[:, i] for i in range(5)))


def build_curve(spec: EnergySpectrum, T_grid=None, N=None, c=None) -> ThermoCurve:
    """Sample all observables on ``T_grid`` (default 600 log-spaced points in [0.1, 100])."""
    T = log_grid() if T_grid is None else np.asarray(T_grid, dtype=float)
    if T.ndim != 1 or len(T) == 0:
        raise ValueError("temperature grid is empty")
    if np.any(T <= 0) or np.any(np.diff(T) <= 0):
        raise ValueError("temperature grid must be positive and strictly increasing")
    rows = np.array([observables(spec, float(t)) for t in T])
    if N is None and spec.geometry is not None:
        N = spec.geometry.N
    if c is None:
        c = spec.geometry.c if spec.geometry is not None else float("inf")
    return ThermoCurve(N, c, T, rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3])


def c_infinity_curve(config: SpectrumConfig, T_grid=None) -> ThermoCurve:
    return build_curve(free_spectrum(config, n_from=0), T_grid, N="any", c=float("inf"))
