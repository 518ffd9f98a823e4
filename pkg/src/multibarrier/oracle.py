"""Brute-force scattering and quantization by direct boundary matching.

Nothing here touches transfer matrices. The wavefunction is written region
by region, continuity of psi and psi' is imposed at every interface, and the
resulting linear system is solved (scattering) or tested for singularity
(periodic box). Exponentials under a barrier are anchored at the region edge
where they are largest, so every basis function is bounded by one inside its
own region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded, svdvals

from .geometry import BarrierGeometry, SpectrumConfig

AT_BARRIER_ATOL = 1e-12


@dataclass(frozen=True)
class Region:
    x_start: float
    x_end: float
    potential: float

    @property
    def length(self) -> float:
        return self.x_end - self.x_start


@dataclass(frozen=True)
class RegionDecomposition:
    """Outer-left region, barriers interleaved with gaps, outer-right region.

    The outer regions are semi-infinite for scattering; ``x_start`` of the
    first and ``x_end`` of the last are set to the box edges when a box is
    given and to +-inf otherwise. For N = infinity the array is replaced by a
    single uniform barrier of the mean height v/(1+c), which has the same
    transfer matrix as the N -> infinity limit.
    """

    regions: tuple[Region, ...]

    @property
    def interfaces(self) -> list[float]:
        return [r.x_end for r in self.regions[:-1]]


def region_decomposition(geom: BarrierGeometry, box_half_width: float | None = None) -> RegionDecomposition:
    left = -geom.L / 2.0
    lo = -box_half_width if box_half_width is not None else -np.inf
    hi = box_half_width if box_half_width is not None else np.inf
    regions = []
    if geom.infinite:
        regions = [Region(lo, left, 0.0), Region(left, -left, geom.mean_potential), Region(-left, hi, 0.0)]
        return RegionDecomposition(tuple(regions))
    w, g = geom.cell_width, geom.gap_width
    regions.append(Region(lo, left, 0.0))
    x = left
    for j in range(geom.N):
        regions.append(Region(x, x + w, geom.v))
        x += w
        if j < geom.N - 1:
            regions.append(Region(x, x + g, 0.0))
            x += g
    # absorb rounding so the array ends exactly at L/2
    last = regions[-1]
    regions[-1] = Region(last.x_start, -left, last.potential)
    regions.append(Region(-left, hi, 0.0))
    return RegionDecomposition(tuple(regions))


def _basis(region: Region, e: float, x: float):
    """Values and derivatives of the two local solutions at x."""
    q2 = e - region.potential
    if abs(q2) <= AT_BARRIER_ATOL * max(1.0, abs(e)):
        return np.array([1.0 + 0j, x - region.x_start]), np.array([0j, 1.0])
    if q2 > 0:
        q = np.sqrt(q2)
        ref1 = region.x_start if np.isfinite(region.x_start) else region.x_end
        ref2 = region.x_end if np.isfinite(region.x_end) else region.x_start
        u1 = np.exp(1j * q * (x - ref1))
        u2 = np.exp(-1j * q * (x - ref2))
        return np.array([u1, u2]), np.array([1j * q * u1, -1j * q * u2])
    kap = np.sqrt(-q2)
    u1 = np.exp(kap * (x - region.x_end))
    u2 = np.exp(-kap * (x - region.x_start))
    return np.array([u1 + 0j, u2 + 0j]), np.array([kap * u1, -kap * u2])


def _to_banded(a: np.ndarray, lower: int, upper: int) -> np.ndarray:
    n = a.shape[0]
    ab = np.zeros((lower + upper + 1, n), dtype=a.dtype)
    for j in range(n):
        for i in range(max(0, j - upper), min(n, j + lower + 1)):
            ab[upper + i - j, j] = a[i, j]
    return ab


def direct_scattering(geom: BarrierGeometry, e: float, origin: float | None = None) -> tuple[complex, complex]:
    """Transmission and reflection amplitudes for a unit wave incident from the left.

    Outside the array ``psi = exp(ik(x-x0)) + r exp(-ik(x-x0))`` on the left
    and ``t exp(ik(x-x0))`` on the right. The default origin ``x0`` is the
    centre of the first barrier (the array edge when N is infinite),
    matching the phase convention of the transfer-matrix module.
    """
    if not e > 0:
        raise ValueError("energy must be positive")
    dec = region_decomposition(geom)
    regs = dec.regions
    if origin is None:
        # for N = infinity the first barrier shrinks to the array edge
        origin = regs[1].x_start + (0.0 if geom.infinite else 0.5 * regs[1].length)
    k = np.sqrt(e)
    nreg = len(regs)
    n = 2 * (nreg - 1)  # unknowns: r, 2 per inner region, t
    A = np.zeros((n, n), dtype=complex)
    rhs = np.zeros(n, dtype=complex)

    def cols(j):
        if j == 0:
            return [0]
        if j == nreg - 1:
            return [n - 1]
        return [2 * j - 1, 2 * j]

    for i, x in enumerate(dec.interfaces):
        row_v, row_d = 2 * i, 2 * i + 1
        for side, j in ((1.0, i), (-1.0, i + 1)):
            if j == 0:
                ph = x - origin
                inc, inc_d = np.exp(1j * k * ph), 1j * k * np.exp(1j * k * ph)
                ref, ref_d = np.exp(-1j * k * ph), -1j * k * np.exp(-1j * k * ph)
                A[row_v, 0] += side * ref
                A[row_d, 0] += side * ref_d / k
                rhs[row_v] -= side * inc
                rhs[row_d] -= side * inc_d / k
            elif j == nreg - 1:
                ph = x - origin
                A[row_v, n - 1] += side * np.exp(1j * k * ph)
                A[row_d, n - 1] += side * 1j * np.exp(1j * k * ph)
            else:
                val, der = _basis(regs[j], e, x)
                for c_idx, u, du in zip(cols(j), val, der):
                    A[row_v, c_idx] += side * u
                    A[row_d, c_idx] += side * du / k
    sol = solve_banded((2, 2), _to_banded(A, 2, 2), rhs)
    return complex(sol[-1]), complex(sol[0])


def periodic_matrix(geom: BarrierGeometry, config: SpectrumConfig, e: float) -> np.ndarray:
    """Homogeneous matching system for psi on the ring [-C, C] with psi, psi' periodic."""
    dec = region_decomposition(geom, config.C)
    regs = dec.regions
    k = np.sqrt(e)
    nreg = len(regs)
    n = 2 * nreg
    A = np.zeros((n, n), dtype=complex)
    for i, x in enumerate(dec.interfaces):
        for side, j in ((1.0, i), (-1.0, i + 1)):
            val, der = _basis(regs[j], e, x)
            A[2 * i, 2 * j:2 * j + 2] += side * val
            A[2 * i + 1, 2 * j:2 * j + 2] += side * der / k
    val_r, der_r = _basis(regs[-1], e, config.C)
    val_l, der_l = _basis(regs[0], e, -config.C)
    A[n - 2, n - 2:] += val_r
    A[n - 2, 0:2] -= val_l
    A[n - 1, n - 2:] += der_r / k
    A[n - 1, 0:2] -= der_l / k
    return A


def periodic_singular_ratio(geom: BarrierGeometry, config: SpectrumConfig, e: float) -> float:
    """Smallest over largest singular value of :func:`periodic_matrix`."""
    s = svdvals(periodic_matrix(geom, config, e))
    return float(s[-1] / s[0])


def oracle_quantization_check(geom: BarrierGeometry, config: SpectrumConfig, e: float, tol: float = 1e-7) -> bool:
    """True when e is an allowed energy of the periodic box, judged independently."""
    return periodic_singular_ratio(geom, config, e) < tol
