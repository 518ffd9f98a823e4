"""Energy levels of the barrier array in the periodic box [-C, C].

The quantization condition ``det(exp(2ikC) S - 1) = 0`` factors as

    det(exp(2ikC) S - 1) = exp(2ikC) / Q22 * (Delta(k) - 2),
    Delta(k) = 2 Re(exp(2ikC) Q11),

where ``Delta`` is the trace of the monodromy around the box. The two
eigenvalues of the unitary ``exp(2ikC) S`` are ``exp(i(psi +- delta))`` with
``psi = 2kC + arg Q11`` and ``cos(delta) = 1/|Q11| = |S11|``; a level is a
crossing of ``2 pi m`` by either eigenphase.

``find_levels`` scans both eigenphases on a uniform k grid to bracket
crossings, certifies the number of levels in every grid cell with an exact
oscillation count, isolates clusters (nearly degenerate pairs, narrow
tunnelling resonances) by bisection on that count and refines simple roots by
bisection on ``Delta - 2``.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .geometry import INFINITE, BarrierGeometry, SpectrumConfig
from .transfer import SingularMatrixError, cancellation_scale, transfer_matrices, transfer_matrix_mp

log = logging.getLogger(__name__)

CACHE_FORMAT = 1
_CHUNK = 4096
# Delta - 2 is trusted in double precision when it exceeds this multiple of eps * cancellation_scale.
_NOISE_MARGIN = 1e3
# Below this absolute round-off a wrong sign only moves a root by a few ulps.
_NOISE_TRUST = 1e-11


@dataclass(frozen=True)
class TailDescriptor:
    """Analytic levels ``(pi n / C)**2`` for ``n >= n0``, each ``degeneracy`` times."""

    C: float
    n0: int
    degeneracy: int = 1

    def energy(self, n):
        return (math.pi * np.asarray(n, dtype=float) / self.C) ** 2


@dataclass
class RootFindReport:
    grid_points: int = 0
    candidate_brackets: int = 0
    certified_roots: int = 0
    refined_roots: int = 0
    mismatched_cells: int = 0
    clusters_merged: int = 0
    rejected: int = 0
    close_pairs: int = 0
    max_residual: float = 0.0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class EnergySpectrum:
    levels: np.ndarray
    tail: TailDescriptor
    geometry: BarrierGeometry | None = None
    config: SpectrumConfig | None = None
    multiplicity: np.ndarray | None = None
    report: RootFindReport = field(default_factory=RootFindReport)

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        if self.multiplicity is None:
            self.multiplicity = np.ones(self.levels.shape, dtype=int)

    def count_below(self, e: float) -> int:
        return int(np.searchsorted(self.levels, e, side="left"))

    def __len__(self) -> int:
        return len(self.levels)


def tail_energies(config: SpectrumConfig, n_from: int | None = None) -> Iterator[float]:
    """Yield ``(pi n / C)**2`` for ``n = n_from, n_from + 1, ...`` (default ``n0``)."""
    n = config.n0 if n_from is None else int(n_from)
    if n < 0:
        raise ValueError("n_from must be non-negative")
    scale = math.pi / config.C
    while True:
        yield (scale * n) ** 2
        n += 1


# --- quantization functions ---------------------------------------------------

def _k(e):
    e = np.asarray(e, dtype=float)
    if np.any(e <= 0):
        raise ValueError("energies must be positive")
    return np.sqrt(e)


def quantization_residual(geom: BarrierGeometry, config: SpectrumConfig, e):
    """``det(exp(2ikC) S(e) - 1)`` built from the four S entries."""
    k = _k(e)
    Q = transfer_matrices(geom, k)
    q22 = Q[..., 1, 1]
    if np.any(q22 == 0):
        raise SingularMatrixError("Q22 vanished")
    ph = np.exp(2j * k * config.C)
    s11 = 1.0 / q22
    s12 = Q[..., 0, 1] / q22
    s21 = -Q[..., 1, 0] / q22
    return (ph * s11 - 1.0) * (ph * s11 - 1.0) - ph * ph * s12 * s21


def quantization_residual_expanded(geom: BarrierGeometry, config: SpectrumConfig, e):
    """The same determinant expanded into cos/sin of 2kC and 4kC.

    For infinite N this is the closed-form expansion in f, d, phi and
    z = kL, divided by Q22**2 so that it is directly comparable.
    """
    k = _k(e)
    C = config.C
    if geom.infinite:
        return _expanded_infinite(geom, C, k)
    Q = transfer_matrices(geom, k)
    q22, p = Q[..., 1, 1], Q[..., 0, 1] * Q[..., 1, 0]
    c2, s2, c4, s4 = np.cos(2 * k * C), np.sin(2 * k * C), np.cos(4 * k * C), np.sin(4 * k * C)
    re = c4 / q22**2 - 2 * c2 / q22 + 1 + p * c4 / q22**2
    im = s4 / q22**2 - 2 * s2 / q22 + p * s4 / q22**2
    return re + 1j * im


def _expanded_infinite(geom, C, k):
    from .transfer import cos_entire, sinc_entire

    e = k * k
    f = k * geom.b + geom.a * (2 * e - geom.v) / (2 * k)
    d = -geom.a * geom.v / (2 * k)
    phi2 = f * f - d * d
    cp, sp = cos_entire(phi2), sinc_entire(phi2)
    z = k * geom.L
    tau = 1 + d * d * sp * sp
    u = cp * cp - f * f * sp * sp
    re = (
        np.cos(4 * k * C) * tau
        + np.cos(2 * z) * u
        + 2 * f * sp * (np.sin(2 * z) * cp - np.sin(2 * k * C + z))
        - 2 * np.cos(2 * k * C + z) * cp
    )
    im = (
        np.sin(4 * k * C) * tau
        + np.sin(2 * z) * u
        + 2 * f * sp * (np.cos(2 * k * C + z) - np.cos(2 * z) * cp)
        - 2 * np.sin(2 * k * C + z) * cp
    )
    q22 = np.exp(1j * z) * (cp - 1j * f * sp)
    return (re + 1j * im) / q22**2


def discriminant(geom: BarrierGeometry, config: SpectrumConfig, k) -> np.ndarray:
    """Trace of the monodromy around the box, ``2 Re(exp(2ikC) Q11)``."""
    k = np.asarray(k, dtype=float)
    q11 = transfer_matrices(geom, k)[..., 0, 0]
    return 2.0 * np.real(np.exp(2j * k * config.C) * q11)


def eigenphases(geom: BarrierGeometry, config: SpectrumConfig, k):
    """Return ``(psi mod 2pi, delta, Delta)`` on a k array.

    The eigenphases of ``exp(2ikC) S`` are ``psi +- delta``.
    """
    k = np.asarray(k, dtype=float)
    q11 = transfer_matrices(geom, k)[..., 0, 0]
    rot = np.exp(2j * k * config.C) * q11
    mag = np.abs(q11)
    delta = np.arccos(np.clip(1.0 / mag, -1.0, 1.0))
    return np.angle(rot), delta, 2.0 * np.real(rot)


def _mp_dps(scale: float) -> int:
    return 25 + int(math.ceil(math.log10(max(scale, 1.0))))


def _mp_discriminant_and_residual(geom, config, k: float):
    """(Delta, residual) at one k in extended precision."""
    import mpmath

    scale = float(cancellation_scale(geom, np.array([k]))[0])
    dps = _mp_dps(scale)
    with mpmath.workdps(dps):
        Q = transfer_matrix_mp(geom, k, dps)
        ph = mpmath.exp(2j * mpmath.mpf(float(k)) * mpmath.mpf(config.C))
        delta = 2 * mpmath.re(ph * Q[0, 0])
        s11 = 1 / Q[1, 1]
        s12s21 = -Q[0, 1] * Q[1, 0] / (Q[1, 1] * Q[1, 1])
        res = (ph * s11 - 1) ** 2 - ph * ph * s12s21
        return float(delta), complex(res)


def noise_floor(geom: BarrierGeometry, k) -> np.ndarray:
    """Estimated round-off in the double-precision discriminant."""
    return np.finfo(float).eps * cancellation_scale(geom, k)


def robust_discriminant(geom: BarrierGeometry, config: SpectrumConfig, k, Delta=None) -> np.ndarray:
    """Discriminant whose sign relative to 2 is reliable.

    Points where ``|Delta - 2|`` is within round-off of zero are recomputed in
    extended precision.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if Delta is None:
        Delta = discriminant(geom, config, k)
    Delta = np.array(Delta, dtype=float)
    noise = noise_floor(geom, k)
    doubtful = (noise > _NOISE_TRUST) & (np.abs(Delta - 2.0) <= _NOISE_MARGIN * noise)
    for i in np.nonzero(doubtful)[0]:
        Delta[i] = _mp_discriminant_and_residual(geom, config, float(k[i]))[0]
    return Delta


# --- oscillation count ----------------------------------------------------------

def _ring_regions(geom: BarrierGeometry, C: float):
    """(length, potential) pieces of one turn around the box starting at x = L/2."""
    pieces = [(2.0 * C - geom.L, 0.0)]
    if geom.infinite:
        # The N -> infinity matrix is exactly that of a uniform barrier of the mean height.
        pieces.append((geom.L, geom.mean_potential))
        return pieces
    w, g = geom.cell_width, geom.gap_width
    for j in range(geom.N):
        pieces.append((w, geom.v))
        if j < geom.N - 1:
            pieces.append((g, 0.0))
    return pieces


def dirichlet_count(geom: BarrierGeometry, C: float, k) -> np.ndarray:
    """Zeros in (x0, x0 + 2C) of the solution with psi(x0) = 0, psi'(x0) = 1.

    By Sturm oscillation this is the number of Dirichlet eigenvalues of the
    cut box below ``k**2``. Each piece is crossed analytically with a
    renormalised (psi, psi') so nothing overflows.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    e = k * k
    y = np.zeros_like(k)
    dy = np.ones_like(k)
    zeros = np.zeros(k.shape, dtype=np.int64)
    for length, pot in _ring_regions(geom, C):
        q2 = e - pot
        osc = q2 > 0
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            q = np.sqrt(np.where(osc, q2, 1.0))
            th0 = np.arctan2(y, dy / q)
            th1 = th0 + q * length
            n_osc = np.floor(th1 / np.pi) - np.floor(th0 / np.pi)
            y_osc, dy_osc = np.sin(th1), q * np.cos(th1)

            kap = np.sqrt(np.where(osc, 0.0, -q2))
            kl = kap * length
            t = np.tanh(kl)
            s = np.where(kl > 1e-8, t / np.where(kap > 0, kap, 1.0), length)
            y_ev = y + dy * s
            dy_ev = y * kap * t + dy
            n_ev = (y != 0) & ((y_ev == 0) | (np.sign(y_ev) != np.sign(y)))

        zeros += np.where(osc, n_osc, n_ev).astype(np.int64)
        y = np.where(osc, y_osc, y_ev)
        dy = np.where(osc, dy_osc, dy_ev)
        norm = np.hypot(y, dy)
        y, dy = y / norm, dy / norm
    return zeros


def count_levels_below(geom: BarrierGeometry, config: SpectrumConfig, k, Delta=None) -> np.ndarray:
    """Number of box levels (with multiplicity) with energy below ``k**2``.

    Uses the Hill ordering of periodic eigenvalues against the Dirichlet
    eigenvalues of the cut box: with m Dirichlet levels below, the periodic
    count is ``m + [Delta < 2]`` for even m and ``m + [Delta > 2]`` for odd m.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    Delta = robust_discriminant(geom, config, k, Delta)
    m = dirichlet_count(geom, config.C, k)
    even = (m % 2) == 0
    return m + np.where(even, Delta < 2.0, Delta > 2.0).astype(np.int64)


# --- root finding ---------------------------------------------------------------

def _k_grid(config: SpectrumConfig) -> np.ndarray:
    k_lo, k_hi = math.sqrt(config.e_min), math.sqrt(config.e_split)
    n = int(math.ceil((k_hi - k_lo) / config.dk))
    grid = k_lo + config.dk * np.arange(n + 1)
    grid[-1] = k_hi
    return grid


def _chunked(fn, k):
    return np.concatenate([fn(part) for part in np.array_split(k, max(1, len(k) // _CHUNK))])


def _unwrap_monotone(wrapped: np.ndarray) -> np.ndarray:
    # The box eigenphases increase with k; increments are taken in [-pi/2, 3pi/2)
    # so that fast forward jumps (narrow resonances) are not folded backwards.
    steps = np.mod(np.diff(wrapped) + np.pi / 2, 2 * np.pi) - np.pi / 2
    return np.concatenate([[wrapped[0]], wrapped[0] + np.cumsum(steps)])


def _bisect_sign(geom, config, lo, hi, f_lo, f_hi):
    """Vectorised bisection of Delta - 2 on sign-changing brackets.

    Runs to adjacent doubles and returns the endpoint with the smaller
    ``|Delta - 2|``; this is always inside the ``refine_rtol`` target.
    """
    lo, hi, f_lo, f_hi = lo.copy(), hi.copy(), f_lo.copy(), f_hi.copy()
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not np.any(active):
            break
        idx = np.nonzero(active)[0]
        f_mid = robust_discriminant(geom, config, mid[idx]) - 2.0
        same = np.sign(f_mid) == np.sign(f_lo[idx])
        lo[idx[same]] = mid[idx[same]]
        f_lo[idx[same]] = f_mid[same]
        hi[idx[~same]] = mid[idx[~same]]
        f_hi[idx[~same]] = f_mid[~same]
    return np.where(np.abs(f_lo) <= np.abs(f_hi), lo, hi)


def _isolate(geom, config, ka, pa, da, kb, pb, db, xtol):
    """Split count-certified cells until each holds one sign-changing root.

    Works breadth-first on arrays of intervals. Returns ``(singles, clusters)``
    where singles are ``(lo, hi, Delta(lo) - 2, Delta(hi) - 2)`` brackets and clusters are
    ``(k, multiplicity)`` for intervals that shrank to ``xtol * k`` without
    separating (double roots such as the free-box levels).
    """
    singles, clusters = [], []
    while len(ka):
        n = pb - pa
        live = n > 0
        ka, pa, da, kb, pb, db, n = (x[live] for x in (ka, pa, da, kb, pb, db, n))
        single = (n == 1) & (np.sign(da - 2.0) != np.sign(db - 2.0))
        singles.extend(zip(ka[single], kb[single], da[single] - 2.0, db[single] - 2.0))
        tiny = ~single & (kb - ka <= xtol * kb)
        clusters.extend(zip(0.5 * (ka[tiny] + kb[tiny]), n[tiny].astype(int)))
        go = ~single & ~tiny
        ka, pa, da, kb, pb, db = (x[go] for x in (ka, pa, da, kb, pb, db))
        if not len(ka):
            break
        km = 0.5 * (ka + kb)
        dm = robust_discriminant(geom, config, km)
        pm = np.clip(count_levels_below(geom, config, km, dm), pa, pb)
        ka, pa, da, kb, pb, db = (
            np.concatenate(pair) for pair in ((ka, km), (pa, pm), (da, dm), (km, kb), (pm, pb), (dm, db))
        )
    return singles, clusters


def find_levels(geom: BarrierGeometry, config: SpectrumConfig) -> EnergySpectrum:
    """All box levels in ``[e_min, e_split]`` plus the analytic tail descriptor."""
    config.check_box(geom)
    report = RootFindReport()
    k = _k_grid(config)
    report.grid_points = len(k)

    psi_w, delta, Delta = (np.concatenate(parts) for parts in zip(
        *(eigenphases(geom, config, part) for part in np.array_split(k, max(1, len(k) // _CHUNK)))
    ))
    psi = _unwrap_monotone(psi_w)
    two_pi = 2.0 * np.pi
    cand = np.zeros(len(k) - 1, dtype=np.int64)
    for phase in (psi + delta, psi - delta):
        idx = np.floor(phase / two_pi)
        cand += np.maximum(np.diff(idx), 0).astype(np.int64)
    report.candidate_brackets = int(cand.sum())

    Delta = robust_discriminant(geom, config, k, Delta)
    P = count_levels_below(geom, config, k, Delta)
    cert = np.diff(P)
    if np.any(cert < 0):
        # numerical noise in the parity bit right at a root; repair monotonically
        P = np.maximum.accumulate(P)
        cert = np.diff(P)
    report.certified_roots = int(cert.sum())
    report.mismatched_cells = int(np.count_nonzero(cand != cert))

    cells = np.nonzero(cert)[0]
    singles, clusters = _isolate(
        geom, config, k[cells], P[cells], Delta[cells], k[cells + 1], P[cells + 1], Delta[cells + 1],
        config.refine_rtol,
    )

    roots_k, mult = [], []
    if singles:
        lo, hi, f_lo, f_hi = (np.array(col, dtype=float) for col in zip(*singles))
        roots_k.extend(_bisect_sign(geom, config, lo, hi, f_lo, f_hi))
        mult.extend([1] * len(singles))
    for kc, n in clusters:
        roots_k.append(kc)
        mult.append(n)
    report.refined_roots = len(roots_k)

    order = np.argsort(roots_k)
    roots_k = np.asarray(roots_k, dtype=float)[order]
    mult = np.asarray(mult, dtype=int)[order]
    roots_k, mult, merged = _dedup(roots_k, mult, config.dedup_dk)
    report.clusters_merged = merged

    keep, worst = _accept(geom, config, k, roots_k)
    report.rejected = int(np.count_nonzero(~keep))
    report.max_residual = worst
    roots_k, mult = roots_k[keep], mult[keep]
    if report.rejected:
        log.warning("%s: %d candidate roots failed the residual test", geom.label(), report.rejected)

    if len(roots_k) > 1:
        report.close_pairs = int(np.count_nonzero(np.diff(roots_k) < 2.0 * config.dk))
        if report.close_pairs:
            log.info("%s: %d adjacent roots closer than two grid steps", geom.label(), report.close_pairs)

    levels = roots_k**2
    tail = TailDescriptor(config.C, config.n0, config.tail_degeneracy)
    # the tail may start just below e_split; levels it already covers (within
    # the dedup radius) are not repeated
    k_tail = math.pi * tail.n0 / tail.C
    top = min(config.e_split, (k_tail - config.dedup_dk) ** 2)
    inside = (levels >= config.e_min) & (levels <= top)
    return EnergySpectrum(
        levels=levels[inside],
        tail=tail,
        geometry=geom,
        config=config,
        multiplicity=mult[inside],
        report=report,
    )


def _dedup(roots_k, mult, radius):
    if len(roots_k) == 0:
        return roots_k, mult, 0
    out_k, out_m = [roots_k[0]], [mult[0]]
    merged = 0
    for kk, m in zip(roots_k[1:], mult[1:]):
        if kk - out_k[-1] < radius:
            out_m[-1] += m
            merged += 1
        else:
            out_k.append(kk)
            out_m.append(m)
    return np.array(out_k), np.array(out_m, dtype=int), merged


def _accept(geom, config, grid, roots_k):
    """Residual test; returns (keep mask, largest accepted-or-not residual).

    The tolerance is ``accept_rtol`` times the median residual over the grid
    cell holding the root, floored at ``accept_atol`` and at the change of the
    residual across a few ulps of k (a double cannot sit closer to the root).
    Where round-off in Q exceeds the tolerance the residual is recomputed in
    extended precision.
    """
    if len(roots_k) == 0:
        return np.zeros(0, dtype=bool), 0.0
    q22 = np.abs(transfer_matrices(geom, roots_k)[..., 1, 1])
    res = np.abs(quantization_residual(geom, config, roots_k**2))
    i = np.clip(np.searchsorted(grid, roots_k) - 1, 0, len(grid) - 2)
    probes = np.stack([grid[i], 0.5 * (grid[i] + grid[i + 1]), grid[i + 1]])
    scale = np.median(np.abs(quantization_residual(geom, config, probes**2)), axis=0)
    tol = np.maximum(config.accept_rtol * scale, config.accept_atol)

    h = 16.0 * np.spacing(roots_k)
    noisy = noise_floor(geom, roots_k) / q22 > 1e-3 * tol
    ulp_floor = np.zeros_like(res)
    for idx in range(len(roots_k)):
        kk = float(roots_k[idx])
        if noisy[idx]:
            res[idx] = abs(_mp_discriminant_and_residual(geom, config, kk)[1])
            lo = _mp_discriminant_and_residual(geom, config, kk - h[idx])[1]
            hi = _mp_discriminant_and_residual(geom, config, kk + h[idx])[1]
            slope = abs(hi - lo) / (2 * h[idx])
            ulp_floor[idx] = 4.0 * slope * np.spacing(kk)
    tol = np.maximum(tol, ulp_floor)
    return res < tol, float(res.max())


def free_spectrum(config: SpectrumConfig, n_from: int = 0) -> EnergySpectrum:
    """Spectrum made only of analytic levels (pi n / C)**2, n >= n_from."""
    return EnergySpectrum(
        levels=np.zeros(0),
        tail=TailDescriptor(config.C, int(n_from), config.tail_degeneracy),
        config=config,
    )


# --- cache ---------------------------------------------------------------------

def cache_key(geom: BarrierGeometry, config: SpectrumConfig) -> str:
    doc = {"format": CACHE_FORMAT, "geometry": geom.to_dict(), "config": config.to_dict()}
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def spectrum_to_dict(spec: EnergySpectrum) -> dict:
    return {
        "format": CACHE_FORMAT,
        "key": cache_key(spec.geometry, spec.config) if spec.geometry is not None else None,
        "geometry": spec.geometry.to_dict() if spec.geometry is not None else None,
        "config": spec.config.to_dict() if spec.config is not None else None,
        "levels": [float(x) for x in spec.levels],
        "multiplicity": [int(x) for x in spec.multiplicity],
        "tail": {"C": spec.tail.C, "n0": spec.tail.n0, "degeneracy": spec.tail.degeneracy},
        "report": spec.report.to_dict(),
    }


def spectrum_from_dict(doc: dict, geom: BarrierGeometry, config: SpectrumConfig) -> EnergySpectrum:
    tail = doc["tail"]
    return EnergySpectrum(
        levels=np.array(doc["levels"], dtype=float),
        tail=TailDescriptor(float(tail["C"]), int(tail["n0"]), int(tail.get("degeneracy", 1))),
        geometry=geom,
        config=config,
        multiplicity=np.array(doc["multiplicity"], dtype=int),
        report=RootFindReport(**doc.get("report", {})),
    )


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def cached_find_levels(geom: BarrierGeometry, config: SpectrumConfig, cache_dir=None) -> EnergySpectrum:
    """:func:`find_levels` behind a JSON cache keyed by a hash of all inputs.

    A corrupt or mismatched cache file is logged and recomputed.
    """
    if cache_dir is None:
        return find_levels(geom, config)
    key = cache_key(geom, config)
    path = Path(cache_dir) / f"spectrum-{key[:24]}.json"
    if path.exists():
        try:
            doc = json.loads(path.read_text())
            if doc.get("key") != key:
                raise ValueError("key mismatch")
            return spectrum_from_dict(doc, geom, config)
        except (ValueError, KeyError, TypeError) as exc:
            log.warning("discarding unreadable spectrum cache %s (%s); recomputing", path, exc)
    spec = find_levels(geom, config)
    atomic_write_text(path, json.dumps(spectrum_to_dict(spec), indent=1))
    return spec


__all__ = [
    "EnergySpectrum",
    "TailDescriptor",
    "RootFindReport",
    "tail_energies",
    "quantization_residual",
    "quantization_residual_expanded",
    "discriminant",
    "eigenphases",
    "dirichlet_count",
    "count_levels_below",
    "find_levels",
    "free_spectrum",
    "cache_key",
    "cached_find_levels",
    "INFINITE",
]
