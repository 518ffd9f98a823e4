"""Peak structure, critical temperature and critical-exponent fits of C_h(T)."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import find_peaks
from scipy.sparse.csgraph import connected_components

from .thermo import ThermoCurve

PROMINENCE_MIN = 0.05
EPSILON_MAX = 0.1
MIN_PEAK_SAMPLES = 20
MIN_FIT_SAMPLES = 10
DEBYE_CLOSENESS = 0.03


class AnalysisError(ValueError):
    pass


class Classification(str, enum.Enum):
    NO_PEAK = "NoPeak"
    DEBYE_LIKE = "DebyeLike"
    SINGLE_PEAK = "SinglePeak"
    DOUBLE_PEAK = "DoublePeak"


@dataclass(frozen=True)
class Peak:
    T: float
    C_h: float
    prominence: float  # relative to the peak height


@dataclass
class PeakReport:
    peaks: list[Peak]
    classification: Classification
    asymptote_estimate: float

    def to_dict(self) -> dict:
        return {
            "peaks": [asdict(p) for p in self.peaks],
            "classification": self.classification.value,
            "asymptote_estimate": self.asymptote_estimate,
        }


def detect_peaks(curve: ThermoCurve, prominence_min: float = PROMINENCE_MIN) -> PeakReport:
    """Interior local maxima of C_h whose relative prominence reaches ``prominence_min``.

    Prominence is the drop from the peak to the higher of its two bounding
    valleys, divided by the peak height, so the result does not change when
    C_h is rescaled.
    """
    y = np.asarray(curve.specific_heat, dtype=float)
    if len(y) < MIN_PEAK_SAMPLES:
        raise AnalysisError(f"need at least {MIN_PEAK_SAMPLES} samples, got {len(y)}")
    idx, props = find_peaks(y, prominence=0.0)
    peaks = []
    for i, prom in zip(idx, props["prominences"]):
        if y[i] > 0 and prom / y[i] >= prominence_min:
            peaks.append(Peak(float(curve.T[i]), float(y[i]), float(prom / y[i])))
    if not peaks:
        kind = Classification.NO_PEAK
    elif len(peaks) >= 2:
        kind = Classification.DOUBLE_PEAK
    else:
        i = int(np.searchsorted(curve.T, peaks[0].T))
        after = np.diff(y[i:])
        tol = 1e-12 * max(abs(y[i]), 1.0)
        kind = Classification.DEBYE_LIKE if np.all(after <= tol) else Classification.SINGLE_PEAK
    return PeakReport(peaks, kind, float(y[-1]))


def locate_peak_temperature(curve: ThermoCurve, T_max: float | None = None,
                            T_min: float | None = None) -> float:
    """Grid argmax of C_h refined by the vertex of the parabola through 3 samples.

    ``T_min``/``T_max`` restrict the search, e.g. to the neighbourhood of one
    detected peak.
    """
    T = np.asarray(curve.T, dtype=float)
    y = np.asarray(curve.specific_heat, dtype=float)
    keep = np.ones(len(T), dtype=bool)
    if T_max is not None:
        keep &= T <= T_max
    if T_min is not None:
        keep &= T >= T_min
    T, y = T[keep], y[keep]
    if len(T) == 0:
        raise AnalysisError("no samples in the requested temperature range")
    i = int(np.argmax(y))
    if i == 0 or i == len(y) - 1:
        return float(T[i])
    x0, x1, x2 = T[i - 1 : i + 2]
    y0, y1, y2 = y[i - 1 : i + 2]
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den
    if a >= 0:
        return float(x1)
    return float(np.clip(-b / (2 * a), x0, x2))


def peak_temperature(curve: ThermoCurve, peak: Peak, span: float = 1.5) -> float:
    """Refined location of a detected peak, searched within a factor ``span`` of its grid T."""
    return locate_peak_temperature(curve, T_max=peak.T * span, T_min=peak.T / span)


@dataclass
class CriticalFit:
    T_c: float
    A: float
    B: float
    chi: float
    epsilon_window: tuple[float, float]
    residual: float
    samples: int = 0
    flagged: bool = field(default=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilon_window"] = list(self.epsilon_window)
        return d


def critical_window_grid(T_c: float, epsilon_max: float = EPSILON_MAX, count: int = 60,
                         epsilon_min: float = 1e-4) -> np.ndarray:
    """Temperatures T_c (1 + eps) with eps log-spaced in [epsilon_min, epsilon_max]."""
    return T_c * (1.0 + np.geomspace(epsilon_min, epsilon_max, count))


def fit_critical_exponent(curve: ThermoCurve, T_c: float, epsilon_max: float = EPSILON_MAX,
                          target: float = 0.5, flag_tol: float = 0.1) -> CriticalFit:
    """Fit C_h = A + B sqrt(eps) above T_c and estimate chi from the log-slope of dC_h/dT.

    ``chi = 1 + d ln|dC_h/dT| / d ln eps``. The derivative is a centred
    difference in ``ln eps`` (second order on non-uniform samples); the two
    window ends, where only one-sided differences exist, are left out of
    the slope fit. ``flagged`` marks chi outside ``target +- flag_tol``.
    """
    if not T_c > 0:
        raise AnalysisError("T_c must be positive")
    T = np.asarray(curve.T, dtype=float)
    y = np.asarray(curve.specific_heat, dtype=float)
    eps = (T - T_c) / T_c
    keep = (eps > 0) & (eps <= epsilon_max)
    if np.count_nonzero(keep) < MIN_FIT_SAMPLES:
        raise AnalysisError(
            f"only {np.count_nonzero(keep)} samples with 0 < eps <= {epsilon_max}; need {MIN_FIT_SAMPLES}"
        )
    eps, y, T = eps[keep], y[keep], T[keep]
    if np.ptp(y) == 0:
        raise AnalysisError("specific heat is constant over the fit window")

    X = np.column_stack([np.ones_like(eps), np.sqrt(eps)])
    (A, B), *_ = np.linalg.lstsq(X, y, rcond=None)
    rms = float(np.sqrt(np.mean((X @ np.array([A, B]) - y) ** 2)))

    u = np.log(eps)
    dC_du = np.gradient(y, u)
    dC_dT = dC_du / (T - T_c)
    inner = slice(1, -1)
    mag = np.abs(dC_dT[inner])
    ok = mag > 0
    if np.count_nonzero(ok) < 3:
        raise AnalysisError("derivative vanishes over the fit window")
    slope = np.polyfit(u[inner][ok], np.log(mag[ok]), 1)[0]
    chi = float(1.0 + slope)
    return CriticalFit(
        T_c=float(T_c), A=float(A), B=float(B), chi=chi,
        epsilon_window=(float(eps.min()), float(eps.max())), residual=rms,
        samples=int(len(eps)), flagged=bool(abs(chi - target) > flag_tol),
    )


@dataclass
class FamilyReport:
    batch: list[float]
    outliers: list[float]
    c_threshold: float | None
    clean_split: bool
    threshold: float

    def to_dict(self) -> dict:
        return asdict(self)


def _on_grid(curve: ThermoCurve, T: np.ndarray) -> np.ndarray:
    if len(curve.T) == len(T) and np.array_equal(curve.T, T):
        return np.asarray(curve.specific_heat, dtype=float)
    return np.interp(np.log(T), np.log(curve.T), curve.specific_heat)


def classify_family(curves: list[ThermoCurve], threshold: float = DEBYE_CLOSENESS) -> FamilyReport:
    """Split a family into the dense batch of mutually close curves and outliers.

    Two curves are close when their largest relative difference over the
    upper half of the temperature grid is below ``threshold``. The batch is
    the largest connected group of close curves (ties go to the group with
    the larger c values).
    """
    if len(curves) < 2:
        raise AnalysisError("need at least two curves")
    if len({str(cv.N) for cv in curves}) != 1:
        raise AnalysisError("curves must share the barrier count")
    curves = sorted(curves, key=lambda cv: cv.c)
    T = np.asarray(curves[0].T, dtype=float)
    upper = T[len(T) // 2 :]
    Y = np.array([_on_grid(cv, upper) for cv in curves])
    n = len(curves)
    adj = np.zeros((n, n), dtype=bool)
    for i in range(n):
        denom = np.maximum(np.abs(Y[i]), np.abs(Y))
        dev = np.max(np.abs(Y - Y[i]) / np.where(denom > 0, denom, 1.0), axis=1)
        adj[i] = dev < threshold
    _, labels = connected_components(adj, directed=False)
    cs = np.array([cv.c for cv in curves])
    best = max(set(labels), key=lambda lab: (np.count_nonzero(labels == lab), cs[labels == lab].max()))
    in_batch = labels == best
    batch = [float(c) for c in cs[in_batch]]
    outliers = [float(c) for c in cs[~in_batch]]
    c_thr = min(batch) if outliers else None
    clean = all(o < min(batch) for o in outliers) if outliers else True
    return FamilyReport(batch, outliers, c_thr, clean, threshold)
