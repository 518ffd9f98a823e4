"""Transfer matrices of the barrier array.

Amplitude pairs ``(A, B)`` multiply ``exp(ikx)`` and ``exp(-ikx)``. The
total matrix ``Q`` maps the amplitudes left of the array to those right of
it, both referred to an origin at the centre of the first barrier; this is
the phase convention fixed by the outer factors ``exp(-+ik(a+b-a/2N))`` and
``exp(-+ika/2N)``.

Two evaluation paths exist:

* ``cell_matrix`` / ``total_transfer_matrix`` work on a single
  :class:`WaveParams` and use the regime-specific trigonometric or
  hyperbolic entries, with a power-series fallback at ``e ~ v``;
* ``transfer_matrices`` is the vectorised path used by the spectrum scan.
  It writes every entry as an entire function of ``q**2 = e - v`` so that
  no branch selection is needed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import INFINITE, BarrierGeometry, GeometryError

AT_BARRIER_RTOL = 1e-8
_SERIES_CUTOFF = 1e-6


class Regime(enum.Enum):
    ABOVE = "above"
    BELOW = "below"
    AT_BARRIER = "at_barrier"


class SingularMatrixError(ArithmeticError):
    """Q22 vanished numerically; the scattering matrix does not exist."""


@dataclass(frozen=True)
class WaveParams:
    """Per-energy wavenumbers and the impedance ratios of the cell matrix.

    ``xi``/``eta`` are set in the Above regime, ``xi_bar``/``eta_bar``
    (purely imaginary) in the Below regime. ``q2 = e - v`` is kept signed.
    """

    e: float
    v: float
    k: float
    q: float
    q2: float
    regime: Regime
    xi: float | None = None
    eta: float | None = None
    xi_bar: complex | None = None
    eta_bar: complex | None = None


def wave_params(e: float, v: float, at_barrier_rtol: float = AT_BARRIER_RTOL) -> WaveParams:
    if not e > 0:
        raise ValueError(f"energy must be positive, got {e}")
    k = float(np.sqrt(e))
    q2 = e - v
    q = float(np.sqrt(abs(q2)))
    if abs(q2) <= at_barrier_rtol * v:
        return WaveParams(e, v, k, q, q2, Regime.AT_BARRIER)
    if q2 > 0:
        return WaveParams(e, v, k, q, q2, Regime.ABOVE, xi=q / k + k / q, eta=q / k - k / q)
    xi_bar = q / (1j * k) + 1j * k / q
    eta_bar = q / (1j * k) - 1j * k / q
    return WaveParams(e, v, k, q, q2, Regime.BELOW, xi_bar=xi_bar, eta_bar=eta_bar)


# --- entire-function helpers --------------------------------------------------

def cos_entire(x, w=1.0):
    """cos(sqrt(x) w) as a function of x, continued to cosh for x < 0."""
    x = np.asarray(x, dtype=float)
    u = x * w * w
    with np.errstate(invalid="ignore", over="ignore"):
        r = np.sqrt(np.abs(u))
        out = np.where(u >= 0, np.cos(r), np.cosh(r))
    small = np.abs(u) < _SERIES_CUTOFF
    if np.any(small):
        out = np.where(small, 1.0 - u / 2.0 + u * u / 24.0, out)
    return out


def sinc_entire(x, w=1.0):
    """sin(sqrt(x) w) / sqrt(x), continued to sinh(sqrt(-x) w)/sqrt(-x)."""
    x = np.asarray(x, dtype=float)
    u = x * w * w
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        r = np.sqrt(np.abs(u))
        out = w * np.where(u >= 0, np.sin(r), np.sinh(r)) / r
    small = np.abs(u) < _SERIES_CUTOFF
    if np.any(small):
        out = np.where(small, w * (1.0 - u / 6.0 + u * u / 120.0), out)
    return out


def _diag_phase(p):
    p = np.asarray(p, dtype=float)
    m = np.zeros(p.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = np.exp(1j * p)
    m[..., 1, 1] = np.exp(-1j * p)
    return m


def _matmul(a, b):
    return np.einsum("...ij,...jk->...ik", a, b)


def matrix_power(m, n: int):
    """Binary exponentiation of (a stack of) 2x2 matrices."""
    if n < 0:
        raise ValueError("negative power")
    m = np.asarray(m, dtype=complex)
    result = np.broadcast_to(np.eye(2, dtype=complex), m.shape).copy()
    base = m
    while n:
        if n & 1:
            result = _matmul(base, result)
        n >>= 1
        if n:
            base = _matmul(base, base)
    return result


# --- finite N -----------------------------------------------------------------

def _series_cell(wp: WaveParams, w: float) -> np.ndarray:
    # Entries as power series in q^2 = e - v around the removable point e = v.
    s = sinc_entire(wp.q2, w)
    cs = cos_entire(wp.q2, w)
    t11 = cs + 0.5j * (wp.q2 / wp.k + wp.k) * s
    t12 = 0.5j * (wp.q2 / wp.k - wp.k) * s
    return np.array([[t11, t12], [np.conj(t12), np.conj(t11)]], dtype=complex)


def cell_entries(k, q2, w):
    """Vectorised (T11, T12) of one barrier of width ``w``; T21/T22 are conjugates."""
    k = np.asarray(k, dtype=float)
    s = sinc_entire(q2, w)
    cs = cos_entire(q2, w)
    t11 = cs + 0.5j * (q2 / k + k) * s
    t12 = 0.5j * (q2 / k - k) * s
    return t11, t12


def _barrier_matrix(wp: WaveParams, w: float) -> np.ndarray:
    if wp.regime is Regime.ABOVE:
        sn, cs = np.sin(wp.q * w), np.cos(wp.q * w)
        return np.array(
            [
                [cs + 0.5j * wp.xi * sn, 0.5j * wp.eta * sn],
                [-0.5j * wp.eta * sn, cs - 0.5j * wp.xi * sn],
            ],
            dtype=complex,
        )
    if wp.regime is Regime.BELOW:
        sh, ch = np.sinh(wp.q * w), np.cosh(wp.q * w)
        return np.array(
            [
                [ch + 0.5 * wp.xi_bar * sh, 0.5 * wp.eta_bar * sh],
                [-0.5 * wp.eta_bar * sh, ch - 0.5 * wp.xi_bar * sh],
            ],
            dtype=complex,
        )
    return _series_cell(wp, w)


def cell_matrix(geom: BarrierGeometry, wp: WaveParams) -> np.ndarray:
    """Transfer matrix across one barrier of width a/N, edge to edge."""
    if geom.infinite:
        raise GeometryError("cell_matrix needs a finite barrier count")
    return _barrier_matrix(wp, geom.cell_width)


def _assemble(geom: BarrierGeometry, k, t):
    n = geom.N
    w = geom.a / n
    inner = _matmul(_diag_phase(k * geom.gap_width), t)
    body = _matmul(t, matrix_power(inner, n - 1))
    out = _diag_phase(-k * (geom.a + geom.b - w / 2.0))
    return _matmul(_matmul(out, body), _diag_phase(-k * w / 2.0))


def total_transfer_matrix(geom: BarrierGeometry, wp: WaveParams) -> np.ndarray:
    """Q for the whole array, or the closed-form limit when N is infinite."""
    if geom.infinite:
        return infinite_transfer_matrix(infinite_cell(geom, wp))
    return _assemble(geom, wp.k, cell_matrix(geom, wp))


def transfer_matrices(geom: BarrierGeometry, k) -> np.ndarray:
    """Vectorised Q(k) for an array of wavenumbers, shape ``k.shape + (2, 2)``."""
    k = np.asarray(k, dtype=float)
    q2 = k * k - geom.v
    if geom.infinite:
        return _infinite_matrices(geom, k)
    t11, t12 = cell_entries(k, q2, geom.cell_width)
    t = np.empty(k.shape + (2, 2), dtype=complex)
    t[..., 0, 0] = t11
    t[..., 0, 1] = t12
    t[..., 1, 0] = np.conj(t12)
    t[..., 1, 1] = np.conj(t11)
    return _assemble(geom, k, t)


def s_matrix(Q, tol: float = 1e-300):
    """(S11, S12, S21, S22) from Q; S11 = S22 = 1/Q22."""
    Q = np.asarray(Q)
    q22 = Q[..., 1, 1]
    if np.any(np.abs(q22) <= tol):
        raise SingularMatrixError("|Q22| vanished; scattering matrix undefined")
    s11 = 1.0 / q22
    return s11, Q[..., 0, 1] / q22, -Q[..., 1, 0] / q22, s11


# --- N -> infinity ------------------------------------------------------------

@dataclass(frozen=True)
class InfiniteNCell:
    """Parameters of the N -> infinity transfer matrix.

    ``phi`` is complex (purely imaginary when ``phi2 < 0``); ``cos_phi`` and
    ``sinc_phi = sin(phi)/phi`` are always real. The barred quantities are
    only filled in the Below regime, where ``f_bar = f`` and ``d_bar = -d``.
    """

    regime: Regime
    k: float
    f: float
    d: float
    phi2: float
    phi: complex
    z: float
    cos_phi: float
    sinc_phi: float
    tau: float
    kappa_phase: float
    f_bar: float | None = None
    d_bar: float | None = None
    phi_bar: complex | None = None


def _fd(geom: BarrierGeometry, k):
    # f = kb + a q xi / 2 and d = a q eta / 2 reduce to these rational forms in k,
    # valid on both sides of e = v.
    e = k * k
    f = k * geom.b + geom.a * (2.0 * e - geom.v) / (2.0 * k)
    d = -geom.a * geom.v / (2.0 * k)
    return f, d


def infinite_cell(geom: BarrierGeometry, wp: WaveParams) -> InfiniteNCell:
    if not geom.infinite:
        raise GeometryError("infinite_cell needs N = INFINITE")
    k = wp.k
    f, d = _fd(geom, k)
    phi2 = f * f - d * d
    phi = complex(np.sqrt(phi2)) if phi2 >= 0 else 1j * float(np.sqrt(-phi2))
    cphi = float(cos_entire(phi2))
    sphi = float(sinc_entire(phi2))
    tau = 1.0 + d * d * sphi * sphi
    kappa = float(np.arctan2(f * sphi, cphi))
    extra = {}
    if wp.regime is Regime.BELOW:
        extra = dict(f_bar=f, d_bar=-d, phi_bar=phi)
    return InfiniteNCell(
        regime=wp.regime, k=k, f=f, d=d, phi2=phi2, phi=phi, z=k * geom.L,
        cos_phi=cphi, sinc_phi=sphi, tau=tau, kappa_phase=kappa, **extra,
    )


def infinite_transfer_matrix(cell: InfiniteNCell) -> np.ndarray:
    """Closed-form Q for N -> infinity.

    ``exp(-iz sigma3) exp(i (f sigma3 + i d sigma2))`` written out entrywise.
    The same expression covers e < v through ``f_bar = f``, ``d_bar = -d``.
    """
    ez = np.exp(-1j * cell.z)
    cs, s = cell.cos_phi, cell.sinc_phi
    if cell.regime is Regime.BELOW:
        f, db = cell.f_bar, cell.d_bar
        return np.array(
            [
                [ez * (cs + 1j * f * s), -1j * ez * db * s],
                [1j * np.conj(ez) * db * s, np.conj(ez) * (cs - 1j * f * s)],
            ],
            dtype=complex,
        )
    f, d = cell.f, cell.d
    return np.array(
        [
            [ez * (cs + 1j * f * s), 1j * ez * d * s],
            [-1j * np.conj(ez) * d * s, np.conj(ez) * (cs - 1j * f * s)],
        ],
        dtype=complex,
    )


def _infinite_matrices(geom: BarrierGeometry, k):
    f, d = _fd(geom, k)
    phi2 = f * f - d * d
    cs = cos_entire(phi2)
    s = sinc_entire(phi2)
    ez = np.exp(-1j * k * geom.L)
    q = np.empty(k.shape + (2, 2), dtype=complex)
    q[..., 0, 0] = ez * (cs + 1j * f * s)
    q[..., 0, 1] = 1j * ez * d * s
    q[..., 1, 0] = np.conj(q[..., 0, 1])
    q[..., 1, 1] = np.conj(q[..., 0, 0])
    return q


class EigenPair(NamedTuple):
    lam1: complex
    lam2: complex
    near_branch: bool


def infinite_eigenvalues(cell: InfiniteNCell, branch_tol: float = 1e-8) -> EigenPair:
    """``tau cos(phi - kappa) +- sqrt(tau^2 cos^2(phi - kappa) - 1)``.

    The closed-form eigenvalue expression for the infinite-N matrix, evaluated with
    the principal square root. It is *not* the spectrum of
    :func:`infinite_transfer_matrix`; see :func:`transfer_eigenvalues` for
    that. ``near_branch`` flags ``|x**2 - 1| < branch_tol`` where the two
    roots coalesce.
    """
    x = complex(cell.tau * np.cos(cell.phi - cell.kappa_phase))
    plus, minus, disc = _unimodular_roots(x)
    return EigenPair(plus, minus, bool(abs(disc) < branch_tol))


def transfer_eigenvalues(Q) -> tuple[complex, complex]:
    """Eigenvalues of a unimodular 2x2 matrix from its half-trace."""
    Q = np.asarray(Q)
    plus, minus, _ = _unimodular_roots(complex(0.5 * (Q[0, 0] + Q[1, 1])))
    return plus, minus


def _unimodular_roots(x: complex) -> tuple[complex, complex, complex]:
    """Roots ``x +- sqrt(x^2 - 1)`` (principal branch) of ``lam^2 - 2x lam + 1``.

    The larger root is formed directly and the smaller as its inverse, so the
    product stays 1 when x is huge and ``x - sqrt(x^2-1)`` would cancel.
    """
    if abs(x) > 1e100:
        # x**2 would overflow; same principal root, written without squaring
        root = x * np.sqrt(1.0 - (1.0 / x) ** 2)
        if root.real < 0 or (root.real == 0 and root.imag < 0):
            root = -root
        disc = complex(np.inf)
    else:
        disc = x * x - 1.0
        root = np.sqrt(disc)
    plus, minus = x + root, x - root
    if abs(plus) >= abs(minus):
        minus = 1.0 / plus
    else:
        plus = 1.0 / minus
    return complex(plus), complex(minus), disc


def finite_limit_matrix(geom: BarrierGeometry, k: float, n: int) -> np.ndarray:
    """``exp(-ik(a+b) sigma3) (exp(ikb/n sigma3) T_n)^n`` with cells of width a/n.

    The finite-n construction whose n -> infinity limit is
    :func:`infinite_transfer_matrix`.
    """
    t11, t12 = cell_entries(np.array(k), np.array(k * k - geom.v), geom.a / n)
    t = np.array([[t11, t12], [np.conj(t12), np.conj(t11)]], dtype=complex)
    step = _diag_phase(k * geom.b / n) @ t
    return _diag_phase(-k * geom.L) @ matrix_power(step, n)


def cancellation_scale(geom: BarrierGeometry, k) -> np.ndarray:
    """Largest magnitude met while forming Q at k, relative to O(1) results.

    Round-off in any entry of Q is about ``eps`` times this. Deep below the
    barrier the cell entries grow like ``exp(q w)`` and the product of N of
    them can cancel down to an O(1) trace.
    """
    k = np.asarray(k, dtype=float)
    if geom.infinite:
        f, d = _fd(geom, k)
        phi2 = f * f - d * d
        s = np.abs(sinc_entire(phi2))
        return np.abs(cos_entire(phi2)) + (np.abs(f) + np.abs(d)) * s
    t11, t12 = cell_entries(k, k * k - geom.v, geom.cell_width)
    with np.errstate(over="ignore"):
        return np.minimum(np.exp(geom.N * np.log(np.abs(t11) + np.abs(t12))), 1e300)


def _mp_pow(m, n):
    import mpmath

    result = mpmath.eye(2)
    base = m
    while n:
        if n & 1:
            result = base * result
        n >>= 1
        if n:
            base = base * base
    return result


def _mp_cell(geom: BarrierGeometry, kk):
    """Cell matrix at mp wavenumber ``kk``; call inside a precision context."""
    import mpmath

    i = mpmath.mpc(0, 1)
    w = mpmath.mpf(geom.a) / geom.N
    q2 = kk * kk - mpmath.mpf(geom.v)
    if q2 == 0:
        c, s = mpmath.mpf(1), w
    else:
        r = mpmath.sqrt(mpmath.mpc(q2))
        c, s = mpmath.re(mpmath.cos(r * w)), mpmath.re(mpmath.sin(r * w) / r)
    t11 = c + i * (q2 / kk + kk) * s / 2
    t12 = i * (q2 / kk - kk) * s / 2
    return mpmath.matrix([[t11, t12], [mpmath.conj(t12), mpmath.conj(t11)]])


def cell_matrix_mp(geom: BarrierGeometry, k: float, dps: int = 40):
    """Single-cell matrix at one k in mpmath arithmetic (finite N only)."""
    import mpmath

    if geom.infinite:
        raise ValueError("no single cell for N = infinity")
    with mpmath.workdps(dps):
        return _mp_cell(geom, mpmath.mpf(float(k)))


def transfer_matrix_mp(geom: BarrierGeometry, k: float, dps: int = 40):
    """Q at a single k in mpmath arithmetic with ``dps`` significant digits.

    Same formulas and assembly order as :func:`transfer_matrices`; used where
    double precision cancels away (narrow resonances deep under the barrier).
    Returns an ``mpmath.matrix`` and must be consumed inside the caller's own
    precision context if more digits are needed downstream.
    """
    import mpmath

    with mpmath.workdps(dps):
        kk = mpmath.mpf(float(k))
        i = mpmath.mpc(0, 1)

        def dphase(p):
            return mpmath.matrix([[mpmath.exp(i * p), 0], [0, mpmath.exp(-i * p)]])

        if geom.infinite:
            a, b, v = mpmath.mpf(geom.a), mpmath.mpf(geom.b), mpmath.mpf(geom.v)
            e = kk * kk
            f = kk * b + a * (2 * e - v) / (2 * kk)
            d = -a * v / (2 * kk)
            x = f * f - d * d
            if x == 0:
                c, s = mpmath.mpf(1), mpmath.mpf(1)
            else:
                r = mpmath.sqrt(mpmath.mpc(x))
                c, s = mpmath.re(mpmath.cos(r)), mpmath.re(mpmath.sin(r) / r)
            ez = mpmath.exp(-i * kk * mpmath.mpf(geom.L))
            q11 = ez * (c + i * f * s)
            q12 = i * ez * d * s
            return mpmath.matrix([[q11, q12], [mpmath.conj(q12), mpmath.conj(q11)]])
        w = mpmath.mpf(geom.a) / geom.N
        t = _mp_cell(geom, kk)
        gap = mpmath.mpf(geom.b) / (geom.N - 1)
        body = t * _mp_pow(dphase(kk * gap) * t, geom.N - 1)
        out = dphase(-kk * (mpmath.mpf(geom.a) + mpmath.mpf(geom.b) - w / 2))
        return out * body * dphase(-kk * w / 2)


def unimodularity_defect(M) -> float:
    """|det M - 1| relative to the magnitude of the products being cancelled."""
    M = np.asarray(M)
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    scale = np.maximum(1.0, np.abs(M[..., 0, 0] * M[..., 1, 1]) + np.abs(M[..., 0, 1] * M[..., 1, 0]))
    return np.abs(det - 1.0) / scale


__all__ = [
    "INFINITE",
    "AT_BARRIER_RTOL",
    "Regime",
    "WaveParams",
    "wave_params",
    "cell_matrix",
    "cell_entries",
    "total_transfer_matrix",
    "transfer_matrices",
    "transfer_matrix_mp",
    "cancellation_scale",
    "s_matrix",
    "SingularMatrixError",
    "InfiniteNCell",
    "infinite_cell",
    "infinite_transfer_matrix",
    "infinite_eigenvalues",
    "transfer_eigenvalues",
    "finite_limit_matrix",
    "matrix_power",
    "unimodularity_defect",
    "cell_matrix_mp",
    "EigenPair",
]
