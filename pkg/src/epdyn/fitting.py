"""Linear least-squares power-law fits and log-log slopes.

All fits are linear in the coefficients: ``P(t) - 1`` is regressed on
``t**e`` for a fixed exponent set.  Columns are scaled to unit norm and
the system is solved through a pivoted QR factorisation, so the normal
equations are never formed.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg

from .dynamics.series import TimeSeries
from .exceptions import IllPosedFitError

__all__ = [
    "FitResult",
    "HALF_POWERS",
    "fit_powers",
    "fit_half_powers",
    "fit_integer_powers",
    "loglog_slope",
    "envelope_maxima",
    "oscillation_minima",
]

HALF_POWERS = tuple(Fraction(k, 2) for k in range(1, 7))
CONDITION_LIMIT = 1e12
SAMPLES_PER_COEFFICIENT = 4


@dataclass(frozen=True)
class FitResult:
    """Coefficients ``C_j`` of ``P(t) = 1 + sum_j C_j t**e_j`` over a window."""

    exponents: tuple
    coefficients: np.ndarray
    window: tuple
    rms: float
    condition: float
    n_samples: int
    times: np.ndarray
    residuals: np.ndarray

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        out = np.ones_like(t)
        for e, c in zip(self.exponents, self.coefficients):
            out = out + c * t ** float(e)
        return out

    def as_dict(self) -> dict:
        return {str(e): float(c) for e, c in zip(self.exponents, self.coefficients)}


def _select(series: TimeSeries, window):
    if window is None:
        window = (series.times[0], series.times[-1])
    lo, hi = map(float, window)
    if lo >= hi:
        raise ValueError("fit window must satisfy t_min < t_max")
    tol = 1e-12 * max(1.0, abs(hi))
    if lo < series.times[0] - tol or hi > series.times[-1] + tol:
        raise ValueError(f"window [{lo:g}, {hi:g}] lies outside the series support "
                         f"[{series.times[0]:g}, {series.times[-1]:g}]")
    mask = (series.times >= lo - tol) & (series.times <= hi + tol)
    return series.times[mask], series.values[mask]


def fit_powers(series: TimeSeries, window, exponents, condition_limit: float = CONDITION_LIMIT) -> FitResult:
    """Least-squares fit of ``P - 1`` on the basis ``{t**e}``.

    Raises
    ------
    IllPosedFitError
        Too few samples (fewer than four per coefficient), numerical rank
        deficiency, or a scaled condition number above ``condition_limit``.
    """
    exponents = tuple(exponents)
    t, p = _select(series, window)
    n_coef = len(exponents)
    if n_coef == 0:
        raise ValueError("need at least one exponent")
    if len(t) < SAMPLES_PER_COEFFICIENT * n_coef:
        raise IllPosedFitError(f"{len(t)} samples for {n_coef} coefficients; need at least "
                               f"{SAMPLES_PER_COEFFICIENT * n_coef}", rank=None)
    X = np.column_stack([t ** float(e) for e in exponents])
    scale = np.linalg.norm(X, axis=0)
    if np.any(scale == 0):
        raise IllPosedFitError("a basis column vanishes on the window", condition=np.inf, rank=None)
    Xs = X / scale
    Q, R, piv = linalg.qr(Xs, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > diag[0] * np.finfo(float).eps * max(Xs.shape)))
    cond = float(np.linalg.cond(R)) if rank == n_coef else np.inf
    if rank < n_coef or cond > condition_limit:
        raise IllPosedFitError(f"ill-posed fit: rank {rank}/{n_coef}, condition {cond:.3g}",
                               condition=cond, rank=rank)
    y = p - 1.0
    z = linalg.solve_triangular(R, Q.T @ y)
    coef_scaled = np.empty(n_coef)
    coef_scaled[piv] = z
    coef = coef_scaled / scale
    residuals = y - X @ coef
    rms = float(np.sqrt(np.mean(residuals ** 2)))
    return FitResult(exponents, coef, (float(t[0]), float(t[-1])), rms, cond, len(t), t, residuals)


def fit_half_powers(series: TimeSeries, window=None, exponents=HALF_POWERS, **kwargs) -> FitResult:
    """Fit ``P = 1 + C1 t**(1/2) + C2 t + ... + C6 t**3`` (default exponents)."""
    return fit_powers(series, window, exponents, **kwargs)


def fit_integer_powers(series: TimeSeries, window=None, max_degree: int = 6, **kwargs) -> FitResult:
    """Fit ``P = 1 + sum_{k=1..max_degree} C_k t**k``."""
    return fit_powers(series, window, tuple(Fraction(k) for k in range(1, max_degree + 1)), **kwargs)


def _local_extrema(values, kind):
    v = values
    if kind == "max":
        return np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])) + 1
    return np.flatnonzero((v[1:-1] < v[:-2]) & (v[1:-1] <= v[2:])) + 1


def envelope_maxima(series: TimeSeries, window=None):
    """Times and values of local maxima (three-point comparison)."""
    t, p = _select(series, window)
    idx = _local_extrema(p, "max")
    return t[idx], p[idx]


def oscillation_minima(series: TimeSeries, window=None):
    """Local minima of ``P``, refined by a parabola through three samples."""
    t, p = _select(series, window)
    idx = _local_extrema(p, "min")
    out = []
    for i in idx:
        t0, t1, t2 = t[i - 1:i + 2]
        p0, p1, p2 = p[i - 1:i + 2]
        denom = (t0 - t1) * (t0 - t2) * (t1 - t2)
        a = (t2 * (p1 - p0) + t1 * (p0 - p2) + t0 * (p2 - p1)) / denom
        b = (t2 * t2 * (p0 - p1) + t1 * t1 * (p2 - p0) + t0 * t0 * (p1 - p2)) / denom
        out.append(-b / (2.0 * a) if a > 0 else t1)
    return np.array(out)


def _is_oscillatory(p):
    turns = np.sum(np.diff(np.sign(np.diff(p))) != 0)
    return turns >= 4


def loglog_slope(series: TimeSeries, window=None, envelope: str | bool = "auto") -> float:
    """Least-squares slope of ``ln P`` against ``ln t``.

    With ``envelope='auto'`` an oscillating series (four or more turning
    points) is reduced to its local maxima first.

    Raises
    ------
    ValueError
        If any ``P <= 0`` or ``t <= 0`` in the window, or fewer than two
        points remain.
    """
    t, p = _select(series, window)
    if np.any(p <= 0) or np.any(t <= 0):
        raise ValueError("log-log slope needs P > 0 and t > 0 throughout the window")
    use_env = _is_oscillatory(p) if envelope == "auto" else bool(envelope)
    if use_env:
        idx = _local_extrema(p, "max")
        t, p = t[idx], p[idx]
    if len(t) < 2:
        raise ValueError("fewer than two points for the slope")
    A = np.column_stack([np.log(t), np.ones_like(t)])
    slope, _ = np.linalg.lstsq(A, np.log(p), rcond=None)[0]
    return float(slope)
