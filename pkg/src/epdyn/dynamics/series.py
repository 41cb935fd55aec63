"""Sampled survival probabilities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..models import ModelSpec


@dataclass(frozen=True)
class TimeSeries:
    """Survival probability ``P(t)`` on an increasing time grid.

    ``amplitude`` holds the complex survival amplitude when the method
    produces one; ``meta`` carries method-specific diagnostics (error
    estimates, anchor times, norm drift).
    """

    times: np.ndarray
    values: np.ndarray
    method: str
    model: ModelSpec
    amplitude: np.ndarray | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise ValueError("times and values must be 1-D arrays of equal length")
        if np.any(np.diff(times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.times)

    def window(self, t_min, t_max) -> "TimeSeries":
        """Sub-series restricted to ``t_min <= t <= t_max``."""
        mask = (self.times >= t_min) & (self.times <= t_max)
        amp = None if self.amplitude is None else self.amplitude[mask]
        return TimeSeries(self.times[mask], self.values[mask], self.method, self.model,
                          amp, dict(self.meta))


def as_time_grid(t_grid) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.ndim != 1 or np.any(~np.isfinite(t)) or np.any(t < 0):
        raise ValueError("time grid must be finite and non-negative")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return t


def linear_grid(t_max, step=0.05, t_min=0.0) -> np.ndarray:
    count = int(round((t_max - t_min) / step)) + 1
    return np.linspace(t_min, t_max, count)


def log_grid(t_min, t_max, per_decade=20) -> np.ndarray:
    """Log-spaced grid with at least ``per_decade`` points per decade."""
    decades = np.log10(t_max / t_min)
    return np.logspace(np.log10(t_min), np.log10(t_max), max(2, int(np.ceil(decades * per_decade)) + 1))
