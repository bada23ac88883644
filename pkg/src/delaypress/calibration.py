"""Communication delay identification from commanded vs. measured velocity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from delaypress.errors import DataError, DegenerateInputError, ParameterError

_GRID_TOL = 1e-9


@dataclass(frozen=True)
class VelocitySeries:
    t0: float
    dt: float
    values: np.ndarray
    valid_from: float = -math.inf

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if not self.dt > 0:
            raise ParameterError(f"dt must be positive, got {self.dt}")
        if self.valid_from < self.t0:
            object.__setattr__(self, "valid_from", self.t0)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.values))


@dataclass(frozen=True)
class DelayEstimate:
    tau: float
    score: float
    lag_grid: tuple


def estimate_delay(commanded: VelocitySeries, measured: VelocitySeries, max_lag: float) -> DelayEstimate:
    """Integer-sample lag minimising the MSE between ``measured(t)`` and ``commanded(t - lag)``.

    Every candidate lag in ``[0, max_lag]`` is scored on the same window of
    measurement times, so scores are comparable across lags.
    """
    if not max_lag > 0:
        raise ParameterError(f"max_lag must be positive, got {max_lag}")
    dt = commanded.dt
    if abs(measured.dt - dt) > _GRID_TOL * dt:
        raise DataError(f"series must share dt ({commanded.dt} vs {measured.dt})")
    offset = (measured.t0 - commanded.t0) / dt
    if abs(offset - round(offset)) > 1e-6:
        raise DataError("series start times are not aligned to a common grid")
    offset = int(round(offset))
    max_k = int(math.floor(max_lag / dt + _GRID_TOL))

    # measurement index i <-> commanded index i + offset - k
    i_lo = max(
        math.ceil((measured.valid_from - measured.t0) / dt - _GRID_TOL),
        math.ceil((commanded.valid_from - commanded.t0) / dt - _GRID_TOL) - offset + max_k,
    )
    i_hi = min(len(measured.values), len(commanded.values) - offset)
    i_lo = max(i_lo, 0, max_k - offset)
    overlap = i_hi - i_lo
    if overlap <= 0 or overlap * dt < 5 * max_lag:
        raise DataError(
            f"valid overlap of {max(overlap, 0) * dt:g} is shorter than 5 * max_lag = {5 * max_lag:g}"
        )
    m = measured.values[i_lo:i_hi]
    c = commanded.values
    if np.ptp(m) == 0 or np.ptp(c[max(i_lo + offset - max_k, 0) : i_hi + offset]) == 0:
        raise DegenerateInputError("constant series: lag is unidentifiable")

    scores = np.empty(max_k + 1)
    for k in range(max_k + 1):
        shifted = c[i_lo + offset - k : i_hi + offset - k]
        scores[k] = np.mean((m - shifted) ** 2)
    best = int(np.argmin(scores))
    return DelayEstimate(tau=best * dt, score=float(scores[best]), lag_grid=(0.0, max_k * dt))


def synthetic_press_velocity(
    duration: float = 600.0,
    dt: float = 1.0,
    v_peak: float = 10.0,
    ramp: float = 60.0,
    plateau_end: float = 250.0,
    decay: float = 300.0,
    beta: float = 2.0,
) -> VelocitySeries:
    """Ramp-up, plateau and beta-law decay: the shape of a commanded press velocity."""
    t = dt * np.arange(int(round(duration / dt)) + 1)
    v = np.where(t < ramp, v_peak * t / ramp, v_peak)
    s = np.clip((t - plateau_end) / decay, 0.0, 1.0)
    v = np.where(t >= plateau_end, v_peak * (1.0 - s) ** beta, v)
    return VelocitySeries(t0=0.0, dt=dt, values=v)


def delayed_copy(series: VelocitySeries, lag_samples: int, valid_from: float = -math.inf) -> VelocitySeries:
    """The series delayed by ``lag_samples``, padded with its first value."""
    v = series.values
    shifted = np.concatenate((np.full(lag_samples, v[0]), v[: len(v) - lag_samples]))
    return VelocitySeries(series.t0, series.dt, shifted, valid_from)
