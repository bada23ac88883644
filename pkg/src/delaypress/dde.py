"""Nondimensional delayed press model.

The model is the scalar delay equation

    du/dt = w0 * |1 - u(t - 1)|**beta   (t > 1),    u(t) = w0 * t   (0 <= t <= 1)

integrated with the explicit Euler recurrence on a grid of ``N`` steps per
delay, so that the delayed sample is an exact index shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from delaypress.errors import DomainError, NumericError, ParameterError

DEFAULT_STEPS_PER_DELAY = 100
DEFAULT_CLASSIFY_HORIZON = 200.0


@dataclass(frozen=True)
class BetaControlParams:
    """Nondimensional parameters ``(beta, w0)`` and the grid resolution ``N``."""

    beta: float
    w0: float
    steps_per_delay: int = DEFAULT_STEPS_PER_DELAY

    def __post_init__(self):
        if not (isinstance(self.steps_per_delay, (int, np.integer)) and self.steps_per_delay >= 1):
            raise ParameterError(f"steps_per_delay must be a positive integer, got {self.steps_per_delay!r}")
        if not math.isfinite(self.beta) or self.beta <= 0:
            raise ParameterError(f"beta must be finite and > 0, got {self.beta!r}")
        if not math.isfinite(self.w0):
            raise ParameterError(f"w0 must be finite, got {self.w0!r}")

    @property
    def dt(self) -> float:
        return 1.0 / self.steps_per_delay

    def require_control_regime(self) -> None:
        """Raise unless ``beta >= 1`` and ``0 < w0 < 1``."""
        if self.beta < 1:
            raise ParameterError(f"beta must be >= 1, got {self.beta}")
        if not 0.0 < self.w0 < 1.0:
            raise ParameterError(f"w0 must lie in (0, 1), got {self.w0}")


@dataclass(frozen=True)
class Trajectory:
    """Samples ``values[k]`` of a solution at times ``start_time + k * dt``."""

    dt: float
    delay_steps: int
    values: np.ndarray = field(repr=False)
    start_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    def __len__(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.start_time + self.dt * np.arange(len(self.values))

    @property
    def end_time(self) -> float:
        return self.start_time + self.dt * (len(self.values) - 1)

    def value_at(self, t: float) -> float:
        """Linear interpolation of the samples at time ``t``."""
        return float(np.interp(t, self.times, self.values))


@dataclass(frozen=True)
class Overshoot:
    t_cross: float


@dataclass(frozen=True)
class Converging:
    final_value: float
    horizon: float


@dataclass(frozen=True)
class Undetermined:
    horizon: float


OvershootReport = Union[Overshoot, Converging, Undetermined]


def delayed_euler(
    ramp: np.ndarray,
    rate: Callable[[np.ndarray], np.ndarray],
    delay_steps: int,
    dt: float,
    n_steps: int,
    stop_above: Optional[float] = None,
) -> np.ndarray:
    """Run ``y[n+1] = y[n] + dt * rate(y[n-N])`` after a prescribed ramp.

    ``ramp`` holds ``y[0..N]``. Each block of ``N`` steps only reads samples
    from the previous block, so a block is one sequential accumulation.
    With ``stop_above`` set, integration ends after the first block whose
    last sample exceeds that level.
    """
    N = delay_steps
    if len(ramp) != N + 1:
        raise ParameterError("ramp must contain delay_steps + 1 samples")
    total = max(n_steps, N) + 1
    y = np.empty(total)
    y[: N + 1] = ramp
    n = N
    with np.errstate(over="ignore", invalid="ignore"):
        while n < total - 1:
            m = min(N, total - 1 - n)
            incr = dt * rate(y[n - N : n - N + m])
            block = np.add.accumulate(np.concatenate(([y[n]], incr)))
            if not np.all(np.isfinite(block)):
                bad = n + int(np.argmin(np.isfinite(block)))
                raise NumericError(f"non-finite value at step {bad} (t = {bad * dt:g})")
            y[n + 1 : n + m + 1] = block[1:]
            n += m
            if stop_above is not None and y[n] > stop_above:
                return y[: n + 1]
    return y


def integrate_nondim(
    params: BetaControlParams, horizon: float, *, stop_at_crossing: bool = False
) -> Trajectory:
    """Explicit Euler solution on ``[0, horizon]`` with ``dt = 1/N``.

    ``stop_at_crossing`` truncates the run at the end of the first delay
    block in which a sample exceeds 1; the prefix is unchanged.
    """
    if not math.isfinite(horizon) or horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon!r}")
    N = params.steps_per_delay
    dt = params.dt
    n_steps = math.ceil(horizon * N - 1e-9)
    w0, beta = params.w0, params.beta
    ramp = w0 * dt * np.arange(N + 1)
    values = delayed_euler(
        ramp,
        lambda delayed: w0 * np.abs(1.0 - delayed) ** beta,
        N,
        dt,
        n_steps,
        stop_above=1.0 if stop_at_crossing else None,
    )
    return Trajectory(dt=dt, delay_steps=N, values=values)


def exact_segment_u(params: BetaControlParams, t: float) -> float:
    """Closed-form solution on ``[0, 2]``.

    On ``[1, 2]`` the delayed argument is the linear ramp, so the integral is
    elementary: ``w0 + (1 - (1 - w0 (t-1))**(beta+1)) / (beta + 1)``.
    """
    if not 0.0 <= t <= 2.0:
        raise DomainError(f"closed form only holds on [0, 2], got t = {t}")
    w0, beta = params.w0, params.beta
    if t <= 1.0:
        return w0 * t
    return w0 + (1.0 - (1.0 - w0 * (t - 1.0)) ** (beta + 1.0)) / (beta + 1.0)


def crossing_time(traj: Trajectory) -> Optional[float]:
    """First time the trajectory reaches 1, by linear interpolation.

    Returns None unless some sample strictly exceeds 1. A sample equal to 1
    is itself the crossing point.
    """
    u = traj.values
    above = u > 1.0
    if not above.any():
        return None
    i = int(np.argmax(u >= 1.0))
    if u[i] == 1.0 or i == 0:
        return traj.start_time + i * traj.dt
    frac = (1.0 - u[i - 1]) / (u[i] - u[i - 1])
    return traj.start_time + (i - 1 + frac) * traj.dt


def classify(traj: Trajectory, horizon: Optional[float] = None, plateau_tol: float = 1e-12) -> OvershootReport:
    """Label a trajectory as overshooting or converging.

    ``plateau_tol`` bounds the per-step decrease tolerated before a
    trajectory is treated as degenerate (non-monotone, e.g. ``w0 < 0``).
    """
    if len(traj) == 0:
        raise ParameterError("empty trajectory")
    if plateau_tol <= 0:
        raise ParameterError("plateau_tol must be positive")
    if horizon is None:
        horizon = traj.end_time
    u = traj.values
    if len(u) > 1 and np.min(np.diff(u)) < -plateau_tol:
        return Undetermined(horizon)
    t_cross = crossing_time(traj)
    if t_cross is not None:
        return Overshoot(t_cross)
    if u[-1] == 1.0:
        # tie at exactly 1 counts as overshoot so that bisection has a total predicate
        return Overshoot(traj.start_time + int(np.argmax(u == 1.0)) * traj.dt)
    return Converging(float(u[-1]), horizon)
