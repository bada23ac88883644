"""Finite-time blow-up of ``z = 1 / (1 - u)``.

Under this change of variables the overshoot of ``u`` past 1 becomes blow-up
of ``z``, governed by ``dz/dt = w0 * z(t)**2 / z(t - 1)**beta`` with history
``z(t) = 1 / (1 - w0 t)`` on ``[0, 1]``. Near the blow-up time
``z(t) ~ c / (t* - t)`` with ``c = 1 / (w0 * (1 - u(t* - 1))**beta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from delaypress.dde import BetaControlParams, Trajectory, crossing_time, integrate_nondim
from delaypress.errors import DomainError, InconsistencyError, ParameterError, ResolutionError

DEFAULT_Z_CAP = 1e12
RATE_WINDOW = 20
RATE_EDGE_SKIP = 2


@dataclass(frozen=True)
class BlowupReport:
    t_star: float
    c_est: float
    c_theory: float
    fit_rms: float
    samples_used: int

    @property
    def rel_err(self) -> float:
        return abs(self.c_est - self.c_theory) / self.c_theory


@dataclass(frozen=True)
class FiniteTimeBlowup:
    t_star: float


@dataclass(frozen=True)
class InfiniteTimeGrowth:
    pass


def transform_to_z(u_traj: Trajectory) -> Trajectory:
    """``z = 1 / (1 - u)`` on the prefix of samples strictly below 1."""
    u = u_traj.values
    at_or_above = np.flatnonzero(u >= 1.0)
    end = int(at_or_above[0]) if at_or_above.size else len(u)
    if end == 0:
        raise DomainError("trajectory has no samples below 1")
    return Trajectory(
        dt=u_traj.dt,
        delay_steps=u_traj.delay_steps,
        values=1.0 / (1.0 - u[:end]),
        start_time=u_traj.start_time,
    )


def integrate_z(params: BetaControlParams, horizon: float, z_cap: float = DEFAULT_Z_CAP) -> Trajectory:
    """Explicit Euler on the z-form, stopping once a sample exceeds ``z_cap``.

    The last sample may exceed ``z_cap``; every earlier one is below it.
    """
    params.require_control_regime()
    if z_cap <= 1:
        raise ParameterError(f"z_cap must exceed 1, got {z_cap}")
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    N = params.steps_per_delay
    dt = params.dt
    w0, beta = params.w0, params.beta
    n_steps = math.ceil(horizon * N - 1e-9)
    z = [1.0 / (1.0 - w0 * n * dt) for n in range(N + 1)]
    if z[-1] > z_cap:
        raise ParameterError("history already exceeds z_cap")
    coef = dt * w0
    for n in range(N, n_steps):
        zn = z[n]
        nxt = zn + coef * zn * zn / z[n - N] ** beta
        z.append(nxt)
        if not nxt <= z_cap:
            break
    return Trajectory(dt=dt, delay_steps=N, values=np.array(z))


def fit_rate_constant(u_traj: Trajectory, t_star: float, window: int = RATE_WINDOW,
                      skip: int = RATE_EDGE_SKIP):
    """Fit ``1 - u = (t* - t) / c`` through the origin on the samples just before ``t*``.

    Uses ``window`` samples ending ``skip`` samples before the last
    pre-crossing sample. Returns ``(c, rms, used)``.
    """
    u = u_traj.values
    t = u_traj.times
    pre = np.flatnonzero((t < t_star) & (u < 1.0))
    if pre.size < window + skip:
        raise ResolutionError(f"need {window + skip} samples before t*, have {pre.size}")
    idx = pre[-(window + skip) : len(pre) - skip] if skip else pre[-window:]
    y = 1.0 - u[idx]
    d = t_star - t[idx]
    slope = float(d @ y) / float(d @ d)
    rms = float(np.sqrt(np.mean((y - slope * d) ** 2)))
    return 1.0 / slope, rms, len(idx)


def estimate_blowup(u_traj: Trajectory, params: BetaControlParams, window: int = RATE_WINDOW) -> BlowupReport:
    """Blow-up time and rate constant from an overshooting u-trajectory.

    ``c_est`` is regressed from the samples just before the crossing;
    ``c_theory`` is the reciprocal of the delayed right-hand side at ``t*``.
    """
    t_star = crossing_time(u_traj)
    if t_star is None:
        raise DomainError("trajectory never crosses 1, so z does not blow up")
    if t_star - 1.0 < u_traj.start_time:
        raise DomainError("crossing inside the initial delay interval")
    c_est, rms, used = fit_rate_constant(u_traj, t_star, window)
    u_delayed = u_traj.value_at(t_star - 1.0)
    c_theory = 1.0 / (params.w0 * (1.0 - u_delayed) ** params.beta)
    return BlowupReport(t_star=t_star, c_est=c_est, c_theory=c_theory, fit_rms=rms, samples_used=used)


def classify_blowup(
    params: BetaControlParams, g_beta: float, horizon: float = 500.0
) -> Union[FiniteTimeBlowup, InfiniteTimeGrowth]:
    """Predict blow-up from ``w0 > g_beta`` and confirm it by simulation.

    Raises :class:`InconsistencyError` when the simulation disagrees with the
    prediction at this resolution and horizon.
    """
    params.require_control_regime()
    traj = integrate_nondim(params, horizon, stop_at_crossing=True)
    t_star = crossing_time(traj)
    predicted = params.w0 > g_beta
    if predicted and t_star is not None:
        return FiniteTimeBlowup(t_star)
    if not predicted and t_star is None:
        return InfiniteTimeGrowth()
    raise InconsistencyError(
        f"w0={params.w0} vs g={g_beta} predicts {'blow-up' if predicted else 'no blow-up'}, "
        f"but simulation (N={params.steps_per_delay}, horizon={horizon}) "
        f"{'crossed at t=%g' % t_star if t_star is not None else 'never crossed'}"
    )


def riccati_solution(w0: float, t: np.ndarray) -> np.ndarray:
    """Delay-free case ``z' = w0 z**2, z(0) = 1``: ``z = 1 / (1 - w0 t)``."""
    return 1.0 / (1.0 - w0 * np.asarray(t, dtype=float))


def rate_product(z_traj: Trajectory, t_star: float, last: Optional[int] = None) -> np.ndarray:
    """``(t* - t) * z(t)`` on the trailing samples, which tends to ``c``."""
    t = z_traj.times
    keep = t < t_star
    prod = (t_star - t[keep]) * z_traj.values[keep]
    return prod if last is None else prod[-last:]
