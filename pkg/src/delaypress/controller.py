"""Dimensional press simulation with the velocity-capped beta-control law."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from delaypress.dde import Trajectory, delayed_euler
from delaypress.errors import ParameterError

STALL_MOTION_FLOOR = 1e-6
STALL_GAP_FLOOR = 1e-6


@dataclass(frozen=True)
class PressParams:
    ell: float
    tau: float
    vmax: float
    beta: float
    dt: float
    g_of_beta: float

    def __post_init__(self):
        for name in ("ell", "tau", "vmax", "dt"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive, got {value!r}")
        if self.beta < 1:
            raise ParameterError(f"beta must be >= 1, got {self.beta}")
        if not 0.0 < self.g_of_beta < 1.0:
            raise ParameterError(f"g_of_beta must lie in (0, 1), got {self.g_of_beta}")
        if self.dt >= self.tau:
            raise ParameterError(f"dt must be smaller than tau (dt={self.dt}, tau={self.tau})")

    @property
    def delay_steps(self) -> int:
        # tolerate tau/dt landing a hair below an integer
        return math.floor(self.tau / self.dt + 1e-9)


@dataclass(frozen=True)
class DerivedControl:
    v0: float
    ell1: float


@dataclass(frozen=True)
class PressTimes:
    t_within_1: Optional[float]
    t_within_01: Optional[float]
    stop_gap: Optional[float] = None


def derive_control(params: PressParams) -> DerivedControl:
    """``v0 = min(ell*G/tau, vmax)`` and the switch distance ``ell1 = tau*vmax/G``."""
    G = params.g_of_beta
    return DerivedControl(
        v0=min(params.ell * G / params.tau, params.vmax),
        ell1=params.tau * params.vmax / G,
    )


def command_velocity(X: float, params: PressParams, derived: DerivedControl) -> float:
    """Commanded velocity for the delayed position reading ``X``."""
    ell, ell1 = params.ell, derived.ell1
    return derived.v0 * abs(min(ell1, ell - X) / min(ell1, ell)) ** params.beta


def default_horizon(params: PressParams) -> float:
    return 10.0 * total_stop_time_bound(params)


def _simulate(params, v0, rate, horizon):
    if horizon is None:
        horizon = default_horizon(params)
    N = params.delay_steps
    dt = params.dt
    n_steps = math.ceil(horizon / dt - 1e-9)
    ramp = v0 * dt * np.arange(N + 1)
    x = delayed_euler(ramp, rate, N, dt, n_steps)
    return Trajectory(dt=dt, delay_steps=N, values=x)


def simulate_press_p1(params: PressParams, horizon: Optional[float] = None) -> Trajectory:
    """Linear law ``v0 * |(ell - X) / ell|`` without the ``ell1`` clamp.

    ``v0`` is ``min(ell * G / tau, vmax)`` with ``G = params.g_of_beta``;
    callers pass the beta = 1 threshold there. ``params.beta`` is ignored.
    """
    v0 = derive_control(params).v0
    ell = params.ell
    return _simulate(params, v0, lambda X: v0 * np.abs((ell - X) / ell), horizon)


def simulate_press_p2(params: PressParams, horizon: Optional[float] = None) -> Trajectory:
    """Capped beta-control law, see :func:`command_velocity`."""
    derived = derive_control(params)
    v0, ell1, ell, beta = derived.v0, derived.ell1, params.ell, params.beta
    denom = min(ell1, ell)
    return _simulate(
        params, v0, lambda X: v0 * np.abs(np.minimum(ell1, ell - X) / denom) ** beta, horizon
    )


def press_time(traj: Trajectory, eps: float, ell: float) -> Optional[float]:
    """Smallest grid time ``t_n`` with ``ell - x[n - N] < eps``.

    Reads the delayed sample, so the earliest possible answer is ``t_N``.
    """
    if eps <= 0:
        raise ParameterError(f"eps must be positive, got {eps}")
    N = traj.delay_steps
    x = traj.values
    if len(x) <= N:
        return None
    hits = np.flatnonzero(ell - x[: len(x) - N] < eps)
    if hits.size == 0:
        return None
    return traj.start_time + (int(hits[0]) + N) * traj.dt


def arrival_time(traj: Trajectory, eps: float, ell: float) -> Optional[float]:
    """Like :func:`press_time` but on the undelayed position."""
    hits = np.flatnonzero(ell - traj.values < eps)
    if hits.size == 0:
        return None
    return traj.start_time + int(hits[0]) * traj.dt


def detect_stall(traj: Trajectory, ell: float, window: float) -> Optional[float]:
    """Gap ``ell - x_final`` if the head has effectively stopped short of the target.

    Stopped means total displacement over the trailing ``window`` is below
    ``STALL_MOTION_FLOOR``; gaps below ``STALL_GAP_FLOOR`` count as arrival.
    """
    if window <= 0:
        raise ParameterError(f"window must be positive, got {window}")
    x = traj.values
    k = min(len(x) - 1, math.ceil(window / traj.dt - 1e-9))
    if k < 1:
        return None
    moved = x[-1] - x[-1 - k]
    gap = ell - x[-1]
    if abs(moved) < STALL_MOTION_FLOOR and gap >= STALL_GAP_FLOOR:
        return float(gap)
    return None


def total_stop_time_bound(params: PressParams) -> float:
    """Time to reach the target plus one delay to notice it: ``max(tau, ell/vmax) + tau``."""
    return max(params.tau, params.ell / params.vmax) + params.tau


def press_times(traj: Trajectory, params: PressParams) -> PressTimes:
    return PressTimes(
        t_within_1=press_time(traj, 1.0, params.ell),
        t_within_01=press_time(traj, 0.1, params.ell),
        stop_gap=detect_stall(traj, params.ell, 2.0 * params.tau),
    )


@dataclass(frozen=True)
class PressRow:
    """One line of the press-time table."""

    ell: float
    problem: int
    beta: float
    v0: float
    ell1: float
    times: PressTimes
    ratio_1: Optional[float]
    ratio_01: Optional[float]


def _ratio(t, ref):
    if t is None or ref is None:
        return None
    return t / ref


def press_table(
    ell: float,
    tau: float,
    vmax: float,
    dt: float,
    betas,
    problem: str = "both",
    thresholds=None,
    horizon: Optional[float] = None,
) -> list[PressRow]:
    """Problem-1 baseline and Problem-2 rows for each beta.

    ``thresholds`` maps beta to G; by default it is computed with
    :func:`threshold_for_press`. Ratios are taken against the Problem-1
    times at the same ``ell``, which are always simulated.
    """
    if problem not in ("1", "2", "both"):
        raise ParameterError(f"problem must be 1, 2 or both, got {problem!r}")
    if thresholds is None:
        thresholds = {}
    N = PressParams(ell, tau, vmax, 1.0, dt, 0.5).delay_steps

    def G(beta):
        if beta not in thresholds:
            thresholds[beta] = threshold_for_press(beta, N)
        return thresholds[beta]

    base = PressParams(ell, tau, vmax, 1.0, dt, G(1.0))
    base_times = press_times(simulate_press_p1(base, horizon), base)
    rows = []
    if problem in ("1", "both"):
        d = derive_control(base)
        rows.append(PressRow(ell, 1, 1.0, d.v0, d.ell1, base_times, 1.0 if base_times.t_within_1 else None,
                             1.0 if base_times.t_within_01 else None))
    if problem in ("2", "both"):
        for beta in betas:
            params = PressParams(ell, tau, vmax, float(beta), dt, G(float(beta)))
            d = derive_control(params)
            times = press_times(simulate_press_p2(params, horizon), params)
            rows.append(PressRow(
                ell, 2, float(beta), d.v0, d.ell1, times,
                _ratio(times.t_within_1, base_times.t_within_1),
                _ratio(times.t_within_01, base_times.t_within_01),
            ))
    return rows


def threshold_for_press(beta: float, delay_steps: int, tol: float = 1e-4, horizon: float = 500.0) -> float:
    """Threshold G computed on the same grid the press is simulated on.

    With ``tau / dt = N`` the press recurrence divided by ``ell`` is the
    nondimensional recurrence at ``N`` steps per delay, so the discrete
    threshold at that ``N`` is the one that actually separates overshoot.
    """
    from delaypress.threshold import bisect_threshold

    return bisect_threshold(beta, tol, horizon, delay_steps).g
