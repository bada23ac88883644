"""Overshoot threshold g(beta): bisection, sweeps and the power-law fit."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from delaypress.dde import BetaControlParams, Overshoot, classify, integrate_nondim
from delaypress.errors import BracketError, ParameterError

DEFAULT_TOL = 1e-4
DEFAULT_HORIZON = 500.0
DEFAULT_STEPS_PER_DELAY = 200
BRACKET_MARGIN = 1e-3
DEFAULT_FIT_BETA_MIN = 4.0


@dataclass(frozen=True)
class ThresholdEstimate:
    beta: float
    g: float
    bracket_lo: float
    bracket_hi: float
    iterations: int
    tol: float
    horizon: float
    steps_per_delay: int


@dataclass(frozen=True)
class PowerLawFit:
    """``g(beta) ~= 1 - a * beta**(-p)``, fitted in log space."""

    a: float
    p: float
    rms_residual: float
    beta_range: tuple

    def predict(self, beta):
        return 1.0 - self.a * np.power(beta, -self.p)


def overshoots(
    beta: float,
    w0: float,
    horizon: float = DEFAULT_HORIZON,
    steps_per_delay: int = DEFAULT_STEPS_PER_DELAY,
) -> bool:
    """True iff the Euler trajectory for ``(beta, w0)`` overshoots 1 within ``horizon``."""
    params = BetaControlParams(beta, w0, steps_per_delay)
    params.require_control_regime()
    traj = integrate_nondim(params, horizon, stop_at_crossing=True)
    return isinstance(classify(traj, horizon), Overshoot)


def bisect_threshold(
    beta: float,
    tol: float = DEFAULT_TOL,
    horizon: float = DEFAULT_HORIZON,
    steps_per_delay: int = DEFAULT_STEPS_PER_DELAY,
    lo: float = BRACKET_MARGIN,
    hi: float = 1.0 - BRACKET_MARGIN,
) -> ThresholdEstimate:
    """Bisect on the overshoot predicate until the bracket is narrower than ``tol``.

    Relies on overshoot being monotone in ``w0``; ``lo`` must converge and
    ``hi`` must overshoot, otherwise :class:`BracketError` is raised.
    """
    if beta < 1:
        raise ParameterError(f"beta must be >= 1, got {beta}")
    if not 0.0 < tol < 1.0:
        raise ParameterError(f"tol must lie in (0, 1), got {tol}")
    lo_over = overshoots(beta, lo, horizon, steps_per_delay)
    hi_over = overshoots(beta, hi, horizon, steps_per_delay)
    if lo_over or not hi_over:
        raise BracketError(
            f"bracket [{lo}, {hi}] does not straddle the threshold for beta={beta} "
            f"(lo overshoots: {lo_over}, hi overshoots: {hi_over})",
            beta=beta, lo=lo, hi=hi, lo_overshoots=lo_over, hi_overshoots=hi_over,
        )
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if overshoots(beta, mid, horizon, steps_per_delay):
            hi = mid
        else:
            lo = mid
        iterations += 1
    return ThresholdEstimate(
        beta=beta,
        g=0.5 * (lo + hi),
        bracket_lo=lo,
        bracket_hi=hi,
        iterations=iterations,
        tol=tol,
        horizon=horizon,
        steps_per_delay=steps_per_delay,
    )


def verify_bracket(est: ThresholdEstimate) -> bool:
    """Re-run both bracket endpoints at the recorded horizon and resolution."""
    return not overshoots(est.beta, est.bracket_lo, est.horizon, est.steps_per_delay) and overshoots(
        est.beta, est.bracket_hi, est.horizon, est.steps_per_delay
    )


def resolution_check(
    beta: float,
    tol: float = DEFAULT_TOL,
    horizon: float = DEFAULT_HORIZON,
    steps_per_delay: int = DEFAULT_STEPS_PER_DELAY,
):
    """Compare g at ``(horizon, N)`` with g at ``(2*horizon, 2*N)``.

    Returns ``(coarse, fine, stable)`` where ``stable`` means the two
    estimates differ by less than ``5 * tol``.
    """
    coarse = bisect_threshold(beta, tol, horizon, steps_per_delay)
    fine = bisect_threshold(beta, tol, 2 * horizon, 2 * steps_per_delay)
    return coarse, fine, abs(fine.g - coarse.g) < 5 * tol


def _sweep_entry(beta, tol, horizon, steps_per_delay):
    try:
        return bisect_threshold(beta, tol, horizon, steps_per_delay)
    except BracketError as exc:
        return exc


def sweep_thresholds(
    betas: Iterable[float],
    tol: float = DEFAULT_TOL,
    horizon: float = DEFAULT_HORIZON,
    steps_per_delay: int = DEFAULT_STEPS_PER_DELAY,
    workers: Optional[int] = None,
) -> list[Union[ThresholdEstimate, BracketError]]:
    """Threshold estimate for each beta, in input order.

    Entries whose bracket fails are returned as the :class:`BracketError`
    instance instead of aborting the sweep.
    """
    betas = list(betas)
    for b in betas:
        if b < 1:
            raise ParameterError(f"beta must be >= 1, got {b}")
    job = partial(_sweep_entry, tol=tol, horizon=horizon, steps_per_delay=steps_per_delay)
    if workers and workers > 1 and len(betas) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(job, betas))
    return [job(b) for b in betas]


def log_spaced_betas(lo: float, hi: float, count: int) -> np.ndarray:
    return np.logspace(math.log10(lo), math.log10(hi), count)


def fit_power_law(points: Sequence[tuple[float, float]]) -> PowerLawFit:
    """Least-squares line through ``(log beta, log(1 - g))``."""
    if len(points) < 2:
        raise ParameterError("need at least 2 points to fit")
    beta = np.array([b for b, _ in points], dtype=float)
    g = np.array([v for _, v in points], dtype=float)
    if np.any(~((g > 0) & (g < 1))):
        raise ParameterError("all g values must lie in (0, 1)")
    if np.any(beta <= 0):
        raise ParameterError("beta values must be positive")
    if len(np.unique(beta)) != len(beta):
        raise ParameterError("beta values must be distinct")
    x = np.log(beta)
    y = np.log1p(-g)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (intercept + slope * x)
    return PowerLawFit(
        a=float(np.exp(intercept)),
        p=float(-slope),
        rms_residual=float(np.sqrt(np.mean(resid**2))),
        beta_range=(float(beta.min()), float(beta.max())),
    )


def optimal_initial_velocity(ell: float, tau: float, beta: float, g: float) -> float:
    """Fastest non-overshooting start velocity ``ell * g / tau``.

    ``beta`` only identifies which threshold ``g`` belongs to.
    """
    if ell <= 0 or tau <= 0:
        raise ParameterError(f"ell and tau must be positive, got ell={ell}, tau={tau}")
    if not 0.0 < g < 1.0:
        raise ParameterError(f"g must lie in (0, 1), got {g}")
    return ell * g / tau
