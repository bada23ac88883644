"""Simulation and analysis of delayed press control under the beta-control law."""

from delaypress.errors import (
    BracketError,
    DataError,
    DegenerateInputError,
    DomainError,
    InconsistencyError,
    NumericError,
    ParameterError,
    ResolutionError,
)
from delaypress.dde import (
    BetaControlParams,
    Converging,
    Overshoot,
    Trajectory,
    Undetermined,
    classify,
    crossing_time,
    exact_segment_u,
    integrate_nondim,
)
from delaypress.threshold import (
    PowerLawFit,
    ThresholdEstimate,
    bisect_threshold,
    fit_power_law,
    optimal_initial_velocity,
    overshoots,
    sweep_thresholds,
)
from delaypress.controller import (
    DerivedControl,
    PressParams,
    PressTimes,
    command_velocity,
    derive_control,
    detect_stall,
    press_time,
    simulate_press_p1,
    simulate_press_p2,
    total_stop_time_bound,
)
from delaypress.blowup import (
    BlowupReport,
    FiniteTimeBlowup,
    InfiniteTimeGrowth,
    classify_blowup,
    estimate_blowup,
    integrate_z,
    transform_to_z,
)
from delaypress.calibration import DelayEstimate, VelocitySeries, estimate_delay

__version__ = "0.1.0"
