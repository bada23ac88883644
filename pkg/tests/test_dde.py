import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

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
from delaypress.errors import DomainError, NumericError, ParameterError
from conftest import sequential_euler


def test_zero_velocity_stays_at_rest():
    traj = integrate_nondim(BetaControlParams(2, 0.0, 10), 5)
    assert len(traj) == 51
    assert np.all(traj.values == 0.0)


def test_hand_unrolled_single_step_grid():
    # u2 = 0.5 + 0.5 * |1 - 0|^2, u3 = 1.0 + 0.5 * |1 - 0.5|^2
    traj = integrate_nondim(BetaControlParams(2, 0.5, 1), 3)
    assert traj.values.tolist() == [0.0, 0.5, 1.0, 1.125]
    assert traj.dt == 1.0 and traj.delay_steps == 1


def test_ramp_is_exact():
    N = 37
    traj = integrate_nondim(BetaControlParams(3, 0.4, N), 2)
    n = np.arange(N + 1)
    assert np.array_equal(traj.values[: N + 1], 0.4 * (1.0 / N) * n)


@pytest.mark.parametrize("beta,w0,N", [(1, 0.3, 7), (2, 0.77, 13), (5, 0.95, 20), (2.5, 0.6, 50)])
def test_block_solver_matches_step_loop(beta, w0, N):
    traj = integrate_nondim(BetaControlParams(beta, w0, N), 6)
    oracle = sequential_euler(beta, w0, N, 6 * N)
    np.testing.assert_allclose(traj.values, oracle, rtol=1e-14, atol=0)


def test_sample_count_follows_horizon():
    traj = integrate_nondim(BetaControlParams(2, 0.55, 100), 10)
    assert len(traj) == 1001
    assert traj.times[-1] == pytest.approx(10.0)


def test_fig4_curves_are_ordered():
    runs = [integrate_nondim(BetaControlParams(2, w0, 100), 10).values for w0 in (0.55, 0.66, 0.77)]
    for u in runs:
        assert np.all(np.diff(u) >= 0)
    assert np.all(runs[0][1:] < runs[1][1:])
    assert np.all(runs[1][1:] < runs[2][1:])


def test_deterministic_bytes():
    p = BetaControlParams(5, 0.83, 200)
    a = integrate_nondim(p, 30).values
    b = integrate_nondim(p, 30).values
    assert a.tobytes() == b.tobytes()


def test_stop_at_crossing_is_a_prefix():
    p = BetaControlParams(2, 0.9, 100)
    full = integrate_nondim(p, 5).values
    cut = integrate_nondim(p, 5, stop_at_crossing=True).values
    assert len(cut) < len(full)
    assert np.array_equal(full[: len(cut)], cut)
    assert cut[-1] > 1


@pytest.mark.parametrize("kwargs", [dict(steps_per_delay=0), dict(steps_per_delay=2.5), dict(beta=0.0),
                                    dict(w0=math.nan)])
def test_invalid_params(kwargs):
    base = dict(beta=2.0, w0=0.5, steps_per_delay=10)
    base.update(kwargs)
    with pytest.raises(ParameterError):
        BetaControlParams(**base)


def test_horizon_below_one_rejected():
    with pytest.raises(ParameterError):
        integrate_nondim(BetaControlParams(2, 0.5, 10), 0.5)


def test_runaway_overshoot_raises_numeric_error():
    with pytest.raises(NumericError):
        integrate_nondim(BetaControlParams(2, 0.99, 10), 200)


# closed form on [0, 2]

def test_closed_form_values():
    assert exact_segment_u(BetaControlParams(3, 0.3), 1.0) == pytest.approx(0.3)
    assert exact_segment_u(BetaControlParams(1, 0.5), 2.0) == pytest.approx(0.875, abs=1e-15)
    assert exact_segment_u(BetaControlParams(1, 0.5), 1.5) == pytest.approx(0.71875, abs=1e-15)


@pytest.mark.parametrize("beta", [1.0, 2.0, 3.5, 10.0])
@pytest.mark.parametrize("w0", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("t", [1.25, 1.5, 2.0])
def test_closed_form_against_quadrature(beta, w0, t):
    integral, _ = quad(lambda s: w0 * (1 - w0 * (s - 1)) ** beta, 1.0, t, epsabs=1e-14)
    assert exact_segment_u(BetaControlParams(beta, w0), t) == pytest.approx(w0 + integral, rel=1e-12)


def test_closed_form_cross_checks_fine_euler():
    N = 10_000
    traj = integrate_nondim(BetaControlParams(1, 0.5, N), 2)
    assert traj.values[int(1.5 * N)] == pytest.approx(0.71875, abs=1e-3)


@pytest.mark.parametrize("t", [-0.1, 2.0001])
def test_closed_form_domain(t):
    with pytest.raises(DomainError):
        exact_segment_u(BetaControlParams(2, 0.5), t)


@settings(max_examples=200, deadline=None)
@given(
    beta=st.floats(1, 50),
    w0=st.floats(0.01, 0.98),
    gap=st.floats(1e-3, 0.5),
    t=st.floats(1e-3, 2.0),
)
def test_early_comparison_proved_on_first_two_delays(beta, w0, gap, t):
    w1 = min(w0 + gap, 0.99)
    assert exact_segment_u(BetaControlParams(beta, w0), t) < exact_segment_u(BetaControlParams(beta, w1), t)


# crossing and classification

def test_crossing_time_examples():
    tr = lambda v: Trajectory(dt=1.0, delay_steps=1, values=v)
    assert crossing_time(tr([0.0, 0.3, 0.6, 0.9])) is None
    assert crossing_time(tr([0.0, 0.5, 1.0, 1.125])) == 2.0
    assert crossing_time(tr([0.0, 0.6, 0.9, 1.1])) == pytest.approx(2.5)
    # touching 1 without exceeding it is not a crossing
    assert crossing_time(tr([0.0, 0.5, 1.0])) is None


def test_classify_examples():
    zero = integrate_nondim(BetaControlParams(2, 0.0, 10), 5)
    assert classify(zero, 5) == Converging(0.0, 5)
    hand = integrate_nondim(BetaControlParams(2, 0.5, 1), 3)
    assert classify(hand, 3) == Overshoot(2.0)
    fast = integrate_nondim(BetaControlParams(2, 0.77, 1000), 10)
    report = classify(fast, 10)
    assert isinstance(report, Overshoot) and 1 < report.t_cross < 10


def test_classify_converging_run():
    traj = integrate_nondim(BetaControlParams(2, 0.3, 100), 200)
    report = classify(traj, 200)
    assert isinstance(report, Converging)
    assert 0.95 < report.final_value < 1


def test_classify_tie_at_final_sample_is_overshoot():
    traj = Trajectory(dt=1.0, delay_steps=1, values=[0.0, 0.5, 1.0])
    assert classify(traj) == Overshoot(2.0)


def test_classify_negative_velocity_undetermined():
    traj = integrate_nondim(BetaControlParams(2, -0.2, 10), 3)
    assert isinstance(classify(traj, 3), Undetermined)


def test_classify_empty():
    with pytest.raises(ParameterError):
        classify(Trajectory(dt=1.0, delay_steps=1, values=[]), 1)


@settings(max_examples=60, deadline=None)
@given(beta=st.floats(1, 20), w0=st.floats(0.05, 0.99), N=st.integers(1, 60))
def test_monotone_and_suffix_crossing(beta, w0, N):
    traj = integrate_nondim(BetaControlParams(beta, w0, N), 6, stop_at_crossing=True)
    u = traj.values
    assert np.all(np.diff(u) >= 0)
    above = np.flatnonzero(u > 1)
    if above.size:
        assert np.array_equal(above, np.arange(above[0], len(u)))
        assert crossing_time(traj) > 1
