import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twisim.analytics import (
    TwoInputParams,
    causality_conditions_digital_cause,
    causality_conditions_physical_cause,
    expected_cv_two_input,
    p_cv_digital_cause,
    p_cv_physical_cause,
    p_sim_violation_n,
    p_sim_violation_pair,
    twi_two_sensor_min_window,
)
from twisim.core import Constant, ParameterError, ShiftedExponential, UniformRange, trial_rng

times = st.floats(min_value=0.0, max_value=1e6)
widths = st.floats(min_value=0.0, max_value=1e6)


def test_two_sensor_min_window():
    # equal sensors: the window just covers one integration time
    assert twi_two_sensor_min_window(0.010, 0.010, 0.0, 0.0) == pytest.approx(0.010)
    # a slower second detection dominates
    assert twi_two_sensor_min_window(0.010, 0.030, 0.001, 0.005) == pytest.approx(0.034)
    # a long first integration dominates
    assert twi_two_sensor_min_window(0.050, 0.010, 0.001, 0.005) == pytest.approx(0.050)
    with pytest.raises(ParameterError):
        twi_two_sensor_min_window(0.010, 0.010, 0.005, 0.001)


def test_sim_violation_closed_form():
    assert p_sim_violation_pair(1.0, 1.5, 1.0) == pytest.approx(0.5)
    assert p_sim_violation_pair(1.0, 3.0, 1.0) == 1.0
    assert p_sim_violation_pair(1.0, 1.0, 1.0) == 0.0
    assert p_sim_violation_pair(1.0, 1.5, 0.0) == 1.0  # W=0: distinct raw times differ
    with pytest.raises(ParameterError):
        p_sim_violation_pair(2.0, 1.0, 1.0)


def test_sim_violation_n_uses_spread():
    assert p_sim_violation_n([1.0, 1.2, 1.5], 1.0) == pytest.approx(0.5)
    assert p_sim_violation_n([1.0], 1.0) == 0.0
    assert p_sim_violation_n([1.0], 0.0) == 0.0
    with pytest.raises(ParameterError):
        p_sim_violation_n([], 1.0)


def test_cv_closed_forms_mirror():
    # physical cause: digital copy early by 0.4 of a window
    assert p_cv_physical_cause(2.0, 1.6, 1.0) == pytest.approx(0.4)
    assert p_cv_physical_cause(1.6, 2.0, 1.0) == 0.0  # sensing first: no risk
    assert p_cv_physical_cause(2.0, 0.5, 1.0) == 1.0  # gap > W
    assert p_cv_physical_cause(2.0, 1.6, 0.0) == 1.0  # raw mode
    assert p_cv_digital_cause(1.6, 2.0, 1.0) == pytest.approx(0.4)
    assert p_cv_digital_cause(2.0, 1.6, 1.0) == 0.0


@given(t1=times, t2=times, w=widths)
@settings(max_examples=200, deadline=None)
def test_cv_probability_in_unit_interval(t1, t2, w):
    p = p_cv_physical_cause(t1, t2, w)
    assert 0.0 <= p <= 1.0
    assert p == p_cv_digital_cause(t2, t1, w)


@given(t1=times, t2=times, w=st.floats(min_value=1e-9, max_value=1e6))
@settings(max_examples=200, deadline=None)
def test_cv_nonincreasing_in_window(t1, t2, w):
    assert p_cv_physical_cause(t1, t2, 2.0 * w) <= p_cv_physical_cause(t1, t2, w) + 1e-12


def params(**kw):
    defaults = dict(t_s=0.010, tau_s=0.001, tau_a=0.0, t_min=0.001, t_max=0.005, w=0.0)
    defaults.update(kw)
    return TwoInputParams(**defaults)


def test_params_validation():
    with pytest.raises(ParameterError):
        params(t_s=0.0)
    with pytest.raises(ParameterError):
        params(t_min=0.006)
    with pytest.raises(ParameterError):
        params(tau_a=math.inf)
    # negative action time is legal (predictive sender, digital cause)
    params(tau_a=-0.001)


def test_conditions_physical_cause():
    p = params(t_s=0.001, tau_s=0.00001, tau_a=0.100, t_min=0.0, t_max=0.005)
    r = causality_conditions_physical_cause(p, 0.003)
    # action time far above the sensing path: violation impossible
    assert r.never_violated
    assert not r.certainly_violated
    assert r.w_min == 0.0 and r.w_min_raw < 0.0


def test_conditions_physical_cause_certain():
    # slow sensing, instant link, no window: violation guaranteed
    p = params(t_s=0.010, tau_s=0.005, tau_a=0.0, t_min=0.0, t_max=0.001, w=0.0)
    r = causality_conditions_physical_cause(p, 0.0)
    assert r.certainly_violated
    assert not r.never_violated
    # minimal mitigating window 2*t_s + tau_s - t_min - tau_a = 25 ms
    assert r.w_min == pytest.approx(0.025)
    # a window that large removes the certain case
    assert not causality_conditions_physical_cause(params(
        t_s=0.010, tau_s=0.005, tau_a=0.0, t_min=0.0, t_max=0.001, w=0.025
    ), 0.0).certainly_violated


def test_conditions_physical_cause_rejects_negative_tau_a():
    with pytest.raises(ParameterError):
        causality_conditions_physical_cause(params(tau_a=-0.001), 0.003)


def test_conditions_digital_cause():
    # link can be slower than the whole sensing path: violation possible
    p = params(t_s=0.010, tau_s=0.001, tau_a=0.002, t_min=0.0, t_max=0.400, w=0.0)
    r = causality_conditions_digital_cause(p, 0.390)
    assert not r.never_violated
    assert r.certainly_violated  # 0.390 - 0.013 > 0
    assert r.w_min == pytest.approx(0.400 - 0.013)
    # fast link: never violated
    fast = params(t_s=0.010, tau_s=0.001, tau_a=0.002, t_min=0.0, t_max=0.012)
    r = causality_conditions_digital_cause(fast, 0.012)
    assert r.never_violated
    assert r.w_min == 0.0


def test_conditions_digital_cause_negative_tau_a_raises_w_min():
    base = params(t_s=0.010, tau_s=0.001, tau_a=0.0, t_min=0.0, t_max=0.400)
    ahead = params(t_s=0.010, tau_s=0.001, tau_a=-0.005, t_min=0.0, t_max=0.400)
    assert (
        causality_conditions_digital_cause(ahead, 0.1).w_min
        > causality_conditions_digital_cause(base, 0.1).w_min
    )


def test_t_ab_outside_support_rejected():
    with pytest.raises(ParameterError):
        causality_conditions_physical_cause(params(), 0.006)


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------


def _mc_expected_cv(p, model, cause, trials=400_000, seed=12345):
    """Plain-numpy reference: average the conditional ramp over phi and T."""
    rng = trial_rng(seed, 0)
    phi = rng.uniform(0.0, p.t_s, trials)
    from twisim.core import sample

    t = sample(model, rng, trials)
    if cause == "physical":
        gap = (p.tau_s + phi + p.t_s) - (p.tau_a + t)
    else:
        gap = t - (p.tau_s + p.tau_a + phi + p.t_s)
    if p.w == 0.0:
        vals = (gap > 0.0).astype(float)
    else:
        vals = np.clip(gap / p.w, 0.0, 1.0)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(trials))


@pytest.mark.parametrize("cause", ["physical", "digital"])
@pytest.mark.parametrize(
    "model",
    [Constant(0.012), UniformRange(0.002, 0.030), ShiftedExponential(0.001, 80.0)],
)
@pytest.mark.parametrize("w", [0.0, 0.004, 0.020])
def test_expected_cv_matches_direct_average(cause, model, w):
    p = params(t_s=0.010, tau_s=0.001, tau_a=0.002, t_min=0.0, t_max=1.0, w=w)
    exact = expected_cv_two_input(p, model, cause)
    assert 0.0 <= exact <= 1.0
    est, se = _mc_expected_cv(p, model, cause)
    assert abs(exact - est) <= 4.0 * se + 1e-9


def test_expected_cv_constant_hand_value():
    # physical cause, W=0: violation iff tau_s + phi + t_s > tau_a + T,
    # i.e. phi > T - tau_s - t_s; with T = 12 ms the threshold is 1 ms of
    # the 10 ms phase range -> 0.9
    p = params(t_s=0.010, tau_s=0.001, tau_a=0.0, t_min=0.0, t_max=1.0, w=0.0)
    assert expected_cv_two_input(p, Constant(0.012), "physical") == pytest.approx(0.9)
    # instant link: always violated
    assert expected_cv_two_input(p, Constant(0.0), "physical") == pytest.approx(1.0)


def test_expected_cv_rejects_negative_tau_a_for_physical():
    p = params(tau_a=-0.001, t_max=1.0)
    with pytest.raises(ParameterError):
        expected_cv_two_input(p, Constant(0.001), "physical")
    expected_cv_two_input(p, Constant(0.001), "digital")  # allowed here


@given(w1=st.floats(min_value=1e-4, max_value=0.1), factor=st.floats(min_value=1.0, max_value=10.0))
@settings(max_examples=40, deadline=None)
def test_expected_cv_nonincreasing_in_window(w1, factor):
    model = UniformRange(0.0, 0.05)
    p1 = params(t_s=0.010, tau_s=0.001, tau_a=0.002, t_min=0.0, t_max=1.0, w=w1)
    p2 = params(t_s=0.010, tau_s=0.001, tau_a=0.002, t_min=0.0, t_max=1.0, w=w1 * factor)
    assert expected_cv_two_input(p2, model, "digital") <= expected_cv_two_input(
        p1, model, "digital"
    ) + 1e-9
