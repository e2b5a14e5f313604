"""Closed-form violation probabilities, conditions and minimal-window sizes.

Two-input receiver, one synchronous sensor plus one digital link.  Two
causal directions are covered:

* physical cause: a physical event is sensed directly and also triggers a
  remote digital transmission; violation means the digital copy is perceived
  strictly before the sensing event.
* digital cause: a digital event triggers the physical event; violation
  means the sensing event is perceived strictly before the digital one.

Durations are nonnegative except the action time tau_a in the digital-cause
conditions, where a predictive sender can make it zero or negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from scipy import integrate

from twisim.core import (
    Constant,
    Duration,
    Empirical,
    ParameterError,
    ShiftedExponential,
    TimePoint,
    TransmissionTimeModel,
    TwoPoint,
    UniformRange,
    ensure_duration,
    ensure_time,
    validate_model,
)


def twi_two_sensor_min_window(
    t_s1: Duration, t_s2: Duration, tau_s1: Duration, tau_s2: Duration
) -> Duration:
    """Smallest window that keeps two asynchronous sensors simultaneous.

    Sensor 1 must activate first (tau_s1 <= tau_s2); the window has to cover
    both the first sensor's integration and the second detection's lag.
    """
    t_s1 = ensure_duration(t_s1, "t_s1")
    t_s2 = ensure_duration(t_s2, "t_s2")
    tau_s1 = ensure_duration(tau_s1, "tau_s1")
    tau_s2 = ensure_duration(tau_s2, "tau_s2")
    if tau_s1 > tau_s2:
        raise ParameterError("sensor 1 must activate first: reorder so tau_s1 <= tau_s2")
    return max(t_s1, tau_s2 - tau_s1 + t_s2)


def p_sim_violation_pair(t_s1: TimePoint, t_s2: TimePoint, w: Duration) -> float:
    """Probability that a window edge separates two arrivals, uniform offset."""
    t_s1 = ensure_time(t_s1, "t_s1")
    t_s2 = ensure_time(t_s2, "t_s2")
    if t_s1 > t_s2:
        raise ParameterError("requires t_s1 <= t_s2")
    return p_sim_violation_n([t_s1, t_s2], w)


def p_sim_violation_n(arrival_times: Sequence[TimePoint], w: Duration) -> float:
    """min{1, (max - min) / W} over the arrival set; 0 for a singleton."""
    if len(arrival_times) == 0:
        raise ParameterError("arrival_times must be nonempty")
    w = ensure_duration(w, "w")
    times = [ensure_time(t, "arrival") for t in arrival_times]
    spread = max(times) - min(times)
    if spread == 0.0:
        return 0.0
    if w == 0.0:
        return 1.0
    return min(1.0, spread / w)


def p_cv_physical_cause(t_s: TimePoint, t_d: TimePoint, w: Duration) -> float:
    """Pr of perceiving the digital copy before the sensing event, given the
    registration times and a uniform window offset."""
    t_s = ensure_time(t_s, "t_s")
    t_d = ensure_time(t_d, "t_d")
    w = ensure_duration(w, "w")
    gap = max(0.0, t_s - t_d)
    if gap == 0.0:
        return 0.0
    if w == 0.0:
        return 1.0
    return min(1.0, gap / w)


def p_cv_digital_cause(t_s: TimePoint, t_d: TimePoint, w: Duration) -> float:
    """Mirror image of p_cv_physical_cause with the roles swapped."""
    return p_cv_physical_cause(t_d, t_s, w)


@dataclass(frozen=True)
class TwoInputParams:
    """Parameters of the sensing-plus-digital receiver.

    t_min/t_max bound the support of the link transmission time; w is the
    window width.  tau_s is read as the largest propagation delay and tau_a
    as the smallest action time when sizing the minimal window.
    """

    t_s: Duration
    tau_s: Duration
    tau_a: float
    t_min: Duration
    t_max: Duration
    w: Duration

    def __post_init__(self) -> None:
        if ensure_duration(self.t_s, "t_s") == 0.0:
            raise ParameterError("t_s must be > 0")
        ensure_duration(self.tau_s, "tau_s")
        if not math.isfinite(float(self.tau_a)):
            raise ParameterError("tau_a must be finite")
        t_min = ensure_duration(self.t_min, "t_min")
        if self.t_max < t_min:
            raise ParameterError("requires t_min <= t_max")
        ensure_duration(self.w, "w")


@dataclass(frozen=True)
class CausalityConditionReport:
    never_violated: bool
    certainly_violated: bool
    w_min: Duration
    w_min_raw: float  # may be negative when mitigation is already guaranteed


def _check_t_ab(p: TwoInputParams, t_ab: float) -> float:
    t_ab = ensure_duration(t_ab, "t_ab")
    if not p.t_min <= t_ab <= p.t_max:
        raise ParameterError(f"t_ab={t_ab} outside support [{p.t_min}, {p.t_max}]")
    return t_ab


def causality_conditions_physical_cause(p: TwoInputParams, t_ab: Duration) -> CausalityConditionReport:
    """Never/certain-violation conditions when a physical event triggers the
    digital transmission, plus the minimal mitigating window."""
    if p.tau_a < 0.0:
        raise ParameterError("tau_a must be >= 0 for the physical-cause direction")
    t_ab = _check_t_ab(p, t_ab)
    never = t_ab > 2.0 * p.t_s + p.tau_s - p.tau_a
    certain = p.w < p.t_s + p.tau_s - t_ab - p.tau_a
    raw = 2.0 * p.t_s + p.tau_s - p.t_min - p.tau_a
    return CausalityConditionReport(never, certain, max(0.0, raw), raw)


def causality_conditions_digital_cause(p: TwoInputParams, t_ab: Duration) -> CausalityConditionReport:
    """Never/certain-violation conditions when a digital event triggers the
    physical one.  The certain check uses the worst case phi_s = 0."""
    t_ab = _check_t_ab(p, t_ab)
    never = p.t_max < p.t_s + p.tau_a + p.tau_s
    certain = p.w < t_ab - p.t_s - p.tau_a - p.tau_s
    raw = p.t_max - p.t_s - p.tau_a - p.tau_s
    return CausalityConditionReport(never, certain, max(0.0, raw), raw)


# ---------------------------------------------------------------------------
# Quadrature oracle: expected violation probability over phi_s and the link
# ---------------------------------------------------------------------------


def _phase_averaged_ramp(a: float, period: float, w: float) -> float:
    """E_phi[min(1, max(0, a + phi) / w)] with phi uniform in [0, period).

    For w = 0 the ramp degenerates to a step at 0.
    """
    if period <= 0.0:
        raise ParameterError("period must be > 0")
    if w == 0.0:
        # fraction of phi in [0, period) with a + phi > 0
        return min(1.0, max(0.0, (period + min(a, 0.0)) / period)) if a > -period else 0.0

    def antiderivative(x: float) -> float:
        if x <= 0.0:
            return 0.0
        if x <= w:
            return x * x / (2.0 * w)
        return x - w / 2.0

    return (antiderivative(a + period) - antiderivative(a)) / period


def _expect_over_model(model: TransmissionTimeModel, fn) -> float:
    """E[fn(T)] for T ~ model, by atom sums or adaptive quadrature."""
    validate_model(model)
    if isinstance(model, Constant):
        return fn(model.value)
    if isinstance(model, TwoPoint):
        return model.p_a * fn(model.value_a) + (1.0 - model.p_a) * fn(model.value_b)
    if isinstance(model, Empirical):
        return sum(fn(v) for v in model.values) / len(model.values)
    if isinstance(model, UniformRange):
        if model.high == model.low:
            return fn(model.low)
        val, _ = integrate.quad(fn, model.low, model.high, limit=200)
        return val / (model.high - model.low)
    # ShiftedExponential: integrate the excess over an effectively full tail
    rate = model.rate
    upper = model.shift + 50.0 / rate

    def weighted(x: float) -> float:
        return fn(x) * rate * math.exp(-rate * (x - model.shift))

    val, _ = integrate.quad(weighted, model.shift, upper, limit=200)
    return val


def expected_cv_two_input(
    p: TwoInputParams,
    model: TransmissionTimeModel,
    cause: Literal["physical", "digital"] = "physical",
) -> float:
    """Expected causality-violation probability over uniform phi_s, uniform
    window offset and the link transmission-time model.

    physical cause: gap = (tau_s + phi + t_s) - (tau_a + T)
    digital  cause: gap = T - (tau_s + tau_a + phi + t_s)
    """
    if cause == "physical":
        if p.tau_a < 0.0:
            raise ParameterError("tau_a must be >= 0 for the physical-cause direction")
        base = p.tau_s + p.t_s - p.tau_a

        def inner(t: float) -> float:
            return _phase_averaged_ramp(base - t, p.t_s, p.w)

    elif cause == "digital":
        base = p.tau_s + p.tau_a + p.t_s

        def inner(t: float) -> float:
            # gap = t - base - phi is decreasing in phi; average the ramp of
            # (t - base - phi) over phi in [0, t_s) by symmetry phi -> t_s - phi
            return _phase_averaged_ramp(t - base - p.t_s, p.t_s, p.w)

    else:
        raise ParameterError(f"unknown cause direction: {cause!r}")
    return _expect_over_model(model, inner)
