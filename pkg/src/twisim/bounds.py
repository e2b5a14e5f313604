"""Bounds for correct causal ordering of N chained events.

For a chain of N events the probability that all arrivals keep the causal
order is bounded by products of the pairwise ordering probabilities: a plain
product when no window is used, and a product of (N-1)-th roots when a
shared window offset couples the pairs.  A two-level transmission-rate chain
admits an exact closed form used as a reference case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from twisim.core import (
    Duration,
    ParameterError,
    TransmissionTimeModel,
    ensure_duration,
    chunk_rng,
    laplace_transform,
    sample,
    validate_model,
)


def _check_probs(pairwise: Sequence[float]) -> list[float]:
    if len(pairwise) < 1:
        raise ParameterError("need at least one pairwise probability")
    probs = [float(p) for p in pairwise]
    for p in probs:
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"pairwise probability {p!r} outside [0, 1]")
    return probs


def ordered_product_bound(pairwise: Sequence[float]) -> float:
    """Upper bound on the joint no-violation probability without a window:
    the product of the adjacent-pair ordering probabilities."""
    return math.prod(_check_probs(pairwise))


def ordered_holder_bound(pairwise: Sequence[float]) -> float:
    """Upper bound on the joint no-violation probability with a shared
    window: product of the pairwise probabilities each to the 1/(N-1)."""
    probs = _check_probs(pairwise)
    exponent = 1.0 / len(probs)
    return math.prod(p**exponent for p in probs)


def two_rate_no_violation_exact(n: int) -> float:
    """Exact no-violation probability (N+1)/2^N for the chain whose senders
    pick one of two rates (transmission time T_0 or 2*T_0, p = 1/2 each),
    valid when the inter-event action time is below T_0."""
    n = int(n)
    if n < 2:
        raise ParameterError(f"chain length must be >= 2, got {n}")
    return (n + 1) / 2.0**n


def two_rate_pairwise_bound(n: int) -> float:
    """Pairwise product bound (3/4)^(N-1) for the two-rate chain."""
    n = int(n)
    if n < 2:
        raise ParameterError(f"chain length must be >= 2, got {n}")
    return 0.75 ** (n - 1)


def cv_given_times(t_1: Duration, t_2: Duration, tau: Duration, w: Duration) -> float:
    """Pairwise violation probability conditioned on the two transmission
    times, with a uniform window offset: a ramp from 0 to 1 as t_1 runs past
    tau + t_2 by more than W."""
    t_1 = ensure_duration(t_1, "t_1")
    t_2 = ensure_duration(t_2, "t_2")
    tau = ensure_duration(tau, "tau")
    w = ensure_duration(w, "w")
    edge = tau + t_2
    if t_1 <= edge:
        return 0.0
    if w == 0.0 or t_1 > edge + w:
        return 1.0
    return (t_1 - edge) / w


def cv_lower_bound(
    lam: float, tau: Duration, w: Duration, t2_model: TransmissionTimeModel
) -> float:
    """Lower bound exp(-lam*(tau+w)) * E[exp(-lam*T_2)] on the pairwise
    violation probability when T_1 has an exponential tail with rate lam."""
    lam = float(lam)
    if lam <= 0.0:
        raise ParameterError(f"lam must be > 0, got {lam!r}")
    tau = ensure_duration(tau, "tau")
    w = ensure_duration(w, "w")
    return math.exp(-lam * (tau + w)) * laplace_transform(t2_model, lam)


@dataclass(frozen=True)
class OrderingLemmaReport:
    lhs: float  # Pr[t2 <= t3 | t1 <= t2]
    rhs: float  # Pr[t2 <= t3]
    lhs_std_err: float
    rhs_std_err: float
    conditioning_trials: int
    trials: int
    holds: bool
    conclusive: bool


def verify_ordering_lemma(
    models: Sequence[TransmissionTimeModel],
    trials: int,
    seed: int,
) -> OrderingLemmaReport:
    """Monte-Carlo check that conditioning on t1 <= t2 cannot raise the
    probability of t2 <= t3 for independent t1, t2, t3."""
    if len(models) != 3:
        raise ParameterError("need exactly three models")
    for m in models:
        validate_model(m)
    trials = int(trials)
    if trials < 1:
        raise ParameterError("trials must be >= 1")

    chunk = 1 << 16
    n_cond = 0
    n_cond_ok = 0
    n_ok = 0
    for c, start in enumerate(range(0, trials, chunk)):
        count = min(chunk, trials - start)
        rng = chunk_rng(seed, c)
        t1 = sample(models[0], rng, count)
        t2 = sample(models[1], rng, count)
        t3 = sample(models[2], rng, count)
        cond = t1 <= t2
        ok = t2 <= t3
        n_cond += int(cond.sum())
        n_cond_ok += int((cond & ok).sum())
        n_ok += int(ok.sum())

    rhs = n_ok / trials
    rhs_se = math.sqrt(max(rhs * (1.0 - rhs), 0.0) / trials)
    if n_cond == 0:
        return OrderingLemmaReport(math.nan, rhs, math.nan, rhs_se, 0, trials, False, False)
    lhs = n_cond_ok / n_cond
    lhs_se = math.sqrt(max(lhs * (1.0 - lhs), 0.0) / n_cond)
    combined = math.hypot(lhs_se, rhs_se)
    holds = lhs <= rhs + 4.0 * combined
    return OrderingLemmaReport(lhs, rhs, lhs_se, rhs_se, n_cond, trials, holds, True)
