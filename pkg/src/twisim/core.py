"""Shared domain types: time values, transmission-time distributions, RNG streams.

Times and durations are nonnegative floats in seconds.  Transmission times over
a digital link are opaque random variables with bounded nonnegative support;
no channel or queueing model is attached to them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

TimePoint = float
Duration = float
RandomSeed = int


class ParameterError(ValueError):
    """Raised when a model or scenario parameter violates its invariants."""


def ensure_duration(value: float, name: str = "duration") -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ParameterError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def ensure_time(value: float, name: str = "time") -> float:
    return ensure_duration(value, name)


# ---------------------------------------------------------------------------
# Transmission-time distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class UniformRange:
    low: float
    high: float


@dataclass(frozen=True)
class ShiftedExponential:
    shift: float
    rate: float


@dataclass(frozen=True)
class TwoPoint:
    """Takes ``value_a`` with probability ``p_a``, else ``value_b``."""

    value_a: float
    value_b: float
    p_a: float = 0.5


@dataclass(frozen=True)
class Empirical:
    """Replays a measured trace; sampling draws uniformly from the values."""

    values: tuple[float, ...]


TransmissionTimeModel = Union[Constant, UniformRange, ShiftedExponential, TwoPoint, Empirical]


def validate_model(model: TransmissionTimeModel) -> None:
    """Check model invariants; raises ParameterError on violation."""
    if isinstance(model, Constant):
        ensure_duration(model.value, "Constant.value")
    elif isinstance(model, UniformRange):
        low = ensure_duration(model.low, "UniformRange.low")
        high = ensure_duration(model.high, "UniformRange.high")
        if low > high:
            raise ParameterError(f"UniformRange requires low <= high, got ({low}, {high})")
    elif isinstance(model, ShiftedExponential):
        ensure_duration(model.shift, "ShiftedExponential.shift")
        rate = float(model.rate)
        if not math.isfinite(rate) or rate <= 0.0:
            raise ParameterError(f"ShiftedExponential.rate must be > 0, got {rate!r}")
    elif isinstance(model, TwoPoint):
        ensure_duration(model.value_a, "TwoPoint.value_a")
        ensure_duration(model.value_b, "TwoPoint.value_b")
        p = float(model.p_a)
        if not 0.0 <= p <= 1.0:
            raise ParameterError(f"TwoPoint.p_a must be in [0, 1], got {p!r}")
    elif isinstance(model, Empirical):
        if len(model.values) == 0:
            raise ParameterError("Empirical requires at least one value")
        for v in model.values:
            ensure_duration(v, "Empirical value")
    else:
        raise ParameterError(f"unknown transmission-time model: {model!r}")


def support(model: TransmissionTimeModel) -> tuple[float, float]:
    """Tight support bounds (t_min, t_max); t_max may be +inf."""
    validate_model(model)
    if isinstance(model, Constant):
        return model.value, model.value
    if isinstance(model, UniformRange):
        return model.low, model.high
    if isinstance(model, ShiftedExponential):
        return model.shift, math.inf
    if isinstance(model, TwoPoint):
        lo = min(model.value_a, model.value_b)
        hi = max(model.value_a, model.value_b)
        if model.p_a == 0.0:
            lo = hi = model.value_b
        elif model.p_a == 1.0:
            lo = hi = model.value_a
        return lo, hi
    return min(model.values), max(model.values)


def mean(model: TransmissionTimeModel) -> float:
    """Analytic expectation of the model."""
    validate_model(model)
    if isinstance(model, Constant):
        return model.value
    if isinstance(model, UniformRange):
        return 0.5 * (model.low + model.high)
    if isinstance(model, ShiftedExponential):
        return model.shift + 1.0 / model.rate
    if isinstance(model, TwoPoint):
        return model.p_a * model.value_a + (1.0 - model.p_a) * model.value_b
    return float(np.mean(model.values))


def tail_probability(model: TransmissionTimeModel, w: float) -> float:
    """Exact Pr[T > w] under the model."""
    validate_model(model)
    w = float(w)
    if isinstance(model, Constant):
        return 1.0 if model.value > w else 0.0
    if isinstance(model, UniformRange):
        if w < model.low:
            return 1.0
        if w >= model.high:
            return 0.0
        return (model.high - w) / (model.high - model.low)
    if isinstance(model, ShiftedExponential):
        if w < model.shift:
            return 1.0
        return math.exp(-model.rate * (w - model.shift))
    if isinstance(model, TwoPoint):
        p = 0.0
        if model.value_a > w:
            p += model.p_a
        if model.value_b > w:
            p += 1.0 - model.p_a
        return p
    return float(np.mean(np.asarray(model.values) > w))


def laplace_transform(model: TransmissionTimeModel, lam: float) -> float:
    """E[exp(-lam * T)]; analytic except for Empirical (exact sample average)."""
    validate_model(model)
    lam = float(lam)
    if lam < 0.0:
        raise ParameterError(f"lam must be >= 0, got {lam!r}")
    if isinstance(model, Constant):
        return math.exp(-lam * model.value)
    if isinstance(model, UniformRange):
        if model.high == model.low or lam == 0.0:
            return math.exp(-lam * model.low) if lam else 1.0
        return (math.exp(-lam * model.low) - math.exp(-lam * model.high)) / (
            lam * (model.high - model.low)
        )
    if isinstance(model, ShiftedExponential):
        return math.exp(-lam * model.shift) * model.rate / (model.rate + lam)
    if isinstance(model, TwoPoint):
        return model.p_a * math.exp(-lam * model.value_a) + (1.0 - model.p_a) * math.exp(
            -lam * model.value_b
        )
    return float(np.mean(np.exp(-lam * np.asarray(model.values))))


def sample(
    model: TransmissionTimeModel,
    rng: np.random.Generator,
    size: Optional[int] = None,
):
    """Draw from the model; returns a float for size=None, else an ndarray.

    The draw count per call is fixed by (model, size) so that streams replay
    bit-identically.
    """
    validate_model(model)
    if isinstance(model, Constant):
        if size is None:
            return model.value
        return np.full(size, model.value)
    if isinstance(model, UniformRange):
        out = rng.uniform(model.low, model.high, size=size)
    elif isinstance(model, ShiftedExponential):
        out = model.shift + rng.exponential(1.0 / model.rate, size=size)
    elif isinstance(model, TwoPoint):
        u = rng.random(size=size)
        out = np.where(u < model.p_a, model.value_a, model.value_b)
    else:
        values = np.asarray(model.values)
        idx = rng.integers(0, len(values), size=size)
        out = values[idx]
    if size is None:
        return float(out)
    return np.asarray(out, dtype=float)


# ---------------------------------------------------------------------------
# Reproducible per-trial streams
# ---------------------------------------------------------------------------

# Domain tags keep single-trial and chunked streams from colliding.
_TRIAL_DOMAIN = 0
_CHUNK_DOMAIN = 1


def trial_rng(seed: RandomSeed, trial_index: int) -> np.random.Generator:
    """Independent stream for one trial; deterministic in (seed, trial_index)."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_TRIAL_DOMAIN, int(trial_index)))
    return np.random.Generator(np.random.PCG64(ss))


def chunk_rng(seed: RandomSeed, chunk_index: int) -> np.random.Generator:
    """Independent stream for one fixed-size chunk of trials.

    Chunk boundaries are fixed by the engine, never by the thread count, so
    estimates are identical for any degree of parallelism.
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_CHUNK_DOMAIN, int(chunk_index)))
    return np.random.Generator(np.random.PCG64(ss))
