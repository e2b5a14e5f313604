"""Monte-Carlo estimation of simultaneity/causality violation probabilities.

Scenarios are causal chains (event i causes event i+1 after a fixed action
time) and fan-outs (one event perceived through N inputs).  Trials are
chunked; every chunk derives its random stream from (seed, chunk_index), so
estimates are bit-identical for any thread count and chunk results can be
aggregated in any order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from twisim.core import (
    Duration,
    ParameterError,
    RandomSeed,
    TransmissionTimeModel,
    chunk_rng,
    ensure_duration,
    sample,
    validate_model,
)
from twisim.analytics import TwoInputParams
from twisim.inputs import SensorSpec, sample_sensor_detection_time
from twisim.twi import TwiSpec

CHUNK_SIZE = 1 << 15


@dataclass(frozen=True)
class LinkInput:
    """Digital input of a scenario: transmission-time model plus the fixed
    action/propagation delay separating the source event from the send."""

    model: TransmissionTimeModel
    delay: Duration = 0.0

    def __post_init__(self) -> None:
        validate_model(self.model)
        ensure_duration(self.delay, "LinkInput.delay")


ScenarioInput = Union[LinkInput, SensorSpec]


def _check_inputs(inputs: Sequence[ScenarioInput]) -> None:
    seen_ids = set()
    for inp in inputs:
        if isinstance(inp, SensorSpec):
            if inp.sensor_id is not None:
                if inp.sensor_id in seen_ids:
                    raise ParameterError(
                        f"sensor id {inp.sensor_id!r} used by two inputs; chain inputs "
                        "must come from distinct sensors"
                    )
                seen_ids.add(inp.sensor_id)
        elif not isinstance(inp, LinkInput):
            raise ParameterError(f"unsupported scenario input: {inp!r}")


@dataclass(frozen=True)
class CausalChainScenario:
    """N causally ordered source events; event i+1 occurs action_times[i]
    after event i, and each event reaches the receiver through its input."""

    action_times: tuple[Duration, ...]
    inputs: tuple[ScenarioInput, ...]
    anchor_first_arrival: bool = False  # align the window grid to the first arrival

    def __post_init__(self) -> None:
        if len(self.inputs) < 2:
            raise ParameterError("a chain needs at least two inputs")
        if len(self.action_times) != len(self.inputs) - 1:
            raise ParameterError(
                f"need {len(self.inputs) - 1} action times for {len(self.inputs)} inputs, "
                f"got {len(self.action_times)}"
            )
        for tau in self.action_times:
            ensure_duration(tau, "action time")
        _check_inputs(self.inputs)

    @property
    def n(self) -> int:
        return len(self.inputs)

    def occurrence_offsets(self) -> np.ndarray:
        """Occurrence time of each source event, first event at t = 0."""
        return np.concatenate([[0.0], np.cumsum(self.action_times)])


@dataclass(frozen=True)
class FanOutScenario:
    """A single source event perceived through N independent inputs."""

    inputs: tuple[ScenarioInput, ...]

    def __post_init__(self) -> None:
        if len(self.inputs) < 1:
            raise ParameterError("a fan-out needs at least one input")
        _check_inputs(self.inputs)

    @property
    def n(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class TrialOutcome:
    arrival_times: tuple[float, ...]
    stamps: Optional[tuple[int, ...]]  # None when W = 0
    offset: float
    violated: bool
    violating_pairs: tuple[tuple[int, int], ...]  # 1-based adjacent pairs


@dataclass(frozen=True)
class ViolationEstimate:
    p_hat: float
    trials: int
    std_err: float
    ci95: tuple[float, float]
    seed: RandomSeed


@dataclass(frozen=True)
class ChainEstimate:
    """Joint and pairwise ordering estimates computed on the same trials."""

    no_violation: ViolationEstimate
    pairwise: tuple[ViolationEstimate, ...] = field(default_factory=tuple)


def _make_estimate(successes: int, trials: int, seed: RandomSeed) -> ViolationEstimate:
    p = successes / trials
    se = math.sqrt(max(p * (1.0 - p), 0.0) / trials)
    ci = (max(0.0, p - 1.96 * se), min(1.0, p + 1.96 * se))
    return ViolationEstimate(p, trials, se, ci, seed)


def _sample_input(inp: ScenarioInput, rng: np.random.Generator, size: Optional[int]):
    if isinstance(inp, SensorSpec):
        return sample_sensor_detection_time(inp, rng, size)
    return sample(inp.model, rng, size) + inp.delay


def _chain_arrivals(
    s: CausalChainScenario, rng: np.random.Generator, count: int
) -> tuple[np.ndarray, np.ndarray]:
    """(count, N) arrival times plus one offset fraction per trial."""
    t = np.empty((count, s.n))
    for i, inp in enumerate(s.inputs):
        t[:, i] = _sample_input(inp, rng, count)
    t += s.occurrence_offsets()
    u = rng.random(count)
    return t, u


def _ordered_pairs(
    t: np.ndarray, u: np.ndarray, twi: TwiSpec, anchor_first: bool
) -> np.ndarray:
    """Boolean (trials, N-1) matrix: adjacent pair in (stamped) order."""
    w = twi.window
    if w == 0.0:
        return t[:, 1:] >= t[:, :-1]
    offset = u * w if twi.random_offset else float(twi.offset)
    base = t - t[:, :1] if anchor_first else t
    if twi.random_offset:
        stamps = np.ceil((base - offset[:, None]) / w)
    else:
        stamps = np.ceil((base - offset) / w)
    return stamps[:, 1:] >= stamps[:, :-1]


def _chunk_ranges(trials: int):
    for c, start in enumerate(range(0, trials, CHUNK_SIZE)):
        yield c, min(CHUNK_SIZE, trials - start)


def _map_chunks(fn, trials: int, threads: int):
    chunks = list(_chunk_ranges(trials))
    if threads <= 1:
        return [fn(c, count) for c, count in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(fn, c, count) for c, count in chunks]
        return [f.result() for f in futures]


def run_chain_trial(
    s: CausalChainScenario, twi: TwiSpec, rng: np.random.Generator
) -> TrialOutcome:
    """Sample one trial and report the full (stamped) ordering outcome."""
    t = np.array([_sample_input(inp, rng, None) for inp in s.inputs])
    t += s.occurrence_offsets()
    u = rng.random()
    ok = _ordered_pairs(t[None, :], np.array([u]), twi, s.anchor_first_arrival)[0]
    pairs = tuple((k + 1, k + 2) for k in np.flatnonzero(~ok))
    if twi.window > 0.0:
        offset = u * twi.window if twi.random_offset else float(twi.offset)
        base = t - t[0] if s.anchor_first_arrival else t
        stamps = tuple(int(v) for v in np.ceil((base - offset) / twi.window))
    else:
        offset = 0.0
        stamps = None
    return TrialOutcome(tuple(t), stamps, offset, len(pairs) > 0, pairs)


def estimate_chain(
    s: CausalChainScenario,
    twi: TwiSpec,
    trials: int,
    seed: RandomSeed,
    threads: int = 1,
) -> ChainEstimate:
    """Joint no-violation probability and per-pair ordering probabilities,
    estimated on the same trials."""
    trials = int(trials)
    if trials < 1:
        raise ParameterError("trials must be >= 1")

    def work(c: int, count: int):
        t, u = _chain_arrivals(s, chunk_rng(seed, c), count)
        ok = _ordered_pairs(t, u, twi, s.anchor_first_arrival)
        return int(ok.all(axis=1).sum()), ok.sum(axis=0).astype(np.int64)

    results = _map_chunks(work, trials, threads)
    joint = sum(r[0] for r in results)
    per_pair = np.sum([r[1] for r in results], axis=0)
    return ChainEstimate(
        no_violation=_make_estimate(joint, trials, seed),
        pairwise=tuple(_make_estimate(int(k), trials, seed) for k in per_pair),
    )


def estimate_no_violation_prob(
    s: CausalChainScenario, twi: TwiSpec, trials: int, seed: RandomSeed, threads: int = 1
) -> ViolationEstimate:
    """Probability that the receiver perceives the whole chain in causal order."""
    return estimate_chain(s, twi, trials, seed, threads).no_violation


def estimate_pairwise_probs(
    s: CausalChainScenario, twi: TwiSpec, trials: int, seed: RandomSeed, threads: int = 1
) -> tuple[float, ...]:
    """Per-pair probabilities that event k is perceived no later than k+1."""
    return tuple(e.p_hat for e in estimate_chain(s, twi, trials, seed, threads).pairwise)


def derived_seed(seed: RandomSeed, index: int) -> int:
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(2, int(index)))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def estimate_no_violation_sweep(
    s: CausalChainScenario,
    w_values: Sequence[float],
    trials: int,
    seed: RandomSeed,
    common_random_numbers: bool = True,
    threads: int = 1,
) -> list[ViolationEstimate]:
    """No-violation estimates over a window sweep, with a random offset.

    With common random numbers each trial reuses its transmission times and
    offset fraction at every window width, making the sweep exactly
    comparable point to point; otherwise every point is independent.
    """
    w_values = [ensure_duration(w, "w") for w in w_values]
    trials = int(trials)
    if trials < 1:
        raise ParameterError("trials must be >= 1")

    if not common_random_numbers:
        return [
            estimate_no_violation_prob(
                s,
                TwiSpec(w, offset=None if w > 0 else 0.0),
                trials,
                derived_seed(seed, j),
                threads,
            )
            for j, w in enumerate(w_values)
        ]

    def work(c: int, count: int):
        t, u = _chain_arrivals(s, chunk_rng(seed, c), count)
        counts = []
        for w in w_values:
            twi = TwiSpec(w, offset=None if w > 0 else 0.0)
            ok = _ordered_pairs(t, u, twi, s.anchor_first_arrival)
            counts.append(int(ok.all(axis=1).sum()))
        return counts

    results = _map_chunks(work, trials, threads)
    totals = np.sum(results, axis=0)
    return [_make_estimate(int(k), trials, seed) for k in totals]


def estimate_sim_violation(
    s: FanOutScenario, twi: TwiSpec, trials: int, seed: RandomSeed, threads: int = 1
) -> ViolationEstimate:
    """Probability that the N perceptions of one event get differing
    timestamps (raw-time inequality when W = 0)."""
    trials = int(trials)
    if trials < 1:
        raise ParameterError("trials must be >= 1")

    def work(c: int, count: int):
        rng = chunk_rng(seed, c)
        t = np.empty((count, s.n))
        for i, inp in enumerate(s.inputs):
            t[:, i] = _sample_input(inp, rng, count)
        u = rng.random(count)
        if twi.window == 0.0:
            violated = (t != t[:, :1]).any(axis=1)
        else:
            offset = u * twi.window if twi.random_offset else float(twi.offset)
            if twi.random_offset:
                stamps = np.ceil((t - offset[:, None]) / twi.window)
            else:
                stamps = np.ceil((t - offset) / twi.window)
            violated = (stamps != stamps[:, :1]).any(axis=1)
        return int(violated.sum())

    violations = sum(_map_chunks(work, trials, threads))
    return _make_estimate(violations, trials, seed)


def estimate_cv_two_input(
    p: TwoInputParams,
    model: TransmissionTimeModel,
    cause: str,
    trials: int,
    seed: RandomSeed,
    threads: int = 1,
) -> ViolationEstimate:
    """Monte-Carlo causality-violation probability for the two-input receiver
    over uniform phi_s, the link model, and a uniform window offset."""
    validate_model(model)
    if cause not in ("physical", "digital"):
        raise ParameterError(f"unknown cause direction: {cause!r}")
    if cause == "physical" and p.tau_a < 0.0:
        raise ParameterError("tau_a must be >= 0 for the physical-cause direction")
    trials = int(trials)
    if trials < 1:
        raise ParameterError("trials must be >= 1")

    def work(c: int, count: int):
        rng = chunk_rng(seed, c)
        phi = rng.uniform(0.0, p.t_s, count)
        t_ab = sample(model, rng, count)
        u = rng.random(count)
        if cause == "physical":
            t_sense = p.tau_s + phi + p.t_s
            t_digital = p.tau_a + t_ab
            early, late = t_digital, t_sense  # violation: digital first
        else:
            t_sense = p.tau_s + p.tau_a + phi + p.t_s
            t_digital = t_ab
            early, late = t_sense, t_digital  # violation: sensing first
        if p.w == 0.0:
            violated = early < late
        else:
            offset = u * p.w
            violated = np.ceil((early - offset) / p.w) < np.ceil((late - offset) / p.w)
        return int(violated.sum())

    violations = sum(_map_chunks(work, trials, threads))
    return _make_estimate(violations, trials, seed)
