"""Experiment configuration: versioned JSON schema, validation, round-trip.

A config names an experiment kind, a scenario (for the simulation kinds), a
window spec, trial/seed settings and an output path.  Validation reports the
offending field path; defaults are filled in so minimal configs stay small.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from twisim.core import (
    Constant,
    Empirical,
    ParameterError,
    ShiftedExponential,
    TransmissionTimeModel,
    TwoPoint,
    UniformRange,
    validate_model,
)
from twisim.inputs import SensorMode, SensorSpec
from twisim.mc import CausalChainScenario, FanOutScenario, LinkInput
from twisim.twi import TwiSpec

SCHEMA_VERSION = 1
KINDS = ("analytic", "chain_sim", "fanout_sim", "bounds_check", "plan", "reproduce")

DEFAULT_TRIALS = 100_000
DEFAULT_SEED = 1


class ConfigError(ValueError):
    """Invalid configuration; the message names the violated field."""


def _fail(path: str, message: str) -> None:
    raise ConfigError(f"{path}: {message}")


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        _fail(f"{path}.{key}", "missing required field")
    return obj[key]


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    return float(value)


# ---------------------------------------------------------------------------
# Transmission-time models
# ---------------------------------------------------------------------------


def _validated(model: TransmissionTimeModel) -> TransmissionTimeModel:
    validate_model(model)
    return model


def model_from_dict(obj: Any, path: str = "model") -> TransmissionTimeModel:
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {obj!r}")
    kind = _require(obj, "kind", path)
    try:
        if kind == "constant":
            return _validated(Constant(_as_number(_require(obj, "value", path), f"{path}.value")))
        if kind == "uniform":
            return _validated(
                UniformRange(
                    _as_number(_require(obj, "low", path), f"{path}.low"),
                    _as_number(_require(obj, "high", path), f"{path}.high"),
                )
            )
        if kind == "shifted_exponential":
            return _validated(
                ShiftedExponential(
                    _as_number(obj.get("shift", 0.0), f"{path}.shift"),
                    _as_number(_require(obj, "rate", path), f"{path}.rate"),
                )
            )
        if kind == "two_point":
            return _validated(
                TwoPoint(
                    _as_number(_require(obj, "value_a", path), f"{path}.value_a"),
                    _as_number(_require(obj, "value_b", path), f"{path}.value_b"),
                    _as_number(obj.get("p_a", 0.5), f"{path}.p_a"),
                )
            )
        if kind == "empirical":
            values = _require(obj, "values", path)
            if not isinstance(values, list) or not values:
                _fail(f"{path}.values", "expected a nonempty list")
            return _validated(Empirical(tuple(_as_number(v, f"{path}.values") for v in values)))
    except ParameterError as exc:
        _fail(path, str(exc))
    _fail(f"{path}.kind", f"unknown model kind {kind!r}")


def model_to_dict(model: TransmissionTimeModel) -> dict:
    if isinstance(model, Constant):
        return {"kind": "constant", "value": model.value}
    if isinstance(model, UniformRange):
        return {"kind": "uniform", "low": model.low, "high": model.high}
    if isinstance(model, ShiftedExponential):
        return {"kind": "shifted_exponential", "shift": model.shift, "rate": model.rate}
    if isinstance(model, TwoPoint):
        return {"kind": "two_point", "value_a": model.value_a, "value_b": model.value_b, "p_a": model.p_a}
    return {"kind": "empirical", "values": list(model.values)}


# ---------------------------------------------------------------------------
# Scenario inputs
# ---------------------------------------------------------------------------


def _input_from_dict(obj: Any, path: str) -> Union[LinkInput, SensorSpec]:
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {obj!r}")
    kind = _require(obj, "type", path)
    try:
        if kind == "link":
            return LinkInput(
                model_from_dict(_require(obj, "model", path), f"{path}.model"),
                _as_number(obj.get("delay", 0.0), f"{path}.delay"),
            )
        if kind == "sensor":
            mode = obj.get("mode", "synchronous")
            if mode not in ("synchronous", "asynchronous"):
                _fail(f"{path}.mode", f"expected 'synchronous' or 'asynchronous', got {mode!r}")
            return SensorSpec(
                t_s=_as_number(_require(obj, "t_s", path), f"{path}.t_s"),
                tau_s=_as_number(obj.get("tau_s", 0.0), f"{path}.tau_s"),
                mode=SensorMode(mode),
                d_s=int(obj.get("d_s", 1)),
                sensor_id=obj.get("sensor_id"),
            )
    except ParameterError as exc:
        _fail(path, str(exc))
    _fail(f"{path}.type", f"unknown input type {kind!r}")


def _input_to_dict(inp: Union[LinkInput, SensorSpec]) -> dict:
    if isinstance(inp, LinkInput):
        return {"type": "link", "model": model_to_dict(inp.model), "delay": inp.delay}
    out = {
        "type": "sensor",
        "t_s": inp.t_s,
        "tau_s": inp.tau_s,
        "mode": inp.mode.value,
        "d_s": inp.d_s,
    }
    if inp.sensor_id is not None:
        out["sensor_id"] = inp.sensor_id
    return out


def _twi_from_dict(obj: Any, path: str) -> TwiSpec:
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {obj!r}")
    window = _as_number(obj.get("window", 0.0), f"{path}.window")
    offset = obj.get("offset", 0.0)
    try:
        if offset == "random":
            return TwiSpec(window, offset=None)
        return TwiSpec(window, offset=_as_number(offset, f"{path}.offset"))
    except ParameterError as exc:
        _fail(path, str(exc))


def _twi_to_dict(twi: TwiSpec) -> dict:
    return {"window": twi.window, "offset": "random" if twi.random_offset else twi.offset}


# ---------------------------------------------------------------------------
# Experiment config
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    threads: int = 1
    twi: Optional[TwiSpec] = None
    scenario: Optional[Union[CausalChainScenario, FanOutScenario]] = None
    w_sweep: tuple[float, ...] = ()
    params: dict = field(default_factory=dict)
    output: Optional[str] = None
    scenario_id: str = "run"


def config_from_dict(obj: Any, path: str = "config") -> ExperimentConfig:
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {obj!r}")
    version = obj.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        _fail(f"{path}.schema_version", f"unsupported version {version!r}")
    kind = _require(obj, "kind", path)
    if kind not in KINDS:
        _fail(f"{path}.kind", f"expected one of {KINDS}, got {kind!r}")

    trials = int(obj.get("trials", DEFAULT_TRIALS))
    if trials < 1:
        _fail(f"{path}.trials", f"must be >= 1, got {trials}")
    threads = int(obj.get("threads", 1))
    if threads < 1:
        _fail(f"{path}.threads", f"must be >= 1, got {threads}")
    seed = int(obj.get("seed", DEFAULT_SEED))

    twi = _twi_from_dict(obj["twi"], f"{path}.twi") if "twi" in obj else None
    if twi is None and kind in ("chain_sim", "fanout_sim", "bounds_check"):
        twi = TwiSpec(0.0, 0.0)

    scenario = None
    if kind in ("chain_sim", "bounds_check"):
        sc = _require(obj, "scenario", path)
        if not isinstance(sc, dict):
            _fail(f"{path}.scenario", "expected an object")
        inputs = _require(sc, "inputs", f"{path}.scenario")
        if not isinstance(inputs, list) or len(inputs) < 2:
            _fail(f"{path}.scenario.inputs", "expected a list of at least two inputs")
        action_times = _require(sc, "action_times", f"{path}.scenario")
        if not isinstance(action_times, list):
            _fail(f"{path}.scenario.action_times", "expected a list")
        try:
            scenario = CausalChainScenario(
                action_times=tuple(
                    _as_number(t, f"{path}.scenario.action_times") for t in action_times
                ),
                inputs=tuple(
                    _input_from_dict(inp, f"{path}.scenario.inputs[{i}]")
                    for i, inp in enumerate(inputs)
                ),
                anchor_first_arrival=bool(sc.get("anchor_first_arrival", False)),
            )
        except ParameterError as exc:
            _fail(f"{path}.scenario", str(exc))
    elif kind == "fanout_sim":
        sc = _require(obj, "scenario", path)
        inputs = _require(sc, "inputs", f"{path}.scenario")
        if not isinstance(inputs, list) or not inputs:
            _fail(f"{path}.scenario.inputs", "expected a nonempty list of inputs")
        try:
            scenario = FanOutScenario(
                inputs=tuple(
                    _input_from_dict(inp, f"{path}.scenario.inputs[{i}]")
                    for i, inp in enumerate(inputs)
                )
            )
        except ParameterError as exc:
            _fail(f"{path}.scenario", str(exc))

    w_sweep = obj.get("w_sweep", [])
    if not isinstance(w_sweep, list):
        _fail(f"{path}.w_sweep", "expected a list")
    sweep = tuple(_as_number(w, f"{path}.w_sweep") for w in w_sweep)
    if sweep and any(b <= a for a, b in zip(sweep, sweep[1:])):
        _fail(f"{path}.w_sweep", "values must be strictly increasing")

    params = obj.get("params", {})
    if not isinstance(params, dict):
        _fail(f"{path}.params", "expected an object")

    return ExperimentConfig(
        kind=kind,
        seed=seed,
        trials=trials,
        threads=threads,
        twi=twi,
        scenario=scenario,
        w_sweep=sweep,
        params=dict(params),
        output=obj.get("output"),
        scenario_id=str(obj.get("scenario_id", "run")),
    )


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "kind": cfg.kind,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "threads": cfg.threads,
        "scenario_id": cfg.scenario_id,
    }
    if cfg.twi is not None:
        out["twi"] = _twi_to_dict(cfg.twi)
    if isinstance(cfg.scenario, CausalChainScenario):
        out["scenario"] = {
            "action_times": list(cfg.scenario.action_times),
            "inputs": [_input_to_dict(inp) for inp in cfg.scenario.inputs],
            "anchor_first_arrival": cfg.scenario.anchor_first_arrival,
        }
    elif isinstance(cfg.scenario, FanOutScenario):
        out["scenario"] = {"inputs": [_input_to_dict(inp) for inp in cfg.scenario.inputs]}
    if cfg.w_sweep:
        out["w_sweep"] = list(cfg.w_sweep)
    if cfg.params:
        out["params"] = cfg.params
    if cfg.output is not None:
        out["output"] = cfg.output
    return out


def load_config(path: str) -> ExperimentConfig:
    """Parse and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return config_from_dict(obj, path)


def serialize_config(cfg: ExperimentConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2, sort_keys=True)
