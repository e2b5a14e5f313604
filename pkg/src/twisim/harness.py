"""Experiment orchestration: run a validated config, emit CSV rows and a
JSON run-manifest.

The CSV body is the reproducibility contract: fixed column order, '.'
decimal, LF line endings, shortest round-trip float formatting, and rows
deterministic in (config, seed) for any thread count.  Volatile metadata
(wall time, git state) lives only in the manifest.
"""

from __future__ import annotations

import hashlib
import json
import math
import subprocess
import sys
import time
from typing import Optional, Sequence

from twisim import analytics, bounds, planner
from twisim.config import (
    ConfigError,
    ExperimentConfig,
    model_from_dict,
    serialize_config,
)
from twisim.core import Constant, ShiftedExponential, TwoPoint
from twisim.inputs import SensorMode, SensorSpec
from twisim.mc import (
    CausalChainScenario,
    FanOutScenario,
    LinkInput,
    ViolationEstimate,
    derived_seed,
    estimate_chain,
    estimate_no_violation_sweep,
    estimate_sim_violation,
)
from twisim.twi import TwiSpec

__version__ = "0.1.0"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def rows_to_csv(header: Sequence[str], rows: Sequence[dict]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row.get(col)) for col in header))
    return "\n".join(lines) + "\n"


def _sigma_distance(estimate: float, analytic: Optional[float], std_err: float):
    if analytic is None:
        return None
    diff = abs(estimate - analytic)
    if std_err == 0.0:
        return 0.0 if diff == 0.0 else math.inf
    return diff / std_err


def _estimate_row(cfg: ExperimentConfig, e: ViolationEstimate, **extra) -> dict:
    row = {
        "scenario_id": cfg.scenario_id,
        "trials": e.trials,
        "estimate": e.p_hat,
        "std_err": e.std_err,
        "ci_lo": e.ci95[0],
        "ci_hi": e.ci95[1],
    }
    row.update(extra)
    if "analytic_value" in row:
        row["sigma_distance"] = _sigma_distance(e.p_hat, row["analytic_value"], e.std_err)
    return row


SIM_HEADER = (
    "scenario_id",
    "kind",
    "n",
    "w",
    "trials",
    "estimate",
    "std_err",
    "ci_lo",
    "ci_hi",
    "analytic_value",
    "bound_value",
    "sigma_distance",
)


def _run_chain_sim(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    s = cfg.scenario
    assert isinstance(s, CausalChainScenario)
    rows = []
    if cfg.w_sweep:
        crn = bool(cfg.params.get("common_random_numbers", True))
        estimates = estimate_no_violation_sweep(
            s, cfg.w_sweep, cfg.trials, cfg.seed, common_random_numbers=crn, threads=cfg.threads
        )
        for w, e in zip(cfg.w_sweep, estimates):
            rows.append(
                _estimate_row(
                    cfg, e, kind="chain_no_violation", n=s.n, w=w,
                    analytic_value=None, bound_value=None,
                )
            )
    else:
        e = estimate_chain(s, cfg.twi, cfg.trials, cfg.seed, cfg.threads).no_violation
        rows.append(
            _estimate_row(
                cfg, e, kind="chain_no_violation", n=s.n, w=cfg.twi.window,
                analytic_value=None, bound_value=None,
            )
        )
    return SIM_HEADER, rows


def _deterministic_arrival(inp) -> Optional[float]:
    if isinstance(inp, LinkInput) and isinstance(inp.model, Constant):
        return inp.delay + inp.model.value
    if isinstance(inp, SensorSpec) and inp.mode is SensorMode.ASYNCHRONOUS:
        return inp.tau_s + inp.t_s
    return None


def _run_fanout_sim(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    s = cfg.scenario
    assert isinstance(s, FanOutScenario)
    e = estimate_sim_violation(s, cfg.twi, cfg.trials, cfg.seed, cfg.threads)
    arrivals = [_deterministic_arrival(inp) for inp in s.inputs]
    analytic = None
    if cfg.twi.random_offset and all(a is not None for a in arrivals):
        analytic = analytics.p_sim_violation_n(arrivals, cfg.twi.window)
    row = _estimate_row(
        cfg, e, kind="fanout_sim_violation", n=s.n, w=cfg.twi.window,
        analytic_value=analytic, bound_value=None,
    )
    return SIM_HEADER, [row]


BOUNDS_HEADER = (
    "scenario_id",
    "n",
    "w",
    "trials",
    "joint_estimate",
    "joint_std_err",
    "product_bound",
    "holder_bound",
    "max_pairwise",
    "pairwise",
)


def _run_bounds_check(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    s = cfg.scenario
    assert isinstance(s, CausalChainScenario)
    est = estimate_chain(s, cfg.twi, cfg.trials, cfg.seed, cfg.threads)
    pairwise = [e.p_hat for e in est.pairwise]
    w = cfg.twi.window
    row = {
        "scenario_id": cfg.scenario_id,
        "n": s.n,
        "w": w,
        "trials": cfg.trials,
        "joint_estimate": est.no_violation.p_hat,
        "joint_std_err": est.no_violation.std_err,
        "product_bound": bounds.ordered_product_bound(pairwise) if w == 0.0 else None,
        "holder_bound": bounds.ordered_holder_bound(pairwise) if w > 0.0 else None,
        "max_pairwise": max(pairwise) if w > 0.0 else None,
        "pairwise": ";".join(repr(p) for p in pairwise),
    }
    return BOUNDS_HEADER, [row]


NAME_VALUE_HEADER = ("scenario_id", "op", "name", "value")


def _two_input_params(p: dict) -> analytics.TwoInputParams:
    return analytics.TwoInputParams(
        t_s=p["t_s"],
        tau_s=p.get("tau_s", 0.0),
        tau_a=p.get("tau_a", 0.0),
        t_min=p.get("t_min", 0.0),
        t_max=p.get("t_max", math.inf),
        w=p.get("w", 0.0),
    )


def _run_analytic(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    p = cfg.params
    op = p.get("op")
    out: list[tuple[str, object]] = []
    try:
        if op == "two_sensor_min_window":
            out.append(
                (
                    "w_min",
                    analytics.twi_two_sensor_min_window(
                        p["t_s1"], p["t_s2"], p.get("tau_s1", 0.0), p.get("tau_s2", 0.0)
                    ),
                )
            )
        elif op == "sim_violation_n":
            out.append(("p_violation", analytics.p_sim_violation_n(p["arrivals"], p["w"])))
        elif op == "cv_physical_cause":
            out.append(("p_violation", analytics.p_cv_physical_cause(p["t_s"], p["t_d"], p["w"])))
        elif op == "cv_digital_cause":
            out.append(("p_violation", analytics.p_cv_digital_cause(p["t_s"], p["t_d"], p["w"])))
        elif op in ("conditions_physical_cause", "conditions_digital_cause"):
            params = _two_input_params(p)
            fn = (
                analytics.causality_conditions_physical_cause
                if op == "conditions_physical_cause"
                else analytics.causality_conditions_digital_cause
            )
            report = fn(params, p["t_ab"])
            out.extend(
                [
                    ("never_violated", report.never_violated),
                    ("certainly_violated", report.certainly_violated),
                    ("w_min", report.w_min),
                    ("w_min_raw", report.w_min_raw),
                ]
            )
        elif op == "expected_cv_two_input":
            params = _two_input_params(p)
            model = model_from_dict(p["model"], "params.model")
            out.append(
                ("p_violation", analytics.expected_cv_two_input(params, model, p.get("cause", "physical")))
            )
        elif op == "event_throughput_loss":
            from twisim.twi import event_throughput_loss

            out.append(("loss", event_throughput_loss(p["w"], p["t_0"])))
        else:
            raise ConfigError(f"params.op: unknown analytic operation {op!r}")
    except KeyError as exc:
        raise ConfigError(f"params.{exc.args[0]}: missing required field for op {op!r}") from exc
    rows = [
        {"scenario_id": cfg.scenario_id, "op": op, "name": name, "value": value}
        for name, value in out
    ]
    return NAME_VALUE_HEADER, rows


def _run_plan(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    p = cfg.params
    out: list[tuple[str, object]] = []
    if "sender_budget" in p:
        budget = planner.latency_budget_digital_cause(
            p["t_s"], p.get("tau_a", 0.0), p.get("tau_s", 0.0), p["sender_budget"]
        )
        out.append(("max_t_ab", budget.max_t_ab))
        out.append(("radio_budget", budget.radio_budget))
    if "model" in p and "w" in p:
        model = model_from_dict(p["model"], "params.model")
        out.append(("p_miss_known_edge", planner.p_miss_known_edge(model, p["w"])))
        report = planner.p_miss_unknown_edge(model, p["w"])
        out.append(("p_miss_nominal", report.nominal_value))
        out.append(("p_miss_exact", report.exact_value))
    if "slot" in p:
        grid = planner.SlotGrid(p["slot"])
        if "w" in p:
            out.append(("twi_on_grid", planner.validate_twi_on_grid(p["w"], grid)))
        if "t" in p:
            out.append(("slot_index", planner.quantize_to_slots(p["t"], grid)))
    if not out:
        raise ConfigError("params: plan config needs sender_budget, model+w, or slot entries")
    rows = [
        {"scenario_id": cfg.scenario_id, "op": "plan", "name": name, "value": value}
        for name, value in out
    ]
    return NAME_VALUE_HEADER, rows


FIG7_HEADER = ("N", "exact", "bound", "mc_estimate", "std_err")
FIG8_HEADER = ("W_over_tau", "N", "estimate", "std_err")


def two_rate_chain(n: int, t_0: float = 1.0, tau: float = 0.5) -> CausalChainScenario:
    """Chain of n senders that pick transmission time t_0 or 2*t_0 with equal
    probability; action time tau < t_0 between consecutive events."""
    return CausalChainScenario(
        action_times=(tau,) * (n - 1),
        inputs=(LinkInput(TwoPoint(2.0 * t_0, t_0, 0.5)),) * n,
    )


def exponential_chain(n: int, tau: float = 1.0) -> CausalChainScenario:
    """Chain of n senders with i.i.d. exponential transmission times of mean
    0.5*tau; action time tau between consecutive events."""
    return CausalChainScenario(
        action_times=(tau,) * (n - 1),
        inputs=(LinkInput(ShiftedExponential(0.0, 2.0 / tau)),) * n,
    )


def reproduce_two_rate_curve(
    trials: int, seed: int, threads: int = 1, n_values: Sequence[int] = range(2, 11)
) -> list[dict]:
    """Exact value, pairwise bound and Monte-Carlo estimate of the chain
    no-violation probability for the two-rate reference case, W = 0."""
    rows = []
    for n in n_values:
        e = estimate_chain(
            two_rate_chain(n), TwiSpec(0.0), trials, derived_seed(seed, n), threads
        ).no_violation
        rows.append(
            {
                "N": n,
                "exact": bounds.two_rate_no_violation_exact(n),
                "bound": bounds.two_rate_pairwise_bound(n),
                "mc_estimate": e.p_hat,
                "std_err": e.std_err,
            }
        )
    return rows


def reproduce_window_sweep(
    trials: int,
    seed: int,
    threads: int = 1,
    tau: float = 1.0,
    n_values: Sequence[int] = (2, 10),
    w_over_tau: Sequence[float] = tuple(x * 0.25 for x in range(13)),
) -> list[dict]:
    """No-violation probability vs window width for i.i.d. exponential
    transmission times of mean 0.5*tau, common random numbers per curve."""
    rows = []
    for n in n_values:
        estimates = estimate_no_violation_sweep(
            exponential_chain(n, tau),
            [x * tau for x in w_over_tau],
            trials,
            derived_seed(seed, n),
            common_random_numbers=True,
            threads=threads,
        )
        for x, e in zip(w_over_tau, estimates):
            rows.append({"W_over_tau": x, "N": n, "estimate": e.p_hat, "std_err": e.std_err})
    return rows


def _run_reproduce(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    figure = cfg.params.get("figure")
    if figure == 7:
        return FIG7_HEADER, reproduce_two_rate_curve(cfg.trials, cfg.seed, cfg.threads)
    if figure == 8:
        return FIG8_HEADER, reproduce_window_sweep(cfg.trials, cfg.seed, cfg.threads)
    raise ConfigError(f"params.figure: expected 7 or 8, got {figure!r}")


_RUNNERS = {
    "analytic": _run_analytic,
    "chain_sim": _run_chain_sim,
    "fanout_sim": _run_fanout_sim,
    "bounds_check": _run_bounds_check,
    "plan": _run_plan,
    "reproduce": _run_reproduce,
}


def run_experiment(cfg: ExperimentConfig) -> tuple[tuple[str, ...], list[dict]]:
    """Execute the experiment; returns (header, rows)."""
    return _RUNNERS[cfg.kind](cfg)


def _git_describe() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=10,
        )
        return out.stdout.strip() if out.returncode == 0 else ""
    except OSError:
        return ""


def write_outputs(cfg: ExperimentConfig, header, rows, out_path: Optional[str], wall_time: float) -> None:
    """Write the CSV (stdout when no path) and, for files, the manifest."""
    csv_text = rows_to_csv(header, rows)
    if out_path is None:
        sys.stdout.write(csv_text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text)
    manifest = {
        "config_sha256": hashlib.sha256(serialize_config(cfg).encode()).hexdigest(),
        "seed": cfg.seed,
        "trials": cfg.trials,
        "threads": cfg.threads,
        "git_describe": _git_describe(),
        "wall_time_s": wall_time,
        "package_version": __version__,
    }
    with open(out_path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def execute(cfg: ExperimentConfig, out_path: Optional[str] = None) -> list[dict]:
    """Run and persist an experiment; returns the result rows."""
    start = time.monotonic()
    header, rows = run_experiment(cfg)
    write_outputs(cfg, header, rows, out_path if out_path is not None else cfg.output, time.monotonic() - start)
    return rows
