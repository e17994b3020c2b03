"""Experiment runners and deterministic table output.

Each runner returns a list of rows. Sweep points are independent jobs; with
``threads > 1`` they run in a process pool and are re-ordered by sweep index
before returning, so the worker count never changes the output.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .. import __version__
from .. import actuation as act
from .. import netscene as ns
from .. import optimize as op
from .config import ExperimentConfig, build_airframe, build_scenario_a, build_scenario_b


@dataclass(frozen=True)
class SweepRow:
    index: int
    sweep_value: float
    label: str
    objective: float
    summary: tuple  # (column, value) pairs describing the pose(s) and powers
    evaluations: int
    budget_exhausted: bool
    wall_time_s: float

    def record(self, sweep_column: str, timing: bool = False) -> dict:
        r = {sweep_column: self.sweep_value, "strategy": self.label, "objective": self.objective}
        r.update(self.summary)
        r["evaluations"] = self.evaluations
        r["budget_exhausted"] = self.budget_exhausted
        if timing:
            r["wall_time_s"] = self.wall_time_s
        return r


def _pose_summary(prefix, pose) -> list:
    p, a = pose.position, pose.antenna_axis
    return [(f"{prefix}x_m", float(p[0])), (f"{prefix}y_m", float(p[1])), (f"{prefix}z_m", float(p[2])),
            (f"{prefix}axis_x", float(a[0])), (f"{prefix}axis_y", float(a[1])),
            (f"{prefix}axis_z", float(a[2]))]


def _point_a(config: ExperimentConfig, index: int) -> list:
    value = config.grid[index]
    s = build_scenario_a(config, value)
    params = config.optimizer
    done = {}
    for strategy in (ns.Strategy.MAX_GAIN, ns.Strategy.ZERO_INTERFERENCE, ns.Strategy.VERTICAL_FIXED,
                     ns.Strategy.OPTIMUM_POSE):
        warm = [o.poses[0] for o, _ in done.values()] if strategy is ns.Strategy.OPTIMUM_POSE else ()
        t0 = time.perf_counter()
        o = op.optimize_scenario_a(s, strategy, params, warm)
        done[strategy] = (o, time.perf_counter() - t0)
    rows = []
    for strategy in ns.Strategy:
        o, dt = done[strategy]
        rows.append(SweepRow(index, value, o.label, o.objective, tuple(_pose_summary("", o.poses[0])),
                             o.evaluations, o.budget_exhausted, dt))
    return rows


def _point_b(config: ExperimentConfig, index: int) -> list:
    value = config.grid[index]
    s = build_scenario_b(config, value)
    params = config.optimizer
    rows = []
    for method in op.MethodB:
        t0 = time.perf_counter()
        o = op.optimize_scenario_b(s, method, params)
        dt = time.perf_counter() - t0
        summary = (_pose_summary("comm_", o.poses[0]) + _pose_summary("jam_", o.poses[1])
                   + [("p_comm_w", float(o.powers_w[0])), ("p_jam_w", float(o.powers_w[1]))])
        rows.append(SweepRow(index, value, o.label, o.objective, tuple(summary), o.evaluations,
                             o.budget_exhausted, dt))
    return rows


def _run_points(job, config: ExperimentConfig, n: int, threads: int) -> list:
    if threads <= 1 or n <= 1:
        parts = [job(config, i) for i in range(n)]
    else:
        with ProcessPoolExecutor(max_workers=min(threads, n)) as pool:
            parts = list(pool.map(job, [config] * n, range(n)))
    rows = [r for part in parts for r in part]
    rows.sort(key=lambda r: r.index)  # stable: keeps strategy order inside a point
    return rows


def run_sweep_a(config: ExperimentConfig, threads: int = 1) -> list:
    """One row per (jammer power, strategy), in grid then strategy order."""
    return _run_points(_point_a, config, len(config.grid), threads)


def run_sweep_b(config: ExperimentConfig, threads: int = 1) -> list:
    """One row per (p_max, method), in grid then method order."""
    return _run_points(_point_b, config, len(config.grid), threads)


def _classify_one(config: ExperimentConfig, index: int) -> act.CapabilityReport:
    sc = config.document["scenario"]
    return act.classify(build_airframe(sc["configs"][index]), sc["orientation_samples"], config.seed)


def run_classify(config: ExperimentConfig, threads: int = 1) -> list:
    """One :class:`CapabilityReport` per airframe, in document order."""
    n = len(config.document["scenario"]["configs"])
    if threads <= 1 or n <= 1:
        return [_classify_one(config, i) for i in range(n)]
    with ProcessPoolExecutor(max_workers=min(threads, n)) as pool:
        return list(pool.map(_classify_one, [config] * n, range(n)))


def run_tilt_sweep(config: ExperimentConfig, threads: int = 1) -> act.TiltSweepResult:
    sc = config.document["scenario"]
    lo, hi = sc["alpha_deg"]
    return act.tilt_sweep(lambda a: build_airframe(sc["template"], math.degrees(a)),
                          (math.radians(lo), math.radians(hi)), sc["steps"],
                          sc["orientation_samples"], config.seed)


# Records and writers.

def classify_records(reports) -> list:
    return [{
        "name": r.name,
        "static_hover": r.static_hover,
        "omnidirectional_hover": r.omnidirectional_hover,
        "worst_margin": r.worst_margin,
        "failure_hover": "".join("1" if ok else "0" for ok in r.per_rotor_failure_hover),
        "mean_efficiency": r.mean_efficiency,
        "samples": r.samples,
        "max_residual": r.max_residual,
    } for r in reports]


def tilt_records(result: act.TiltSweepResult) -> list:
    return [{"alpha_deg": math.degrees(a), "worst_margin": m,
             "best": result.best_alpha_rad is not None and a == result.best_alpha_rad}
            for a, m in zip(result.alphas_rad, result.margins)]


def run_experiment(config: ExperimentConfig, threads: int = 1, timing: bool = False) -> list:
    """Run ``config`` and return output records (dicts with a fixed key order)."""
    if config.experiment == "sweep_a":
        return [r.record(config.sweep_variable, timing) for r in run_sweep_a(config, threads)]
    if config.experiment == "sweep_b":
        return [r.record(config.sweep_variable, timing) for r in run_sweep_b(config, threads)]
    if config.experiment == "classify":
        return classify_records(run_classify(config, threads))
    return tilt_records(run_tilt_sweep(config, threads))


def format_value(v) -> str:
    # 17 significant digits: every double round-trips through the text.
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else format(v, ".16e")
    return str(v)


def metadata(config: ExperimentConfig) -> dict:
    meta = {"tool": f"omnisec {__version__}", "experiment": config.experiment,
            "seed": config.seed, "config_sha256": config.digest()}
    if config.experiment == "sweep_b":
        meta["joint_local"] = "stand-in: single-start joint pattern search over all variables"
    return meta


def to_csv(records: list, config: ExperimentConfig) -> str:
    lines = [f"# {k}: {v}" for k, v in metadata(config).items()]
    if records:
        cols = list(records[0])
        lines.append(",".join(cols))
        lines.extend(",".join(format_value(r[c]) for c in cols) for r in records)
    return "\n".join(lines) + "\n"


def to_jsonl(records: list, config: ExperimentConfig) -> str:
    def clean(v):
        return None if isinstance(v, float) and math.isnan(v) else v

    lines = [json.dumps({"meta": metadata(config)})]
    lines.extend(json.dumps({k: clean(v) for k, v in r.items()}) for r in records)
    return "\n".join(lines) + "\n"


def read_csv(text: str) -> list:
    """Parse :func:`to_csv` output back into string-valued records."""
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not body:
        return []
    cols = body[0].split(",")
    return [dict(zip(cols, ln.split(","))) for ln in body[1:]]
