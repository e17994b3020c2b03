"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

Sweeps run through the CLI with the bundled default documents, single
threaded, so the timings are those of a plain desk run.
"""
import json
import math
import time

import numpy as np
import pytest
from conftest import record_criterion

from omnisec import actuation as act
from omnisec import geometry as geo
from omnisec import netscene as ns
from omnisec import optimize as op
from omnisec.antenna import RadiationPattern, solid_angle_integral
from omnisec.harness import cli
from omnisec.harness.config import build_scenario_a, build_scenario_b, default_document, parse_config
from omnisec.harness.sweeps import read_csv

SEEDS_B = range(5)


def _cli(tmp, name, command, doc, *extra):
    cfg = tmp / f"{name}.json"
    cfg.write_text(json.dumps(doc))
    out = tmp / f"{name}.csv"
    t0 = time.perf_counter()
    code = cli.run([command, "--config", str(cfg), "--out", str(out), "--threads", "1", *extra])
    elapsed = time.perf_counter() - t0
    assert code == 0, f"{command} exited with {code}"
    return out, elapsed


def _curves(rows, sweep_col):
    curves = {}
    for r in rows:
        curves.setdefault(r["strategy"], []).append(float(r["objective"]))
    grid = sorted({float(r[sweep_col]) for r in rows})
    return grid, curves


@pytest.fixture(scope="module")
def tmp(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def sweep_a(tmp):
    doc = default_document("sweep_a")
    out, elapsed = _cli(tmp, "sweep_a", "sweep-a", doc)
    return doc, out, elapsed


@pytest.fixture(scope="module")
def sweep_b(tmp):
    runs = {}
    for seed in SEEDS_B:
        doc = default_document("sweep_b")
        doc["seed"] = seed
        runs[seed] = (doc,) + _cli(tmp, f"sweep_b_{seed}", "sweep-b", doc)
    return runs


def test_criterion_01_null_invariance():
    grid = [-20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0]
    t0 = time.perf_counter()
    vals = [op.optimize_scenario_a(ns.scenario_a_fixture(jammer_power_dbm=p),
                                   ns.Strategy.ZERO_INTERFERENCE, op.OptimizerParams()).objective
            for p in grid]
    elapsed = time.perf_counter() - t0
    spread = max(vals) - min(vals)
    ok = spread <= 1e-9 and elapsed < 10.0
    record_criterion(1, "zero-interference min-SINR constant from -20 to +40 dBm", ok,
                     f"spread {spread:.3e} dB (tol 1e-9), {elapsed:.1f} s (limit 10 s)")
    assert ok


def test_criterion_02_high_power_convergence(sweep_a):
    _, out, elapsed = sweep_a
    grid, c = _curves(read_csv(out.read_text()), "jammer_power_dbm")
    gaps = [abs(c["optimum_pose"][i] - c["zero_interference"][i]) for i in (-2, -1)]
    ok = max(gaps) <= 0.5 and elapsed < 60.0
    record_criterion(2, "optimum pose within 0.5 dB of zero interference at the top two powers", ok,
                     f"gaps {gaps[0]:.4f}, {gaps[1]:.4f} dB at {grid[-2]:g}, {grid[-1]:g} dBm; "
                     f"full sweep {elapsed:.1f} s (limit 60 s)")
    assert ok


def test_criterion_03_low_power_alignment(sweep_a):
    doc, out, _ = sweep_a
    grid, c = _curves(read_csv(out.read_text()), "jammer_power_dbm")
    noise_dbm = 10 * math.log10(doc["radio"]["noise_power_w"] * 1e3)
    idx = [i for i, p in enumerate(grid) if p <= noise_dbm - 20.0]
    gaps = [abs(c["optimum_pose"][i] - c["max_gain"][i]) for i in idx]
    ok = bool(idx) and max(gaps) <= 0.5
    record_criterion(3, "optimum pose within 0.5 dB of max gain when jamming is 20 dB below noise",
                     ok, f"{len(idx)} point(s) <= {noise_dbm - 20:g} dBm, worst gap "
                     f"{max(gaps) if gaps else float('nan'):.2e} dB")
    assert ok


def test_criterion_04_dominance_and_saturation(sweep_a):
    _, out, _ = sweep_a
    grid, c = _curves(read_csv(out.read_text()), "jammer_power_dbm")
    best = c["optimum_pose"]
    dom = min(best[i] - v[i] for v in c.values() for i in range(len(grid)))
    mono = max(v[i + 1] - v[i] for v in c.values() for i in range(len(grid) - 1))
    sat = max(abs(v[i + 1] - v[i]) for v in c.values() for i in range(len(grid) - 3, len(grid) - 1))
    ok = dom >= -0.05 and mono <= 0.05 and sat <= 0.2
    record_criterion(4, "dominance, monotone curves and saturation", ok,
                     f"min(OP - other) {dom:+.4f} dB (>= -0.05), max rise {mono:+.4f} dB (<= 0.05), "
                     f"max step over top three points {sat:.4f} dB (<= 0.2)")
    assert ok


def test_criterion_05_orientation_gap(sweep_a):
    _, out, _ = sweep_a
    grid, c = _curves(read_csv(out.read_text()), "jammer_power_dbm")
    gap = c["optimum_pose"][-1] - c["vertical_fixed"][-1]
    ok = gap >= 1.0
    record_criterion(5, "optimum pose beats vertical fixed by >= 1 dB at the highest power", ok,
                     f"gap {gap:.3f} dB at {grid[-1]:g} dBm")
    assert ok


def test_criterion_06_secrecy_ordering(sweep_b):
    fv_viol, wins, total = 0, 0, 0
    for seed, (_, out, _) in sweep_b.items():
        _, c = _curves(read_csv(out.read_text()), "p_max_dbm")
        for p, f, j in zip(c["proposed"], c["fixed_vertical"], c["joint_local"]):
            fv_viol += p < f
            wins += p >= j
            total += 1
    share = wins / total
    ok = fv_viol == 0 and share >= 0.8
    record_criterion(6, "secrecy ordering over 5 seeds", ok,
                     f"proposed < fixed_vertical at {fv_viol}/{total} points; proposed >= joint_local "
                     f"at {wins}/{total} = {share:.0%} (>= 80%)")
    assert ok


def test_criterion_07_pattern_normalization():
    patterns = [RadiationPattern.isotropic(), RadiationPattern.short_dipole(),
                RadiationPattern.half_wave_dipole(), RadiationPattern.axial_lobe(q=2.0),
                RadiationPattern.axial_lobe(q=4.0)]
    errs = [abs(solid_angle_integral(p) / (4 * math.pi) - 1.0) for p in patterns]
    ok = max(errs) <= 1e-3
    record_criterion(7, "solid-angle integral equals 4 pi", ok,
                     f"worst relative error {max(errs):.2e} over {len(patterns)} patterns (tol 1e-3)")
    assert ok


def test_criterion_08_grid_oracle():
    params = op.OptimizerParams(grid_resolution=11, axis_samples=64)
    t0 = time.perf_counter()
    worst = math.inf
    for dbm in (0.0, 30.0):
        s = ns.scenario_a_fixture(jammer_power_dbm=dbm)
        refined = op.run_scenario_a(s, params)
        for strategy in ns.Strategy:
            g = op.grid_scenario_a(s, strategy, params)
            worst = min(worst, refined[strategy].objective - g.objective)
    elapsed = time.perf_counter() - t0
    ok = worst >= -0.1 and elapsed < 120.0
    record_criterion(8, "pattern search >= 11^3 x 64 grid best - 0.1 dB, all strategies", ok,
                     f"min(search - grid) {worst:+.4f} dB at 0 and 30 dBm, {elapsed:.1f} s (limit 120 s)")
    assert ok


def test_criterion_09_capability_table():
    t0 = time.perf_counter()
    quad = act.classify(act.planar_quad(), 100, 0)
    cube = act.classify(act.omrav_cube(), 100, 0)
    elapsed = time.perf_counter() - t0
    ok = (quad.static_hover and not quad.omnidirectional_hover and cube.static_hover
          and cube.omnidirectional_hover and all(cube.per_rotor_failure_hover) and elapsed < 10.0)
    record_criterion(9, "capability table", ok,
                     f"quad static={quad.static_hover} omni={quad.omnidirectional_hover}; "
                     f"cube static={cube.static_hover} omni={cube.omnidirectional_hover} "
                     f"single-failure={sum(cube.per_rotor_failure_hover)}/8; {elapsed:.1f} s (limit 10 s)")
    assert ok


def test_criterion_10_determinism(tmp, sweep_a, sweep_b):
    same = {}
    doc, first, _ = sweep_a
    second, _ = _cli(tmp, "sweep_a_again", "sweep-a", doc)
    same["sweep-a"] = first.read_bytes() == second.read_bytes()
    doc, first, _ = sweep_b[0]
    second, _ = _cli(tmp, "sweep_b_again", "sweep-b", doc)
    same["sweep-b"] = first.read_bytes() == second.read_bytes()
    for command, exp in (("classify", "classify"), ("tilt-sweep", "tilt_sweep")):
        doc = default_document(exp)
        a, _ = _cli(tmp, f"{exp}_1", command, doc)
        b, _ = _cli(tmp, f"{exp}_2", command, doc)
        same[command] = a.read_bytes() == b.read_bytes()
    ok = all(same.values())
    record_criterion(10, "byte-identical repeated runs", ok,
                     ", ".join(f"{k} {'identical' if v else 'DIFFERS'}" for k, v in same.items()))
    assert ok


def _pose(r, prefix):
    axis = tuple(float(r[f"{prefix}axis_{c}"]) for c in "xyz")
    return geo.Pose([float(r[f"{prefix}{c}_m"]) for c in "xyz"], geo.Rotation.from_antenna_axis(axis))


def test_criterion_11_self_consistency(tmp, sweep_a, sweep_b):
    worst_obj = 0.0
    doc, out, _ = sweep_a
    cfg = parse_config(doc)
    rows = read_csv(out.read_text())
    for r in rows:
        s = build_scenario_a(cfg, float(r["jammer_power_dbm"]))
        worst_obj = max(worst_obj, abs(ns.min_sinr_objective(s, _pose(r, "")) - float(r["objective"])))
    n_rows = len(rows)
    for doc, out, _ in sweep_b.values():
        cfg = parse_config(doc)
        rows = read_csv(out.read_text())
        for r in rows:
            s = build_scenario_b(cfg, float(r["p_max_dbm"]))
            v = ns.secrecy_objective(s, _pose(r, "comm_"), _pose(r, "jam_"),
                                     float(r["p_comm_w"]), float(r["p_jam_w"]))
            worst_obj = max(worst_obj, abs(v - float(r["objective"])))
        n_rows += len(rows)

    # Every hover solution behind the capability table and the tilt sweep.
    worst_res, n_solves = 0.0, 0
    configs = [act.planar_quad(), act.omrav_cube()]
    configs += [act.omrav_cube(math.radians(a)) for a in range(30, 61, 5)]
    for c in configs:
        a = act.allocation_matrix(c)
        cases = [(c, geo.Rotation.identity())] + [(c.with_failed(i), geo.Rotation.identity())
                                                   for i in range(len(c.rotors))]
        cases += [(c, rot) for rot in act.sample_orientations(100, 0)]
        for cfg_, rot in cases:
            f = act.hover_thrusts(cfg_, rot)
            if f is None:
                continue
            n_solves += 1
            worst_res = max(worst_res, float(np.linalg.norm(a @ f - act.hover_wrench(cfg_, rot))))
    classify_csv, _ = _cli(tmp, "classify_res", "classify", default_document("classify"))
    emitted = max(float(r["max_residual"]) for r in read_csv(classify_csv.read_text()))
    ok = worst_obj <= 1e-9 and worst_res <= 1e-6 and emitted <= 1e-6
    record_criterion(11, "numerical self-consistency", ok,
                     f"{n_rows} rows re-evaluate within {worst_obj:.1e} (tol 1e-9); {n_solves} hover "
                     f"solutions, worst residual {max(worst_res, emitted):.1e} (tol 1e-6)")
    assert ok
