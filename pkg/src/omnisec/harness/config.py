"""Experiment documents: parsing, validation, defaults and serialization.

A document is a JSON object. Values are kept in the units written in the
document (dBm, GHz, degrees) so that ``serialize(parse(d))`` reproduces the
normalized document exactly; conversion to SI happens when scenario objects
are built.
"""
from __future__ import annotations

import copy
import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass

from .. import actuation as act
from .. import netscene as ns
from ..antenna import PatternKind, RadiationPattern
from ..channel import RadioParams, dbm_to_w
from ..errors import DomainError, ParseError, ValidationError
from ..optimize import OptimizerParams

EXPERIMENTS = ("sweep_a", "sweep_b", "classify", "tilt_sweep")

_OPTIMIZER_DEFAULTS = dataclasses.asdict(OptimizerParams())
del _OPTIMIZER_DEFAULTS["seed"]

_RADIO_DEFAULTS = {"carrier_ghz": 2.4, "noise_power_w": 1e-13, "min_distance_m": 1.0}

_DEFAULT_SCENARIO = {
    "sweep_a": {
        "users": [{"position_m": [-50.0, 0.0, 0.0], "power_dbm": 10.0},
                  {"position_m": [50.0, 0.0, 0.0], "power_dbm": 10.0}],
        "jammer": {"position_m": [30.0, 60.0, 0.0]},
        "uav_pattern": {"kind": "half_wave_dipole"},
        "search_box": {"lo": [-100.0, -100.0, 10.0], "hi": [100.0, 100.0, 120.0]},
    },
    "sweep_b": {
        "legit_user": {"position_m": [0.0, 0.0, 0.0]},
        "eavesdroppers": [{"position_m": [60.0, 40.0, 0.0]},
                          {"position_m": [-50.0, 55.0, 0.0]}],
        "comm_pattern": {"kind": "axial_lobe", "q": 4.0, "backlobe_floor": 0.01},
        "jam_pattern": {"kind": "half_wave_dipole"},
        "comm_box": {"lo": [-100.0, 20.0, 20.0], "hi": [100.0, 100.0, 100.0]},
        "jam_box": {"lo": [-100.0, -100.0, 20.0], "hi": [100.0, -20.0, 100.0]},
    },
    "classify": {
        "configs": [{"template": "planar_quad"}, {"template": "omrav_cube"}],
        "orientation_samples": 100,
    },
    "tilt_sweep": {
        "template": {"template": "omrav_cube"},
        "alpha_deg": [0.0, 60.0],
        "steps": 13,
        "orientation_samples": 100,
    },
}

_DEFAULT_GRID = {
    "sweep_a": ("jammer_power_dbm", [-120.0, -40.0, -20.0, -10.0, 0.0, 10.0, 20.0, 30.0, 40.0]),
    "sweep_b": ("p_max_dbm", [-30.0, -20.0, -10.0, 0.0, 10.0, 20.0]),
}

_TEMPLATE_KEYS = {
    "planar_quad": {"arm_m": 0.2, "mass_kg": 1.0, "f_max_n": 5.0, "drag_coeff_m": 0.016},
    "omrav_cube": {"tilt_angle_deg": 35.0, "half_edge_m": 0.25, "mass_kg": 3.5, "f_max_n": 20.0,
                   "drag_coeff_m": 0.016},
}


def default_document(experiment: str) -> dict:
    if experiment not in EXPERIMENTS:
        raise ValidationError("experiment", f"unknown experiment {experiment!r}")
    doc = {"experiment": experiment, "seed": 0, "output": None,
           "scenario": copy.deepcopy(_DEFAULT_SCENARIO[experiment])}
    if experiment in _DEFAULT_GRID:
        var, grid = _DEFAULT_GRID[experiment]
        doc["sweep"] = {var: list(grid)}
        doc["radio"] = dict(_RADIO_DEFAULTS)
        doc["optimizer"] = dict(_OPTIMIZER_DEFAULTS)
    return doc


# Low-level readers. Each takes the key path used in error messages.

def _obj(v, path) -> dict:
    if not isinstance(v, dict):
        raise ParseError(path, "expected an object")
    return v


def _keys(d: dict, allowed, path, required=()):
    for k in d:
        if k not in allowed:
            raise ParseError(f"{path}.{k}" if path else k, "unknown key")
    for k in required:
        if k not in d:
            raise ParseError(f"{path}.{k}" if path else k, "missing required key")


def _num(v, path) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(path, "expected a number")
    v = float(v)
    if not math.isfinite(v):
        raise ParseError(path, "expected a finite number")
    return v


def _int(v, path) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(path, "expected an integer")
    return v


def _vec3(v, path) -> list:
    if not isinstance(v, list) or len(v) != 3:
        raise ParseError(path, "expected a list of 3 numbers")
    return [_num(c, f"{path}[{i}]") for i, c in enumerate(v)]


def _list(v, path) -> list:
    if not isinstance(v, list):
        raise ParseError(path, "expected a list")
    return v


def _merge(defaults: dict, given, path) -> dict:
    given = _obj(given, path)
    _keys(given, defaults, path)
    out = dict(defaults)
    out.update(given)
    return out


# Section normalizers. Each returns a JSON-ready dict with defaults filled.

def _node(v, path, power_key=None) -> dict:
    v = _obj(v, path)
    allowed = ("position_m", power_key) if power_key else ("position_m",)
    _keys(v, allowed, path, required=allowed)
    out = {"position_m": _vec3(v["position_m"], f"{path}.position_m")}
    if power_key:
        out[power_key] = _num(v[power_key], f"{path}.{power_key}")
    return out


def _pattern(v, path) -> dict:
    v = _obj(v, path)
    _keys(v, ("kind", "q", "backlobe_floor"), path, required=("kind",))
    try:
        kind = PatternKind(v["kind"])
    except ValueError:
        raise ParseError(f"{path}.kind", f"unknown pattern {v['kind']!r}") from None
    if kind is PatternKind.AXIAL_LOBE:
        out = {"kind": kind.value, "q": _num(v.get("q", 4.0), f"{path}.q"),
               "backlobe_floor": _num(v.get("backlobe_floor", 0.0), f"{path}.backlobe_floor")}
        if not out["q"] >= 1.0:
            raise ValidationError("q", "lobe exponent must be at least 1")
        if not 0.0 <= out["backlobe_floor"] < 1.0:
            raise ValidationError("backlobe_floor", "must lie in [0, 1)")
        return out
    if "q" in v or "backlobe_floor" in v:
        raise ParseError(path, f"pattern {kind.value} takes no parameters")
    return {"kind": kind.value}


def _box(v, path) -> dict:
    v = _obj(v, path)
    _keys(v, ("lo", "hi"), path, required=("lo", "hi"))
    out = {"lo": _vec3(v["lo"], f"{path}.lo"), "hi": _vec3(v["hi"], f"{path}.hi")}
    if any(h <= l for l, h in zip(out["lo"], out["hi"])):
        raise ValidationError("box", f"{path} must have lo < hi on every axis")
    return out


def _radio(v) -> dict:
    out = _merge(_RADIO_DEFAULTS, v, "radio")
    for k in out:
        out[k] = _num(out[k], f"radio.{k}")
    if not out["noise_power_w"] > 0:
        raise ValidationError("noise_power", "noise power must be positive")
    if not out["carrier_ghz"] > 0:
        raise ValidationError("carrier", "carrier frequency must be positive")
    if not out["min_distance_m"] > 0:
        raise ValidationError("min_distance", "minimum distance must be positive")
    return out


def _optimizer(v) -> dict:
    out = _merge(_OPTIMIZER_DEFAULTS, v, "optimizer")
    for k, default in _OPTIMIZER_DEFAULTS.items():
        out[k] = _int(out[k], f"optimizer.{k}") if isinstance(default, int) else _num(
            out[k], f"optimizer.{k}")
    try:
        OptimizerParams(**out)
    except DomainError as e:
        raise ValidationError("optimizer", str(e)) from None
    return out


def _grid(v, var, path) -> list:
    v = _obj(v, path)
    _keys(v, (var,), path, required=(var,))
    grid = [_num(x, f"{path}.{var}[{i}]") for i, x in enumerate(_list(v[var], f"{path}.{var}"))]
    if not grid:
        raise ValidationError("sweep_grid", "grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValidationError("sweep_grid", "grid must be strictly increasing")
    return grid


def _scenario_a(v) -> dict:
    p = "scenario"
    v = _merge(_DEFAULT_SCENARIO["sweep_a"], v, p)
    users = _list(v["users"], f"{p}.users")
    if len(users) != 2:
        raise ValidationError("users", "exactly two users are required")
    return {
        "users": [_node(u, f"{p}.users[{i}]", "power_dbm") for i, u in enumerate(users)],
        "jammer": _node(v["jammer"], f"{p}.jammer"),
        "uav_pattern": _pattern(v["uav_pattern"], f"{p}.uav_pattern"),
        "search_box": _box(v["search_box"], f"{p}.search_box"),
    }


def _scenario_b(v) -> dict:
    p = "scenario"
    v = _merge(_DEFAULT_SCENARIO["sweep_b"], v, p)
    eaves = _list(v["eavesdroppers"], f"{p}.eavesdroppers")
    if not eaves:
        raise ValidationError("eavesdroppers", "at least one eavesdropper is required")
    return {
        "legit_user": _node(v["legit_user"], f"{p}.legit_user"),
        "eavesdroppers": [_node(e, f"{p}.eavesdroppers[{i}]") for i, e in enumerate(eaves)],
        "comm_pattern": _pattern(v["comm_pattern"], f"{p}.comm_pattern"),
        "jam_pattern": _pattern(v["jam_pattern"], f"{p}.jam_pattern"),
        "comm_box": _box(v["comm_box"], f"{p}.comm_box"),
        "jam_box": _box(v["jam_box"], f"{p}.jam_box"),
    }


def _rotor(v, path) -> dict:
    v = _obj(v, path)
    keys = ("position_m", "tilt_axis", "tilt_angle_deg", "spin", "thrust_bounds_n", "drag_coeff_m")
    _keys(v, keys, path, required=("position_m", "thrust_bounds_n"))
    bounds = _list(v["thrust_bounds_n"], f"{path}.thrust_bounds_n")
    if len(bounds) != 2:
        raise ParseError(f"{path}.thrust_bounds_n", "expected [f_lo, f_hi]")
    out = {
        "position_m": _vec3(v["position_m"], f"{path}.position_m"),
        "tilt_axis": _vec3(v.get("tilt_axis", [1.0, 0.0, 0.0]), f"{path}.tilt_axis"),
        "tilt_angle_deg": _num(v.get("tilt_angle_deg", 0.0), f"{path}.tilt_angle_deg"),
        "spin": _int(v.get("spin", 1), f"{path}.spin"),
        "thrust_bounds_n": [_num(b, f"{path}.thrust_bounds_n[{i}]") for i, b in enumerate(bounds)],
        "drag_coeff_m": _num(v.get("drag_coeff_m", 0.016), f"{path}.drag_coeff_m"),
    }
    lo, hi = out["thrust_bounds_n"]
    if not lo < hi:
        raise ValidationError("thrust_bounds", f"{path}: f_lo must be below f_hi")
    if lo != 0.0 and lo != -hi:
        raise ValidationError("thrust_bounds", f"{path}: f_lo must be 0 or -f_hi")
    if out["spin"] not in (1, -1):
        raise ValidationError("spin", f"{path}: spin must be +1 or -1")
    return out


def _airframe(v, path) -> dict:
    """Either ``{"template": name, ...overrides}`` or an explicit rotor list."""
    v = _obj(v, path)
    if "template" in v:
        name = v["template"]
        if name not in _TEMPLATE_KEYS:
            raise ParseError(f"{path}.template", f"unknown template {name!r}")
        out = {"template": name, "name": name}
        out.update(_TEMPLATE_KEYS[name])
        _keys(v, ("template", "name") + tuple(_TEMPLATE_KEYS[name]), path)
        for k in _TEMPLATE_KEYS[name]:
            if k in v:
                out[k] = _num(v[k], f"{path}.{k}")
        if "name" in v:
            out["name"] = str(v["name"])
        if not out["mass_kg"] > 0:
            raise ValidationError("mass", "mass must be positive")
        return out
    _keys(v, ("name", "mass_kg", "rotors"), path, required=("name", "mass_kg", "rotors"))
    rotors = _list(v["rotors"], f"{path}.rotors")
    if len(rotors) < 3:
        raise ValidationError("rotors", "at least 3 rotors are required")
    out = {"name": str(v["name"]), "mass_kg": _num(v["mass_kg"], f"{path}.mass_kg"),
           "rotors": [_rotor(r, f"{path}.rotors[{i}]") for i, r in enumerate(rotors)]}
    if not out["mass_kg"] > 0:
        raise ValidationError("mass", "mass must be positive")
    return out


def _samples(v, path) -> int:
    n = _int(v, path)
    if n < 10:
        raise ValidationError("orientation_samples", "at least 10 samples are required")
    return n


def _classify(v) -> dict:
    p = "scenario"
    v = _merge(_DEFAULT_SCENARIO["classify"], v, p)
    configs = _list(v["configs"], f"{p}.configs")
    if not configs:
        raise ValidationError("configs", "at least one airframe is required")
    return {"configs": [_airframe(c, f"{p}.configs[{i}]") for i, c in enumerate(configs)],
            "orientation_samples": _samples(v["orientation_samples"], f"{p}.orientation_samples")}


def _tilt(v) -> dict:
    p = "scenario"
    v = _merge(_DEFAULT_SCENARIO["tilt_sweep"], v, p)
    template = _airframe(v["template"], f"{p}.template")
    if template.get("template") != "omrav_cube":
        raise ValidationError("template", "tilt sweeps need a tilt-parameterized template")
    rng = _list(v["alpha_deg"], f"{p}.alpha_deg")
    if len(rng) != 2:
        raise ParseError(f"{p}.alpha_deg", "expected [lo, hi]")
    rng = [_num(a, f"{p}.alpha_deg[{i}]") for i, a in enumerate(rng)]
    if not rng[0] < rng[1]:
        raise ValidationError("alpha_range", "lo must be below hi")
    steps = _int(v["steps"], f"{p}.steps")
    if steps < 2:
        raise ValidationError("steps", "at least 2 steps are required")
    return {"template": template, "alpha_deg": rng, "steps": steps,
            "orientation_samples": _samples(v["orientation_samples"], f"{p}.orientation_samples")}


_SCENARIO_PARSERS = {"sweep_a": _scenario_a, "sweep_b": _scenario_b,
                     "classify": _classify, "tilt_sweep": _tilt}


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated experiment document.

    ``document`` is the fully normalized JSON form; the other fields are
    convenience views into it.
    """

    experiment: str
    seed: int
    output: str | None
    document: dict

    @property
    def grid(self) -> tuple:
        if self.experiment not in _DEFAULT_GRID:
            return ()
        var = _DEFAULT_GRID[self.experiment][0]
        return tuple(self.document["sweep"][var])

    @property
    def sweep_variable(self) -> str | None:
        return _DEFAULT_GRID.get(self.experiment, (None,))[0]

    @property
    def optimizer(self) -> OptimizerParams:
        return OptimizerParams(seed=self.seed, **self.document["optimizer"])

    @property
    def radio(self) -> RadioParams:
        r = self.document["radio"]
        return RadioParams(r["carrier_ghz"] * 1e9, r["noise_power_w"], r["min_distance_m"])

    def with_seed(self, seed: int) -> ExperimentConfig:
        doc = copy.deepcopy(self.document)
        doc["seed"] = seed
        return parse_config(doc)

    def digest(self) -> str:
        return hashlib.sha256(serialize(self).encode()).hexdigest()


def parse_config(document) -> ExperimentConfig:
    """Validate ``document`` (a dict or JSON text) and fill defaults."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ParseError("$", f"invalid JSON: {e.msg} at line {e.lineno}") from None
    document = _obj(document, "$")
    if "experiment" not in document:
        raise ParseError("experiment", "missing required key")
    experiment = document["experiment"]
    if experiment not in EXPERIMENTS:
        raise ValidationError("experiment", f"unknown experiment {experiment!r}")
    defaults = default_document(experiment)
    _keys(document, defaults, "")

    seed = _int(document.get("seed", 0), "seed")
    if not 0 <= seed < 2 ** 64:
        raise ValidationError("seed", "seed must be an unsigned 64-bit integer")
    output = document.get("output")
    if output is not None and not isinstance(output, str):
        raise ParseError("output", "expected a string path or null")

    doc = {"experiment": experiment, "seed": seed, "output": output,
           "scenario": _SCENARIO_PARSERS[experiment](document.get("scenario", {}))}
    if experiment in _DEFAULT_GRID:
        var, grid = _DEFAULT_GRID[experiment]
        doc["sweep"] = {var: _grid(document.get("sweep", {var: grid}), var, "sweep")}
        doc["radio"] = _radio(document.get("radio", {}))
        doc["optimizer"] = _optimizer(document.get("optimizer", {}))
    return ExperimentConfig(experiment, seed, output, doc)


def serialize(config: ExperimentConfig) -> str:
    return json.dumps(config.document, sort_keys=True, indent=2)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# Builders from the normalized document to domain objects.

def _build_pattern(d) -> RadiationPattern:
    kind = PatternKind(d["kind"])
    if kind is PatternKind.AXIAL_LOBE:
        return RadiationPattern.axial_lobe(d["q"], d["backlobe_floor"])
    return RadiationPattern(kind)


def _build_box(d) -> ns.Box:
    return ns.Box(tuple(d["lo"]), tuple(d["hi"]))


def build_scenario_a(config: ExperimentConfig, jammer_power_dbm: float) -> ns.ScenarioA:
    sc = config.document["scenario"]
    users = tuple(ns.GroundNode(tuple(u["position_m"]), ns.Role.USER, dbm_to_w(u["power_dbm"]))
                  for u in sc["users"])
    jammer = ns.GroundNode(tuple(sc["jammer"]["position_m"]), ns.Role.JAMMER,
                           dbm_to_w(jammer_power_dbm))
    return ns.ScenarioA(users, jammer, _build_pattern(sc["uav_pattern"]),
                        _build_box(sc["search_box"]), config.radio)


def build_scenario_b(config: ExperimentConfig, p_max_dbm: float) -> ns.ScenarioB:
    sc = config.document["scenario"]
    user = ns.GroundNode(tuple(sc["legit_user"]["position_m"]), ns.Role.USER)
    eaves = tuple(ns.GroundNode(tuple(e["position_m"]), ns.Role.EAVESDROPPER)
                  for e in sc["eavesdroppers"])
    return ns.ScenarioB(user, eaves, _build_pattern(sc["comm_pattern"]),
                        _build_pattern(sc["jam_pattern"]), _build_box(sc["comm_box"]),
                        _build_box(sc["jam_box"]), dbm_to_w(p_max_dbm), config.radio)


def build_airframe(d: dict, tilt_angle_deg: float | None = None) -> act.RotorConfig:
    if d.get("template") == "planar_quad":
        return act.planar_quad(d["arm_m"], d["mass_kg"], d["f_max_n"], d["drag_coeff_m"], d["name"])
    if d.get("template") == "omrav_cube":
        alpha = d["tilt_angle_deg"] if tilt_angle_deg is None else tilt_angle_deg
        return act.omrav_cube(math.radians(alpha), d["half_edge_m"], d["mass_kg"], d["f_max_n"],
                              d["drag_coeff_m"], d["name"])
    return act.RotorConfig.from_dict(d)
