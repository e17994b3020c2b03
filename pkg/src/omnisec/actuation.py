"""Rotor-level static hover feasibility for multirotor airframes.

A rotor produces a signed thrust ``f_i`` along its (tilted) axis ``u_i``; the
body wrench is ``A @ f`` with allocation columns
``[u_i ; r_i x u_i + spin_i * c_tau * u_i]``. Holding a pose at rest needs the
rotors to cancel gravity expressed in the body frame with zero net torque.
That is posed as a small LP: minimize the largest normalized thrust
``max |f_i| / f_max_i`` subject to the wrench equality and per-rotor bounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog

from . import geometry as geo
from .errors import DomainError, ZeroThrust

WRENCH_TOL = 1e-6


@dataclass(frozen=True)
class Rotor:
    position_m: tuple
    tilt_axis: tuple = geo.WORLD_X
    tilt_angle_rad: float = 0.0
    spin: int = 1
    thrust_bounds_n: tuple = (0.0, 10.0)
    drag_coeff_m: float = 0.016

    def __post_init__(self):
        object.__setattr__(self, "position_m", tuple(geo.as_vec3(self.position_m).tolist()))
        object.__setattr__(self, "tilt_axis", tuple(geo.unit(self.tilt_axis).tolist()))
        lo, hi = (float(b) for b in self.thrust_bounds_n)
        if lo > hi:
            raise DomainError(f"thrust bounds reversed: {lo} > {hi}")
        object.__setattr__(self, "thrust_bounds_n", (lo, hi))
        if self.spin not in (1, -1):
            raise DomainError("spin must be +1 or -1")

    @property
    def bidirectional(self) -> bool:
        return self.thrust_bounds_n[0] < 0.0

    @property
    def thrust_scale(self) -> float:
        return max(abs(self.thrust_bounds_n[0]), abs(self.thrust_bounds_n[1]))

    def failed(self) -> Rotor:
        return replace(self, thrust_bounds_n=(0.0, 0.0))


@dataclass(frozen=True)
class RotorConfig:
    rotors: tuple
    mass_kg: float
    name: str = "config"

    def __post_init__(self):
        object.__setattr__(self, "rotors", tuple(self.rotors))
        if len(self.rotors) < 3:
            raise DomainError("a rotor configuration needs at least 3 rotors")
        if not self.mass_kg > 0:
            raise DomainError("mass must be positive")

    def with_failed(self, index: int) -> RotorConfig:
        rotors = list(self.rotors)
        rotors[index] = rotors[index].failed()
        return replace(self, rotors=tuple(rotors), name=f"{self.name}-fail{index}")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mass_kg": self.mass_kg,
            "rotors": [{
                "position_m": list(r.position_m),
                "tilt_axis": list(r.tilt_axis),
                "tilt_angle_deg": math.degrees(r.tilt_angle_rad),
                "spin": r.spin,
                "thrust_bounds_n": list(r.thrust_bounds_n),
                "drag_coeff_m": r.drag_coeff_m,
            } for r in self.rotors],
        }

    @classmethod
    def from_dict(cls, d: dict) -> RotorConfig:
        rotors = [Rotor(r["position_m"], r.get("tilt_axis", geo.WORLD_X),
                        math.radians(r.get("tilt_angle_deg", 0.0)), int(r.get("spin", 1)),
                        tuple(r["thrust_bounds_n"]), r.get("drag_coeff_m", 0.016))
                  for r in d["rotors"]]
        return cls(tuple(rotors), float(d["mass_kg"]), d.get("name", "config"))


@dataclass(frozen=True, eq=False)
class Wrench:
    force_n: np.ndarray
    torque_nm: np.ndarray

    def as_vector(self) -> np.ndarray:
        return np.r_[self.force_n, self.torque_nm]


@dataclass(frozen=True)
class CapabilityReport:
    name: str
    static_hover: bool
    omnidirectional_hover: bool
    worst_margin: float  # 1 - max normalized thrust over samples; nan if any sample is infeasible
    per_rotor_failure_hover: tuple = field(default=())
    mean_efficiency: float = math.nan
    samples: int = 0
    max_residual: float = 0.0  # largest ||A f - w|| over every solution found


def thrust_direction(r: Rotor) -> np.ndarray:
    """Body-frame thrust axis: body z rotated about ``tilt_axis`` by ``tilt_angle_rad``."""
    return geo.Rotation.from_axis_angle(r.tilt_axis, r.tilt_angle_rad).apply(geo.WORLD_Z)


def allocation_matrix(c: RotorConfig) -> np.ndarray:
    cols = []
    for r in c.rotors:
        u = thrust_direction(r)
        cols.append(np.r_[u, np.cross(r.position_m, u) + r.spin * r.drag_coeff_m * u])
    return np.array(cols).T


def wrench(c: RotorConfig, f) -> Wrench:
    v = allocation_matrix(c) @ np.asarray(f, dtype=float)
    return Wrench(v[:3], v[3:])


def hover_wrench(c: RotorConfig, orientation: geo.Rotation) -> np.ndarray:
    """Body wrench that balances gravity at ``orientation`` (no net torque)."""
    weight = np.array([0.0, 0.0, c.mass_kg * geo.GRAVITY])
    return np.r_[orientation.matrix.T @ weight, np.zeros(3)]


def _solve_hover(a: np.ndarray, w: np.ndarray, bounds) -> np.ndarray | None:
    n = a.shape[1]
    scale = np.array([max(abs(lo), abs(hi)) for lo, hi in bounds])
    active = scale > 0.0
    # Variables [f_1..f_n, t]; minimize t with |f_i| / scale_i <= t for live rotors.
    cost = np.r_[np.zeros(n), 1.0]
    rows = []
    for i in np.flatnonzero(active):
        e = np.zeros(n + 1)
        e[i], e[n] = 1.0 / scale[i], -1.0
        rows.append(e)
        e = e.copy()
        e[i] = -1.0 / scale[i]
        rows.append(e)
    res = linprog(cost, A_ub=np.array(rows), b_ub=np.zeros(len(rows)),
                  A_eq=np.c_[a, np.zeros(6)], b_eq=w,
                  bounds=list(bounds) + [(0.0, None)], method="highs")
    if res.status != 0:
        return None
    f = res.x[:n]
    # One minimum-norm correction step removes solver round-off from the equality.
    f = f + np.linalg.pinv(a) @ (w - a @ f)
    f = np.clip(f, [b[0] for b in bounds], [b[1] for b in bounds])
    if np.linalg.norm(a @ f - w) > WRENCH_TOL:
        return None
    return f


def hover_thrusts(c: RotorConfig, orientation: geo.Rotation | None = None) -> np.ndarray | None:
    """Thrusts that hold ``orientation`` at rest, or ``None`` when no bounded solution exists.

    Among all solutions the one with the smallest peak normalized thrust is
    returned.
    """
    orientation = orientation or geo.Rotation.identity()
    return _solve_hover(allocation_matrix(c), hover_wrench(c, orientation),
                        [r.thrust_bounds_n for r in c.rotors])


def load_factor(c: RotorConfig, f) -> float:
    """``max |f_i| / f_max_i`` over live rotors (1 means some rotor saturates)."""
    return max(abs(fi) / r.thrust_scale for fi, r in zip(f, c.rotors) if r.thrust_scale > 0)


def efficiency(c: RotorConfig, f) -> float:
    """Net thrust magnitude over total absolute thrust; 1 means no internal cancellation."""
    f = np.asarray(f, dtype=float)
    total = float(np.sum(np.abs(f)))
    if total <= 0.0:
        raise ZeroThrust("all rotor thrusts are zero")
    net = allocation_matrix(c)[:3] @ f
    return math.hypot(*net.tolist()) / total  # hypot scales, so tiny thrusts do not underflow


def sample_orientations(n: int, seed: int) -> list:
    return geo.Rotation.random(np.random.default_rng(seed), n)


def classify(c: RotorConfig, orientation_samples: int = 100, seed: int = 0) -> CapabilityReport:
    """Static-hover capabilities of ``c``.

    ``omnidirectional_hover`` requires feasibility at every one of the seeded
    uniform random orientations. Failure robustness is checked at the identity
    orientation with each rotor disabled in turn. The mean efficiency averages
    the identity solution and every feasible random sample.
    """
    if orientation_samples < 10:
        raise DomainError("classify needs at least 10 orientation samples")
    a = allocation_matrix(c)
    residuals = [0.0]

    def solve(cfg, mat, rot):
        w = hover_wrench(cfg, rot)
        f = _solve_hover(mat, w, [r.thrust_bounds_n for r in cfg.rotors])
        if f is not None:
            residuals.append(float(np.linalg.norm(mat @ f - w)))
        return f

    f0 = solve(c, a, geo.Rotation.identity())
    effs = [] if f0 is None else [efficiency(c, f0)]
    margins = []
    for rot in sample_orientations(orientation_samples, seed):
        f = solve(c, a, rot)
        if f is None:
            margins.append(math.nan)
            continue
        margins.append(float(1.0 - load_factor(c, f)))
        effs.append(efficiency(c, f))
    omni = not any(math.isnan(m) for m in margins)
    failures = []
    for i in range(len(c.rotors)):
        cf = c.with_failed(i)
        failures.append(solve(cf, a, geo.Rotation.identity()) is not None)
    return CapabilityReport(
        name=c.name,
        static_hover=f0 is not None,
        omnidirectional_hover=omni and f0 is not None,
        worst_margin=min(margins) if omni else math.nan,
        per_rotor_failure_hover=tuple(failures),
        mean_efficiency=float(np.mean(effs)) if effs else math.nan,
        samples=orientation_samples,
        max_residual=max(residuals),
    )


@dataclass(frozen=True)
class TiltSweepResult:
    best_alpha_rad: float | None
    alphas_rad: tuple
    margins: tuple  # worst-case margin per alpha; nan where some orientation is infeasible


def tilt_sweep(template, alpha_range, steps: int, orientation_samples: int = 100,
               seed: int = 0) -> TiltSweepResult:
    """Worst-case hover margin as a function of the common tilt angle.

    ``template`` maps a tilt angle (rad) to a :class:`RotorConfig`. The same
    seeded orientation set is used for every angle. Ties for the best angle
    go to the smaller angle.
    """
    if steps < 2:
        raise DomainError("tilt_sweep needs at least 2 steps")
    alphas = np.linspace(alpha_range[0], alpha_range[1], steps)
    rots = sample_orientations(orientation_samples, seed)
    margins = []
    for alpha in alphas:
        c = template(float(alpha))
        a = allocation_matrix(c)
        bounds = [r.thrust_bounds_n for r in c.rotors]
        worst = math.inf
        for rot in rots:
            f = _solve_hover(a, hover_wrench(c, rot), bounds)
            if f is None:
                worst = math.nan
                break
            worst = min(worst, float(1.0 - load_factor(c, f)))
        margins.append(worst)
    best = None
    for alpha, m in zip(alphas, margins):
        if not math.isnan(m) and (best is None or m > best[1]):
            best = (float(alpha), m)
    return TiltSweepResult(best[0] if best else None, tuple(float(a) for a in alphas), tuple(margins))


# Reference airframes. Numbers are fixtures, not measured vehicles.

def planar_quad(arm_m=0.2, mass_kg=1.0, f_max_n=5.0, drag_coeff_m=0.016, name="planar_quad") -> RotorConfig:
    """Plus-configuration quadrotor with fixed, upward, uni-directional rotors."""
    pts = [(arm_m, 0.0, 0.0), (0.0, arm_m, 0.0), (-arm_m, 0.0, 0.0), (0.0, -arm_m, 0.0)]
    spins = (1, -1, 1, -1)
    rotors = [Rotor(p, geo.WORLD_X, 0.0, s, (0.0, f_max_n), drag_coeff_m) for p, s in zip(pts, spins)]
    return RotorConfig(tuple(rotors), mass_kg, name)


def omrav_cube(tilt_angle_rad=math.radians(35.0), half_edge_m=0.25, mass_kg=3.5, f_max_n=20.0,
               drag_coeff_m=0.016, name="omrav_cube") -> RotorConfig:
    """Eight bi-directional tilting rotors on the vertices of a cube.

    Each rotor tilts about the horizontal radial direction of its vertex, with
    the sense flipped between the upper and lower layer, so every rotor has
    its own tilt axis. Spin directions alternate as ``sign(x y z)``.
    """
    rotors = []
    for sx in (1.0, -1.0):
        for sy in (1.0, -1.0):
            for sz in (1.0, -1.0):
                rotors.append(Rotor(
                    (sx * half_edge_m, sy * half_edge_m, sz * half_edge_m),
                    (sx * sz, sy * sz, 0.0), tilt_angle_rad, int(sx * sy * sz),
                    (-f_max_n, f_max_n), drag_coeff_m))
    return RotorConfig(tuple(rotors), mass_kg, name)
