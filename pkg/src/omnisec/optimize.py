"""Derivative-free maximization of the scenario objectives.

Everything here maximizes a scalar ``objective(x)`` over a box-shaped
:class:`SearchSpace` in a flat parameter vector. Antenna axes are encoded as
``(polar, azimuth)``; for patterns symmetric under ``theta -> pi - theta`` the
polar angle is restricted to the upper hemisphere.

Scenario-level entry points are :func:`optimize_scenario_a` and
:func:`optimize_scenario_b`.
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import netscene as ns
from .errors import BudgetExceeded, DomainError

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizerParams:
    grid_resolution: int = 11
    axis_samples: int = 64
    starts: int = 8
    step_init_m: float = 25.0
    step_init_rad: float = 0.5
    step_init_power: float = 0.25
    step_tol_m: float = 1e-7
    step_tol_rad: float = 1e-9
    step_tol_power: float = 1e-6
    max_evals: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.grid_resolution < 3:
            raise DomainError("grid_resolution must be >= 3")
        if self.axis_samples < 1 or self.starts < 1:
            raise DomainError("axis_samples and starts must be >= 1")
        for name in ("step_init_m", "step_init_rad", "step_init_power",
                     "step_tol_m", "step_tol_rad", "step_tol_power"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if self.max_evals <= 0:
            raise DomainError("max_evals must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be an unsigned 64-bit integer")


class DimKind(str, enum.Enum):
    LENGTH = "length"
    ANGLE = "angle"
    POWER = "power"  # steps are fractions of the dimension's width


@dataclass(frozen=True, eq=False)
class SearchSpace:
    lower: np.ndarray
    upper: np.ndarray
    kinds: tuple
    names: tuple = ()

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1 or len(self.kinds) != lo.size:
            raise DomainError("inconsistent search space dimensions")
        if np.any(hi < lo):
            raise DomainError("empty search space")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "kinds", tuple(DimKind(k) for k in self.kinds))

    @property
    def ndim(self) -> int:
        return self.lower.size

    def __add__(self, other: SearchSpace) -> SearchSpace:
        return SearchSpace(np.r_[self.lower, other.lower], np.r_[self.upper, other.upper],
                           self.kinds + other.kinds, self.names + other.names)

    def contains(self, x, tol=1e-9) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))

    def clip(self, x) -> np.ndarray:
        return np.minimum(np.maximum(x, self.lower), self.upper)

    def uniform(self, rng: np.random.Generator) -> np.ndarray:
        return self.lower + rng.random(self.ndim) * (self.upper - self.lower)

    def steps(self, params: OptimizerParams) -> tuple[np.ndarray, np.ndarray]:
        width = self.upper - self.lower
        init, tol = [], []
        for k, w in zip(self.kinds, width):
            if k is DimKind.LENGTH:
                init.append(params.step_init_m), tol.append(params.step_tol_m)
            elif k is DimKind.ANGLE:
                init.append(params.step_init_rad), tol.append(params.step_tol_rad)
            else:
                init.append(params.step_init_power * w), tol.append(params.step_tol_power * w)
        return np.array(init), np.array(tol)


def position_space(box: ns.Box, prefix="") -> SearchSpace:
    return SearchSpace(box.lo, box.hi, (DimKind.LENGTH,) * 3,
                       tuple(prefix + c for c in ("x", "y", "z")))


def axis_space(symmetric: bool, prefix="") -> SearchSpace:
    """Spherical ``(polar, azimuth)``; upper hemisphere when the pattern is symmetric."""
    return SearchSpace([0.0, 0.0], [0.5 * math.pi if symmetric else math.pi, 2.0 * math.pi],
                       (DimKind.ANGLE,) * 2, (prefix + "polar", prefix + "azimuth"))


def power_space(p_max_w: float, names=("p",)) -> SearchSpace:
    n = len(names)
    return SearchSpace([0.0] * n, [p_max_w] * n, (DimKind.POWER,) * n, tuple(names))


def axis_to_spherical(axis, symmetric: bool) -> tuple[float, float]:
    x, y, z = axis
    if symmetric and z < 0:
        x, y, z = -x, -y, -z
    polar = math.acos(max(-1.0, min(1.0, z)))
    az = math.atan2(y, x)
    if az < 0:
        az += 2.0 * math.pi
    return polar, min(az, 2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class SearchResult:
    x: np.ndarray
    value: float
    evaluations: int
    budget_exhausted: bool = False
    start_index: int = 0
    trace: tuple = field(default=(), repr=False)


def _safe(objective):
    def f(x):
        v = objective(x)
        return -math.inf if math.isnan(v) else v
    return f


def grid_search(objective, blocks, max_evals: int = 200_000) -> SearchResult:
    """Exhaustive maximization over the Cartesian product of candidate blocks.

    ``blocks`` is a sequence of 2-D arrays; each row of a block is a candidate
    sub-vector and a full candidate concatenates one row from every block,
    iterated in ``itertools.product`` order. Ties keep the first candidate.
    """
    blocks = [np.atleast_2d(np.asarray(b, dtype=float)) for b in blocks]
    total = math.prod(len(b) for b in blocks)
    if total > max_evals:
        raise BudgetExceeded(f"grid has {total} points, budget is {max_evals}")
    f = _safe(objective)
    best_x, best_v = None, -math.inf
    for rows in itertools.product(*blocks):
        x = np.concatenate(rows)
        v = f(x)
        if best_x is None or v > best_v:
            best_x, best_v = x, v
    return SearchResult(best_x, best_v, total)


def box_grid(lower, upper, resolution: int) -> np.ndarray:
    axes = [np.linspace(l, h, resolution) for l, h in zip(lower, upper)]
    return np.array(list(itertools.product(*axes)))


def hemisphere_axes(n: int) -> np.ndarray:
    """``n`` near-uniform ``(polar, azimuth)`` directions on the upper hemisphere.

    Golden-angle spiral, equal-area in ``cos(polar)``; the first direction is
    the zenith.
    """
    k = np.arange(n)
    z = 1.0 - k / n
    polar = np.arccos(z)
    az = np.mod(k * math.pi * (3.0 - math.sqrt(5.0)), 2.0 * math.pi)
    return np.column_stack([polar, az])


class _OutOfBudget(Exception):
    pass


def pattern_search(objective, start, space: SearchSpace, params: OptimizerParams,
                   max_evals: int | None = None) -> SearchResult:
    """Hooke-Jeeves pattern search with step halving.

    An exploratory sweep polls ``+step_i`` then ``-step_i`` along every
    coordinate, keeping each strict improvement. After a successful sweep a
    pattern move extrapolates along the last displacement and explores from
    there; the base point is replaced only on strict improvement, so the
    incumbent never decreases. A failed sweep halves every step. Stops once
    every step is below its tolerance, or when the evaluation budget is spent
    (``budget_exhausted``; the incumbent is still returned).
    """
    budget = params.max_evals if max_evals is None else max_evals
    f = _safe(objective)
    x0 = np.asarray(start, dtype=float)
    if not np.array_equal(space.clip(x0), x0):
        raise DomainError("start point lies outside the search space")
    lo, hi = space.lower, space.upper
    step, tol = space.steps(params)
    evals = 0

    def ev(y):
        nonlocal evals
        if evals >= budget:
            raise _OutOfBudget
        evals += 1
        return f(y)

    def explore(y, fy):
        for i in range(space.ndim):
            for sign in (1.0, -1.0):
                t = min(max(y[i] + sign * step[i], lo[i]), hi[i])
                if t == y[i]:
                    continue
                z = y.copy()
                z[i] = t
                fz = ev(z)
                if fz > fy:
                    y, fy = z, fz
                    break
        return y, fy

    base, fb = x0, ev(x0)
    trace = [fb]
    exhausted = False
    try:
        while np.any(step >= tol):
            x, fx = explore(base, fb)
            if fx > fb:
                while fx > fb:
                    prev, base, fb = base, x, fx
                    trace.append(fb)
                    xp = space.clip(2.0 * base - prev)
                    x, fx = explore(xp, ev(xp))
            else:
                step = step * 0.5
    except _OutOfBudget:
        exhausted = True
    return SearchResult(base, fb, evals, exhausted, 0, tuple(trace))


def multi_start(objective, space: SearchSpace, params: OptimizerParams,
                extra_starts=()) -> SearchResult:
    """Pattern search from ``params.starts`` seeded uniform starts, plus any ``extra_starts``.

    The evaluation budget is split evenly across starts. The best result wins;
    ties go to the lower start index, so the outcome does not depend on the
    order in which starts are run.
    """
    rng = np.random.default_rng(params.seed)
    starts = [space.uniform(rng) for _ in range(params.starts)]
    starts += [space.clip(np.asarray(s, dtype=float)) for s in extra_starts]
    per_start = max(1, params.max_evals // len(starts))
    best, evals, exhausted = None, 0, False
    for idx, s in enumerate(starts):
        r = pattern_search(objective, s, space, params, max_evals=per_start)
        evals += r.evaluations
        exhausted |= r.budget_exhausted
        if best is None or r.value > best.value:
            best = SearchResult(r.x, r.value, 0, r.budget_exhausted, idx)
    return SearchResult(best.x, best.value, evals, exhausted, best.start_index)


def golden_section_max(f, lo: float, hi: float, iters: int = 80) -> tuple[float, float]:
    """Golden-section maximization of a unimodal ``f`` on ``[lo, hi]``.

    The endpoints are also evaluated and the best of the three candidates is
    returned, so monotone objectives land exactly on the boundary.
    """
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    cands = [(f(hi), hi), (f(lo), lo), (fc, c) if fc >= fd else (fd, d)]
    best = max(cands, key=lambda t: t[0])
    return best[1], best[0]


# Scenario A

def _scenario_a_problem(s: ns.ScenarioA, strategy: ns.Strategy):
    pos_space = position_space(s.search_box)
    if strategy is ns.Strategy.OPTIMUM_POSE:
        space = pos_space + axis_space(s.uav_pattern.symmetric)

        def decode(x):
            return (float(x[0]), float(x[1]), float(x[2])), geo._spherical_axis(x[3], x[4])
    else:
        rule = ns.RULE_AXES[strategy]

        def decode(x):
            pos = (float(x[0]), float(x[1]), float(x[2]))
            return pos, rule(s, pos)
        space = pos_space

    def objective(x):
        pos, axis = decode(x)
        return ns._min_sinr_db(s, pos, axis)

    return space, decode, objective


def encode_pose_a(s: ns.ScenarioA, strategy: ns.Strategy, pose: geo.Pose) -> np.ndarray:
    """Parameter vector of ``pose`` in the search space of ``strategy``."""
    x = list(pose.position)
    if strategy is ns.Strategy.OPTIMUM_POSE:
        x += axis_to_spherical(tuple(pose.antenna_axis.tolist()), s.uav_pattern.symmetric)
    return np.array(x)


def optimize_scenario_a(s: ns.ScenarioA, strategy: ns.Strategy, params: OptimizerParams,
                        warm_starts=()) -> ns.StrategyOutcome:
    """Best pose for one strategy.

    ``OPTIMUM_POSE`` searches position and axis jointly; the other strategies
    search position only and take the axis from their closed-form rule.
    ``warm_starts`` are extra poses (e.g. other strategies' optima) added to
    the seeded starts.
    """
    strategy = ns.Strategy(strategy)
    space, decode, objective = _scenario_a_problem(s, strategy)
    extra = [encode_pose_a(s, strategy, p) for p in warm_starts]
    r = multi_start(objective, space, params, extra)
    return _outcome_a(s, strategy, space, decode, r)


def _outcome_a(s, strategy, space, decode, r: SearchResult) -> ns.StrategyOutcome:
    assert space.contains(r.x)
    pos, axis = decode(r.x)
    pose = geo.Pose(np.array(pos), geo.Rotation.from_antenna_axis(axis))
    return ns.StrategyOutcome(strategy.value, (pose,), (), r.value, r.evaluations,
                              r.budget_exhausted)


def grid_scenario_a(s: ns.ScenarioA, strategy: ns.Strategy, params: OptimizerParams) -> ns.StrategyOutcome:
    """Brute-force oracle: ``resolution**3`` positions (x ``axis_samples`` axes for OPTIMUM_POSE)."""
    strategy = ns.Strategy(strategy)
    space, decode, objective = _scenario_a_problem(s, strategy)
    blocks = [box_grid(s.search_box.lo, s.search_box.hi, params.grid_resolution)]
    if strategy is ns.Strategy.OPTIMUM_POSE:
        blocks.append(hemisphere_axes(params.axis_samples))
    r = grid_search(objective, blocks, params.max_evals)
    return _outcome_a(s, strategy, space, decode, r)


def run_scenario_a(s: ns.ScenarioA, params: OptimizerParams) -> dict:
    """All four strategies on one instance, keyed by :class:`Strategy`.

    The rule-based strategies run first; their optima seed the joint search.
    """
    out = {}
    for strategy in (ns.Strategy.MAX_GAIN, ns.Strategy.ZERO_INTERFERENCE, ns.Strategy.VERTICAL_FIXED):
        out[strategy] = optimize_scenario_a(s, strategy, params)
    out[ns.Strategy.OPTIMUM_POSE] = optimize_scenario_a(
        s, ns.Strategy.OPTIMUM_POSE, params, [o.poses[0] for o in out.values()])
    return {k: out[k] for k in ns.Strategy}


# Scenario B

class MethodB(str, enum.Enum):
    PROPOSED = "proposed"
    JOINT_LOCAL = "joint_local"
    FIXED_VERTICAL = "fixed_vertical"


NADIR = (0.0, 0.0, -1.0)


def _outcome_b(label, s, comm_pos, comm_axis, jam_pos, jam_axis, p_comm, p_jam, value, evals,
               exhausted) -> ns.StrategyOutcome:
    poses = (geo.Pose(np.array(comm_pos), geo.Rotation.from_antenna_axis(comm_axis)),
             geo.Pose(np.array(jam_pos), geo.Rotation.from_antenna_axis(jam_axis)))
    return ns.StrategyOutcome(label, poses, (float(p_comm), float(p_jam)), value, evals, exhausted)


def _power_ascent(f, p_comm, p_jam, p_max, tol=1e-6, max_cycles=50):
    """Cyclic coordinate ascent over the two powers; returns ``(p_comm, p_jam, value, evals)``."""
    evals = 0

    def counted(g):
        def h(p):
            nonlocal evals
            evals += 1
            return g(p)
        return h

    value = f(p_comm, p_jam)
    evals += 1
    for _ in range(max_cycles):
        before = value
        pc, vc = golden_section_max(counted(lambda p: f(p, p_jam)), 0.0, p_max)
        if vc > value:
            p_comm, value = pc, vc
        pj, vj = golden_section_max(counted(lambda p: f(p_comm, p)), 0.0, p_max)
        if vj > value:
            p_jam, value = pj, vj
        if value - before < tol:
            break
    return p_comm, p_jam, value, evals


def optimize_scenario_b(s: ns.ScenarioB, method: MethodB, params: OptimizerParams) -> ns.StrategyOutcome:
    """Maximize the secrecy rate with one of three methods.

    ``proposed``: orientations from :func:`netscene.proposed_orientation_rule`;
    multi-start over both positions at full power, then golden-section power
    ascent. ``joint_local``: one pattern search over positions, axes and powers
    together from a single seeded start (stand-in for a generic local NLP
    solver). ``fixed_vertical``: dipole jammer upright, lobe facing nadir;
    positions and powers searched by multi-start.
    """
    method = MethodB(method)
    pm = s.p_max_w
    comm_sp = position_space(s.comm_box, "comm_")
    jam_sp = position_space(s.jam_box, "jam_")

    def pos(x, i):
        return (float(x[i]), float(x[i + 1]), float(x[i + 2]))

    if method is MethodB.PROPOSED:
        space = comm_sp + jam_sp

        def objective(x):
            c, j = pos(x, 0), pos(x, 3)
            ca, ja = ns._proposed_axes(s, c, j)
            return ns._secrecy(s, c, ca, j, ja, pm, pm)

        r = multi_start(objective, space, params)
        c, j = pos(r.x, 0), pos(r.x, 3)
        ca, ja = ns._proposed_axes(s, c, j)
        p_comm, p_jam, value, extra = _power_ascent(
            lambda pc, pj: ns._secrecy(s, c, ca, j, ja, pc, pj), pm, pm, pm)
        return _outcome_b(method.value, s, c, ca, j, ja, p_comm, p_jam, value,
                          r.evaluations + extra, r.budget_exhausted)

    if method is MethodB.JOINT_LOCAL:
        space = (comm_sp + axis_space(s.comm_pattern.symmetric, "comm_") + jam_sp
                 + axis_space(s.jam_pattern.symmetric, "jam_") + power_space(pm, ("p_comm", "p_jam")))

        def decode(x):
            return (pos(x, 0), geo._spherical_axis(x[3], x[4]), pos(x, 5),
                    geo._spherical_axis(x[8], x[9]), float(x[10]), float(x[11]))

        def objective(x):
            return ns._secrecy(s, *decode(x))

        start = space.uniform(np.random.default_rng(params.seed))
        r = pattern_search(objective, start, space, params)
        c, ca, j, ja, p_comm, p_jam = decode(r.x)
        return _outcome_b(method.value, s, c, ca, j, ja, p_comm, p_jam, r.value, r.evaluations,
                          r.budget_exhausted)

    space = comm_sp + jam_sp + power_space(pm, ("p_comm", "p_jam"))

    def objective(x):
        return ns._secrecy(s, pos(x, 0), NADIR, pos(x, 3), geo.WORLD_Z, float(x[6]), float(x[7]))

    r = multi_start(objective, space, params)
    return _outcome_b(method.value, s, pos(r.x, 0), NADIR, pos(r.x, 3), geo.WORLD_Z,
                      float(r.x[6]), float(r.x[7]), r.value, r.evaluations, r.budget_exhausted)
