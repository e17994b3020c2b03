"""Network scenarios, closed-form orientation rules and objectives.

Scenario A: two ground users send uplink traffic to one UAV while a ground
jammer transmits; the objective is the smaller of the two uplink SINRs (dB).
Users are assumed orthogonal (no mutual interference).

Scenario B: a communicating UAV serves one ground user while a second UAV
jams the eavesdroppers; the objective is the secrecy rate (bits/s/Hz) against
the strongest eavesdropper (no collusion).

Ground nodes use isotropic antennas.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

from . import geometry as geo
from .antenna import RadiationPattern
from .channel import RadioParams, _rx_power, dbm_to_w, secrecy_rate
from .errors import DomainError, OutOfBox, PowerOutOfRange

ISOTROPIC = RadiationPattern.isotropic()
BOX_TOL = 1e-9


class Role(str, enum.Enum):
    USER = "user"
    JAMMER = "jammer"
    EAVESDROPPER = "eavesdropper"


@dataclass(frozen=True)
class GroundNode:
    position: tuple
    role: Role = Role.USER
    tx_power_w: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(geo.as_vec3(self.position).tolist()))
        object.__setattr__(self, "role", Role(self.role))
        if not self.tx_power_w >= 0:
            raise DomainError("node power must be non-negative")


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``lo <= p <= hi`` (meters)."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(geo.as_vec3(self.lo).tolist())
        hi = tuple(geo.as_vec3(self.hi).tolist())
        if any(h <= l for l, h in zip(lo, hi)):
            raise DomainError(f"degenerate box {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, p, tol=BOX_TOL) -> bool:
        return all(l - tol <= c <= h + tol for c, l, h in zip(p, self.lo, self.hi))


def _check_in_box(box: Box, p, what: str):
    if not box.contains(p):
        raise OutOfBox(f"{what} position {tuple(p)} outside {box.lo} .. {box.hi}")


@dataclass(frozen=True)
class ScenarioA:
    users: tuple
    jammer: GroundNode
    uav_pattern: RadiationPattern = field(default_factory=RadiationPattern.half_wave_dipole)
    search_box: Box = field(default_factory=lambda: Box((-100.0, -100.0, 10.0), (100.0, 100.0, 120.0)))
    radio: RadioParams = field(default_factory=RadioParams)

    def __post_init__(self):
        users = tuple(self.users)
        if len(users) != 2:
            raise DomainError("scenario A needs exactly two users")
        if users[0].position == users[1].position:
            raise DomainError("users must be distinct")
        if not self.search_box.lo[2] > 0:
            raise DomainError("minimum altitude must be positive")
        object.__setattr__(self, "users", users)

    @property
    def altitude_bounds(self) -> tuple:
        return (self.search_box.lo[2], self.search_box.hi[2])

    def with_jammer_power(self, power_w: float) -> ScenarioA:
        return replace(self, jammer=replace(self.jammer, tx_power_w=power_w))


@dataclass(frozen=True)
class ScenarioB:
    legit_user: GroundNode
    eavesdroppers: tuple
    comm_pattern: RadiationPattern = field(
        default_factory=lambda: RadiationPattern.axial_lobe(q=4.0, backlobe_floor=0.01))
    jam_pattern: RadiationPattern = field(default_factory=RadiationPattern.half_wave_dipole)
    comm_box: Box = field(default_factory=lambda: Box((-100.0, -100.0, 20.0), (100.0, 100.0, 100.0)))
    jam_box: Box = field(default_factory=lambda: Box((-100.0, -100.0, 20.0), (100.0, 100.0, 100.0)))
    p_max_w: float = 0.1
    radio: RadioParams = field(default_factory=RadioParams)

    def __post_init__(self):
        eaves = tuple(self.eavesdroppers)
        if not eaves:
            raise DomainError("scenario B needs at least one eavesdropper")
        if any(e.position == self.legit_user.position for e in eaves):
            raise DomainError("eavesdroppers must be distinct from the legitimate user")
        if not self.p_max_w > 0:
            raise DomainError("p_max_w must be positive")
        object.__setattr__(self, "eavesdroppers", eaves)

    def with_p_max(self, p_max_w: float) -> ScenarioB:
        return replace(self, p_max_w=p_max_w)


class Strategy(str, enum.Enum):
    OPTIMUM_POSE = "optimum_pose"
    MAX_GAIN = "max_gain"
    ZERO_INTERFERENCE = "zero_interference"
    VERTICAL_FIXED = "vertical_fixed"


@dataclass(frozen=True, eq=False)
class StrategyOutcome:
    """Optimized poses/powers of one strategy on one scenario instance.

    ``objective`` is dB (min-SINR) for scenario A and bits/s/Hz for B.
    """

    label: str
    poses: tuple
    powers_w: tuple
    objective: float
    evaluations: int
    budget_exhausted: bool = False


# Scenario A

def _min_sinr_db(s: ScenarioA, pos, axis) -> float:
    radio = s.radio
    jam = s.jammer
    interference = _rx_power(jam.position, ISOTROPIC, geo.WORLD_Z, pos, s.uav_pattern, axis,
                             jam.tx_power_w, radio)
    worst = math.inf
    for u in s.users:
        sig = _rx_power(u.position, ISOTROPIC, geo.WORLD_Z, pos, s.uav_pattern, axis,
                        u.tx_power_w, radio)
        worst = min(worst, sig / (radio.noise_power_w + interference))
    return 10.0 * math.log10(worst) if worst > 0.0 else -math.inf


def min_sinr_objective(s: ScenarioA, pose: geo.Pose) -> float:
    """Minimum uplink SINR over both users, in dB."""
    pos = tuple(pose.position.tolist())
    _check_in_box(s.search_box, pos, "UAV")
    return _min_sinr_db(s, pos, tuple(pose.antenna_axis.tolist()))


def _canonical_sign(a):
    # Positive z; ties broken toward +x, then +y.
    for c in (a[2], a[0], a[1]):
        if abs(c) > 1e-12:
            return a if c > 0 else (-a[0], -a[1], -a[2])
    return a


def _max_gain_axis(s: ScenarioA, pos):
    d1, _ = geo._link(pos, s.users[0].position)
    d2, _ = geo._link(pos, s.users[1].position)
    n = geo._cross(d1, d2)
    if geo._norm(n) > 1e-12:
        return _canonical_sign(geo._unit(n))
    # Collinear users: any axis normal to d1, preferring world z, then world x.
    for ref in (geo.WORLD_Z, geo.WORLD_X):
        v = geo._sub(ref, tuple(geo._dot(ref, d1) * c for c in d1))
        if geo._norm(v) > 1e-6:
            return _canonical_sign(geo._unit(v))
    raise AssertionError("unreachable: d1 cannot be parallel to both world z and world x")


def _zero_interference_axis(s: ScenarioA, pos):
    return geo._link(pos, s.jammer.position)[0]


def orient_max_gain(s: ScenarioA, position) -> geo.Rotation:
    """Antenna axis normal to both user links, so each user sits at theta = pi/2."""
    return geo.Rotation.from_antenna_axis(_max_gain_axis(s, tuple(geo.as_vec3(position).tolist())))


def orient_zero_interference(s: ScenarioA, position) -> geo.Rotation:
    """Antenna axis (the dipole null) pointed straight at the jammer."""
    return geo.Rotation.from_antenna_axis(
        _zero_interference_axis(s, tuple(geo.as_vec3(position).tolist())))


def orient_vertical() -> geo.Rotation:
    return geo.Rotation.identity()


RULE_AXES = {
    Strategy.MAX_GAIN: _max_gain_axis,
    Strategy.ZERO_INTERFERENCE: _zero_interference_axis,
    Strategy.VERTICAL_FIXED: lambda s, pos: geo.WORLD_Z,
}


def reevaluate_a(s: ScenarioA, outcome: StrategyOutcome) -> float:
    return min_sinr_objective(s, outcome.poses[0])


# Scenario B

def _secrecy(s: ScenarioB, comm_pos, comm_axis, jam_pos, jam_axis, p_comm, p_jam) -> float:
    radio = s.radio
    noise = radio.noise_power_w

    def snr_at(node):
        sig = _rx_power(comm_pos, s.comm_pattern, comm_axis, node.position, ISOTROPIC,
                        geo.WORLD_Z, p_comm, radio)
        jam = _rx_power(jam_pos, s.jam_pattern, jam_axis, node.position, ISOTROPIC,
                        geo.WORLD_Z, p_jam, radio)
        return sig / (noise + jam)

    return secrecy_rate(snr_at(s.legit_user), [snr_at(e) for e in s.eavesdroppers])


def _check_power(p, p_max, what):
    if not 0.0 <= p <= p_max * (1.0 + 1e-12):
        raise PowerOutOfRange(f"{what} power {p!r} W outside [0, {p_max!r}]")


def secrecy_objective(s: ScenarioB, comm_pose: geo.Pose, jam_pose: geo.Pose,
                      p_comm_w: float, p_jam_w: float) -> float:
    """Secrecy rate of the legitimate downlink in bits/s/Hz."""
    comm_pos = tuple(comm_pose.position.tolist())
    jam_pos = tuple(jam_pose.position.tolist())
    _check_in_box(s.comm_box, comm_pos, "communicating UAV")
    _check_in_box(s.jam_box, jam_pos, "jamming UAV")
    _check_power(p_comm_w, s.p_max_w, "communication")
    _check_power(p_jam_w, s.p_max_w, "jamming")
    return _secrecy(s, comm_pos, tuple(comm_pose.antenna_axis.tolist()), jam_pos,
                    tuple(jam_pose.antenna_axis.tolist()), p_comm_w, p_jam_w)


def _proposed_axes(s: ScenarioB, comm_pos, jam_pos):
    user = s.legit_user.position
    return geo._link(comm_pos, user)[0], geo._link(jam_pos, user)[0]


def proposed_orientation_rule(s: ScenarioB, comm_pos, jam_pos) -> tuple:
    """``(comm, jam)`` orientations: lobe boresight and dipole null both aimed at the user.

    A pure function of the two positions; roll is fixed by the zero-roll
    convention of :meth:`Rotation.from_antenna_axis`.
    """
    c_axis, j_axis = _proposed_axes(s, tuple(geo.as_vec3(comm_pos).tolist()),
                                    tuple(geo.as_vec3(jam_pos).tolist()))
    return geo.Rotation.from_antenna_axis(c_axis), geo.Rotation.from_antenna_axis(j_axis)


def reevaluate_b(s: ScenarioB, outcome: StrategyOutcome) -> float:
    comm, jam = outcome.poses
    p_comm, p_jam = outcome.powers_w
    return secrecy_objective(s, comm, jam, p_comm, p_jam)


# Fixtures used by tests and the bundled configs.

def scenario_a_fixture(jammer_power_dbm: float = 0.0, user_power_dbm: float = 10.0) -> ScenarioA:
    users = (GroundNode((-50.0, 0.0, 0.0), Role.USER, dbm_to_w(user_power_dbm)),
             GroundNode((50.0, 0.0, 0.0), Role.USER, dbm_to_w(user_power_dbm)))
    jammer = GroundNode((30.0, 60.0, 0.0), Role.JAMMER, dbm_to_w(jammer_power_dbm))
    return ScenarioA(users, jammer)


def scenario_b_fixture(p_max_dbm: float = 20.0) -> ScenarioB:
    user = GroundNode((0.0, 0.0, 0.0), Role.USER)
    eaves = (GroundNode((60.0, 40.0, 0.0), Role.EAVESDROPPER),
             GroundNode((-50.0, 55.0, 0.0), Role.EAVESDROPPER))
    # Each UAV keeps to its own sector, so neither can hover over the user.
    comm_box = Box((-100.0, 20.0, 20.0), (100.0, 100.0, 100.0))
    jam_box = Box((-100.0, -100.0, 20.0), (100.0, -20.0, 100.0))
    return ScenarioB(user, eaves, comm_box=comm_box, jam_box=jam_box, p_max_w=dbm_to_w(p_max_dbm))
