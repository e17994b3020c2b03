"""Free-space line-of-sight link budgets, SINR and secrecy rate.

Powers are watts throughout; dB/dBm only appear in the conversion helpers
used at I/O boundaries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import geometry as geo
from .antenna import PatternKind, RadiationPattern
from .errors import BelowMinDistance, DomainError

SPEED_OF_LIGHT = 299_792_458.0


def dbm_to_w(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def w_to_dbm(w: float) -> float:
    return 10.0 * math.log10(w * 1000.0)


def lin_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class RadioParams:
    carrier_hz: float = 2.4e9
    noise_power_w: float = 1e-13
    min_distance_m: float = 1.0

    def __post_init__(self):
        if not self.carrier_hz > 0:
            raise DomainError("carrier_hz must be positive")
        if not self.noise_power_w > 0:
            raise DomainError("noise_power_w must be positive")
        if not self.min_distance_m > 0:
            raise DomainError("min_distance_m must be positive")

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_hz


@dataclass(frozen=True)
class LinkBudget:
    tx_power_w: float
    tx_gain: float
    rx_gain: float
    distance_m: float
    rx_power_w: float


def fspl(distance_m: float, wavelength_m: float, min_distance_m: float = 1.0) -> float:
    """Free-space loss factor ``(lambda / (4 pi d))**2`` (linear, <= 1 beyond lambda/4pi)."""
    if not wavelength_m > 0:
        raise DomainError("wavelength must be positive")
    if distance_m < min_distance_m:
        raise BelowMinDistance(f"link distance {distance_m:g} m below {min_distance_m:g} m")
    r = wavelength_m / (4.0 * math.pi * distance_m)
    return r * r


@dataclass(frozen=True)
class Terminal:
    """A radio end point: position, antenna axis (world frame) and pattern.

    ``axis`` is ignored by isotropic patterns but must still be a unit vector.
    """

    position: tuple
    pattern: RadiationPattern
    axis: tuple = geo.WORLD_Z

    @classmethod
    def from_pose(cls, pose: geo.Pose, pattern: RadiationPattern) -> Terminal:
        return cls(tuple(pose.position.tolist()), pattern, tuple(pose.antenna_axis.tolist()))


def link_budget(tx: Terminal, rx: Terminal, tx_power_w: float, radio: RadioParams) -> LinkBudget:
    d, dist = geo._link(tx.position, rx.position)
    loss = fspl(dist, radio.wavelength_m, radio.min_distance_m)
    g_tx = tx.pattern.gain(geo._angle(tx.axis, d))
    g_rx = rx.pattern.gain(geo._angle(rx.axis, (-d[0], -d[1], -d[2])))
    return LinkBudget(tx_power_w, g_tx, g_rx, dist, tx_power_w * g_tx * g_rx * loss)


def received_power(tx: Terminal, rx: Terminal, tx_power_w: float, radio: RadioParams) -> float:
    return _rx_power(tx.position, tx.pattern, tx.axis, rx.position, rx.pattern, rx.axis,
                     tx_power_w, radio)


def _rx_power(tx_pos, tx_pattern, tx_axis, rx_pos, rx_pattern, rx_axis, p_w, radio):
    # Same arithmetic as link_budget, without building intermediate objects.
    d, dist = geo._link(tx_pos, rx_pos)
    loss = fspl(dist, radio.wavelength_m, radio.min_distance_m)
    g = p_w * loss
    if tx_pattern.kind is not PatternKind.ISOTROPIC:
        g *= tx_pattern.gain(geo._angle(tx_axis, d))
    if rx_pattern.kind is not PatternKind.ISOTROPIC:
        g *= rx_pattern.gain(geo._angle(rx_axis, (-d[0], -d[1], -d[2])))
    return g


def sinr(signal_w: float, interference_w=(), noise_w: float = 1e-13) -> float:
    if not noise_w > 0:
        raise DomainError("noise power must be positive")
    return signal_w / (noise_w + sum(interference_w))


def secrecy_rate(legit_sinr: float, eaves_sinrs=()) -> float:
    """``max(0, log2(1 + legit) - max_e log2(1 + eaves_e))`` in bits/s/Hz."""
    c_legit = math.log2(1.0 + legit_sinr)
    if not eaves_sinrs:
        return c_legit
    return max(0.0, c_legit - math.log2(1.0 + max(eaves_sinrs)))
