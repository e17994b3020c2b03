"""Axisymmetric radiation patterns.

Gain is linear (not dBi) and depends only on the angle ``theta`` between the
antenna axis (body z) and the direction of interest. All patterns are
lossless: their solid-angle integral is 4*pi.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq
from scipy.special import sici

from . import geometry as geo
from .errors import DomainError

_EULER_GAMMA = 0.5772156649015329


class PatternKind(str, enum.Enum):
    ISOTROPIC = "isotropic"
    SHORT_DIPOLE = "short_dipole"
    HALF_WAVE_DIPOLE = "half_wave_dipole"
    AXIAL_LOBE = "axial_lobe"


def _half_wave_peak() -> float:
    # Directivity of a thin half-wave dipole, 4 / Cin(2 pi).
    x = 2.0 * math.pi
    cin = _EULER_GAMMA + math.log(x) - sici(x)[1]
    return 4.0 / cin


HALF_WAVE_PEAK = _half_wave_peak()


@dataclass(frozen=True)
class RadiationPattern:
    """Parametric pattern.

    ``q`` and ``backlobe_floor`` only apply to :attr:`PatternKind.AXIAL_LOBE`,
    whose boresight is the +axis direction.
    """

    kind: PatternKind = PatternKind.ISOTROPIC
    q: float = 4.0
    backlobe_floor: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PatternKind(self.kind))
        if self.kind is PatternKind.AXIAL_LOBE:
            if not self.q >= 1.0:
                raise DomainError(f"lobe exponent q must be >= 1, got {self.q}")
            if not 0.0 <= self.backlobe_floor < 1.0:
                raise DomainError(f"backlobe_floor must lie in [0, 1), got {self.backlobe_floor}")

    @classmethod
    def isotropic(cls):
        return cls(PatternKind.ISOTROPIC)

    @classmethod
    def short_dipole(cls):
        return cls(PatternKind.SHORT_DIPOLE)

    @classmethod
    def half_wave_dipole(cls):
        return cls(PatternKind.HALF_WAVE_DIPOLE)

    @classmethod
    def axial_lobe(cls, q=4.0, backlobe_floor=0.0):
        return cls(PatternKind.AXIAL_LOBE, float(q), float(backlobe_floor))

    @property
    def symmetric(self) -> bool:
        """True when ``gain(theta) == gain(pi - theta)``, i.e. the axis sign is irrelevant."""
        return self.kind is not PatternKind.AXIAL_LOBE

    @cached_property
    def lobe_peak(self) -> float:
        """Boresight gain ``G0`` of the axial lobe, fixed by lossless normalization."""
        if self.kind is not PatternKind.AXIAL_LOBE:
            raise DomainError("lobe_peak is only defined for axial_lobe patterns")
        q, f = self.q, self.backlobe_floor
        if f == 0.0:
            return 2.0 * (q + 1.0)

        # Integral over mu = cos(theta) in [0, 1] of max(g0 mu^q, f), plus f for the back half.
        def excess(g0):
            mu_c = (f / g0) ** (1.0 / q)
            return f * mu_c + g0 * (1.0 - mu_c ** (q + 1.0)) / (q + 1.0) + f - 2.0

        return brentq(excess, f, 2.0 * (q + 1.0) + 1.0, xtol=1e-15, rtol=1e-15)

    @property
    def peak(self) -> float:
        k = self.kind
        if k is PatternKind.ISOTROPIC:
            return 1.0
        if k is PatternKind.SHORT_DIPOLE:
            return 1.5
        if k is PatternKind.HALF_WAVE_DIPOLE:
            return HALF_WAVE_PEAK
        return self.lobe_peak

    def gain(self, theta: float) -> float:
        if not 0.0 <= theta <= math.pi:
            raise DomainError(f"theta={theta!r} outside [0, pi]")
        k = self.kind
        if k is PatternKind.ISOTROPIC:
            return 1.0
        if k is PatternKind.AXIAL_LOBE:
            if theta > 0.5 * math.pi:
                return self.backlobe_floor
            return max(self.lobe_peak * math.cos(theta) ** self.q, self.backlobe_floor)
        # Fold onto [0, pi/2] so both axial nulls are exactly zero.
        t = min(theta, math.pi - theta)
        if t == 0.0:
            return 0.0
        s = math.sin(t)
        if k is PatternKind.SHORT_DIPOLE:
            return 1.5 * s * s
        # cos((pi/2) cos t) rewritten as sin(pi sin^2(t/2)) to keep precision near the null.
        h = math.sin(0.5 * t)
        r = math.sin(math.pi * h * h) / s
        return HALF_WAVE_PEAK * r * r

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value}
        if self.kind is PatternKind.AXIAL_LOBE:
            d["q"] = self.q
            d["backlobe_floor"] = self.backlobe_floor
        return d


def gain(pattern: RadiationPattern, theta: float) -> float:
    return pattern.gain(theta)


def gain_toward(pattern: RadiationPattern, pose: geo.Pose, target) -> float:
    """Gain of an antenna mounted on ``pose`` in the direction of ``target``."""
    d, _ = geo._link(tuple(pose.position.tolist()), tuple(geo.as_vec3(target).tolist()))
    return pattern.gain(geo._angle(tuple(pose.antenna_axis.tolist()), d))


def solid_angle_integral(pattern: RadiationPattern, panels: int = 1250, order: int = 8) -> float:
    """Integral of gain over the sphere.

    Composite Gauss-Legendre in theta (``panels * order`` nodes, 10^4 by
    default) times 2*pi for the azimuth, which is exact for axisymmetric
    patterns.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, math.pi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    theta = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    g = np.array([pattern.gain(float(t)) for t in theta])
    return float(2.0 * math.pi * np.sum(weights * g * np.sin(theta)))
