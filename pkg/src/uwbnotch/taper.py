"""Exponential impedance taper: profile, small-reflection response, and a
fine-step cascade that checks it numerically."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Cascade, UniformLine, s11_from_abcd

_SINC_LIMIT = 1e-9


@dataclass(frozen=True)
class TaperSpec:
    """Taper from ``z0_ohm`` (source end) to ``zl_ohm`` (load end)."""

    z0_ohm: float
    zl_ohm: float
    length_mm: float
    segments: int = 1024

    def __post_init__(self):
        if not (self.z0_ohm > 0 and self.zl_ohm > 0):
            raise ValueError("taper impedances must be > 0")
        if not self.length_mm > 0:
            raise ValueError("taper length must be > 0")
        if int(self.segments) != self.segments or self.segments < 2:
            raise ValueError("segments must be an integer >= 2")

    @property
    def log_ratio(self) -> float:
        return math.log(self.zl_ohm / self.z0_ohm)

    @classmethod
    def from_exponent_product(cls, z0_ohm: float, a_l: float, length_mm: float, **kw) -> TaperSpec:
        """Build a taper whose exponent times length equals ``a_l``."""
        return cls(z0_ohm, z0_ohm * math.exp(a_l), length_mm, **kw)


@dataclass(frozen=True)
class ReflectionSample:
    beta_l: float
    gamma: complex


def taper_exponent(spec: TaperSpec) -> float:
    """Growth rate of ln Z along the taper, per mm."""
    return spec.log_ratio / spec.length_mm


def impedance_at(z: float, spec: TaperSpec) -> float:
    """Impedance at distance ``z`` mm from the source end."""
    if not 0 <= z <= spec.length_mm:
        raise ValueError(f"z = {z} mm outside [0, {spec.length_mm}]")
    if z == spec.length_mm:
        return spec.zl_ohm
    return spec.z0_ohm * math.exp(taper_exponent(spec) * z)


def analytic_reflection(beta_l, z0: float, zl: float):
    """Small-reflection input reflection of an exponential taper.

    ``beta_l`` is the electrical length of the whole taper in radians and
    may be an array.
    """
    bl = np.asarray(beta_l, float)
    if np.any(bl < 0):
        raise ValueError("beta_l must be >= 0")
    half_log = math.log(zl / z0) / 2
    safe = np.where(bl < _SINC_LIMIT, 1.0, bl)
    sinc = np.where(bl < _SINC_LIMIT, 1.0, np.sin(safe) / safe)
    gamma = half_log * np.exp(-1j * bl) * sinc
    return complex(gamma) if gamma.ndim == 0 else gamma


def taper_network(spec: TaperSpec, phase_velocity: float) -> Cascade:
    """Stair-stepped cascade of ``spec.segments`` uniform lines.

    Each step takes the profile value at its midpoint.
    """
    n = int(spec.segments)
    dz = spec.length_mm / n
    a = taper_exponent(spec)
    return Cascade(
        tuple(UniformLine(spec.z0_ohm * math.exp(a * (k + 0.5) * dz), dz, phase_velocity) for k in range(n))
    )


def numeric_reflection(spec: TaperSpec, f, phase_velocity: float):
    """Reflection of the discretized taper terminated in ``zl``, seen from ``z0``."""
    freqs = np.asarray(f, float)
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be > 0")
    net = taper_network(spec, phase_velocity)
    return s11_from_abcd(net.abcd(freqs), spec.z0_ohm, spec.zl_ohm)


def beta_l(spec: TaperSpec, f, phase_velocity: float):
    """Electrical length in radians at frequency ``f``."""
    return 2 * np.pi * np.asarray(f, float) * spec.length_mm * 1e-3 / phase_velocity


def min_length_for_reflection(
    z0: float, zl: float, gamma_max: float, f_low: float, phase_velocity: float
) -> float:
    """Shortest taper (mm) whose reflection envelope stays below ``gamma_max``
    for every frequency at or above ``f_low``.

    The envelope ``|ln(zl/z0)| / (2 beta l)`` falls monotonically with
    frequency, so only ``f_low`` matters. Returns 0 when the envelope's
    zero-length ceiling ``|ln(zl/z0)|/2`` is already within budget.
    """
    if not gamma_max > 0:
        raise ValueError("gamma_max must be > 0")
    if not f_low > 0:
        raise ValueError("f_low must be > 0")
    half_log = abs(math.log(zl / z0)) / 2
    if gamma_max >= half_log:
        return 0.0
    needed_beta_l = half_log / gamma_max
    beta = 2 * math.pi * f_low / phase_velocity
    return needed_beta_l / beta * 1e3
