"""Substrate description and quasi-static microstrip formulas.

The microstrip impedance uses the Hammerstad-Jensen closed form, including
its strip-thickness correction:

    Hammerstad & Jensen, "Accurate Models for Microstrip Computer-Aided
    Design", MTT-S International Microwave Symposium Digest, 1980.

Two effective permittivities live here and are kept apart on purpose:
:func:`effective_permittivity_simple` is the width-independent average used
for slot sizing and line phase velocities, while the width-dependent value
is private to :func:`microstrip_impedance`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact
FREE_SPACE_IMPEDANCE = 376.730313668  # ohm

# validity range of the closed form, as w/h
MIN_WIDTH_RATIO = 0.1
MAX_WIDTH_RATIO = 10.0


class OutOfRangeError(ValueError):
    """A requested value lies outside the range a formula can deliver."""


@dataclass(frozen=True)
class SubstrateSpec:
    """Dielectric board: permittivity, dielectric height, copper thickness."""

    eps_r: float
    height_mm: float
    metal_thickness_mm: float = 0.0
    loss_tangent: float = 0.0  # stored, not used by the lossless models

    def __post_init__(self):
        if not self.eps_r >= 1.0:
            raise ValueError(f"eps_r must be >= 1, got {self.eps_r}")
        if not self.height_mm > 0:
            raise ValueError(f"height_mm must be > 0, got {self.height_mm}")
        if not self.metal_thickness_mm >= 0:
            raise ValueError(f"metal_thickness_mm must be >= 0, got {self.metal_thickness_mm}")
        if not self.loss_tangent >= 0:
            raise ValueError(f"loss_tangent must be >= 0, got {self.loss_tangent}")

    @classmethod
    def fr4(cls) -> SubstrateSpec:
        """1.6 mm FR-4 (eps_r 4.4) with 3.6 um copper."""
        return cls(eps_r=4.4, height_mm=1.6, metal_thickness_mm=0.0036)


def _check_frequency(f: float) -> None:
    if not f > 0:
        raise ValueError(f"frequency must be > 0 Hz, got {f}")


def effective_permittivity_simple(eps_r: float) -> float:
    """Width-independent effective permittivity, ``(eps_r + 1) / 2``."""
    if not eps_r >= 1.0:
        raise ValueError(f"eps_r must be >= 1, got {eps_r}")
    return (eps_r + 1.0) / 2.0


def phase_velocity(eps_eff: float) -> float:
    """Phase velocity in m/s for a medium of effective permittivity ``eps_eff``."""
    if not eps_eff >= 1.0:
        raise ValueError(f"eps_eff must be >= 1, got {eps_eff}")
    return SPEED_OF_LIGHT / math.sqrt(eps_eff)


def guided_wavelength(f: float, eps_eff: float) -> float:
    """Guided wavelength in mm at frequency ``f`` (Hz)."""
    _check_frequency(f)
    return phase_velocity(eps_eff) / f * 1e3


# -- Hammerstad-Jensen ---------------------------------------------------------

def _z01(u: float) -> float:
    # air-filled impedance of a zero-thickness strip, u = w/h
    f = 6.0 + (2.0 * math.pi - 6.0) * math.exp(-((30.666 / u) ** 0.7528))
    return FREE_SPACE_IMPEDANCE / (2.0 * math.pi) * math.log(f / u + math.sqrt(1.0 + 4.0 / u**2))


def _eps_eff_zero_thickness(u: float, eps_r: float) -> float:
    a = (
        1.0
        + math.log((u**4 + (u / 52.0) ** 2) / (u**4 + 0.432)) / 49.0
        + math.log(1.0 + (u / 18.1) ** 3) / 18.7
    )
    b = 0.564 * ((eps_r - 0.9) / (eps_r + 3.0)) ** 0.053
    return (eps_r + 1.0) / 2.0 + (eps_r - 1.0) / 2.0 * (1.0 + 10.0 / u) ** (-a * b)


def _impedance_and_eps_eff(width_mm: float, sub: SubstrateSpec) -> tuple[float, float]:
    u = width_mm / sub.height_mm
    t = sub.metal_thickness_mm / sub.height_mm
    if t > 0:
        du1 = t / math.pi * math.log(1.0 + 4.0 * math.e / (t / math.tanh(math.sqrt(6.517 * u)) ** 2))
        dur = 0.5 * (1.0 + 1.0 / math.cosh(math.sqrt(sub.eps_r - 1.0))) * du1
        u1, ur = u + du1, u + dur
    else:
        u1 = ur = u
    z_air = _z01(ur)
    eps_eff = _eps_eff_zero_thickness(ur, sub.eps_r) * (_z01(u1) / z_air) ** 2
    return z_air / math.sqrt(eps_eff), eps_eff


def _check_width(width_mm: float, sub: SubstrateSpec) -> None:
    if not width_mm > 0:
        raise ValueError(f"width must be > 0 mm, got {width_mm}")
    ratio = width_mm / sub.height_mm
    # relative slack so the range ends survive w = ratio * h round-off
    if not MIN_WIDTH_RATIO * (1 - 1e-12) <= ratio <= MAX_WIDTH_RATIO * (1 + 1e-12):
        raise OutOfRangeError(
            f"w/h = {ratio:.4g} outside the closed-form range "
            f"[{MIN_WIDTH_RATIO}, {MAX_WIDTH_RATIO}]"
        )


def microstrip_impedance(width_mm: float, sub: SubstrateSpec) -> float:
    """Characteristic impedance (ohm) of a microstrip of width ``width_mm``.

    Raises:
        ValueError: nonpositive width.
        OutOfRangeError: w/h outside [0.1, 10].
    """
    _check_width(width_mm, sub)
    return _impedance_and_eps_eff(width_mm, sub)[0]


def microstrip_eps_eff(width_mm: float, sub: SubstrateSpec) -> float:
    """Quasi-static, width-dependent effective permittivity of a microstrip."""
    _check_width(width_mm, sub)
    return _impedance_and_eps_eff(width_mm, sub)[1]


def impedance_range(sub: SubstrateSpec) -> tuple[float, float]:
    """(lowest, highest) impedance the closed form covers on ``sub``."""
    lo = microstrip_impedance(MAX_WIDTH_RATIO * sub.height_mm, sub)
    hi = microstrip_impedance(MIN_WIDTH_RATIO * sub.height_mm, sub)
    return lo, hi


def microstrip_width_for_impedance(z0: float, sub: SubstrateSpec, tol_ohm: float = 1e-4) -> float:
    """Width in mm whose impedance equals ``z0``, by bisection.

    The curve is strictly decreasing in width, so bisection over the valid
    width range always converges when ``z0`` is bracketed.

    Raises:
        OutOfRangeError: ``z0`` not reachable on this substrate.
    """
    lo_w = MIN_WIDTH_RATIO * sub.height_mm
    hi_w = MAX_WIDTH_RATIO * sub.height_mm
    z_narrow = microstrip_impedance(lo_w, sub)
    z_wide = microstrip_impedance(hi_w, sub)
    if not z_wide <= z0 <= z_narrow:
        raise OutOfRangeError(
            f"{z0:.4g} ohm not reachable on this substrate "
            f"(range {z_wide:.4g}..{z_narrow:.4g} ohm)"
        )
    for _ in range(200):
        mid = 0.5 * (lo_w + hi_w)
        z_mid = microstrip_impedance(mid, sub)
        if abs(z_mid - z0) < tol_ohm:
            return mid
        if z_mid > z0:
            lo_w = mid
        else:
            hi_w = mid
    return 0.5 * (lo_w + hi_w)
