"""Half-wave slot resonators: sizing, circuit surrogate, and band bookkeeping."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np

from .circuit import S11Trace, ShuntSeriesRLC
from .core_em import SPEED_OF_LIGHT, effective_permittivity_simple

FR4_EPS_EFF = effective_permittivity_simple(4.4)

# series resistance of a resonator branch as a fraction of the line impedance;
# keeps |S11| at resonance near 0.96 on a matched 50 ohm line
BRANCH_LOSS_FRACTION = 0.02

REJECT_VSWR = 2.0
PASSBAND_DB = -10.0


class CoverageError(ValueError):
    """Trace does not span a band it is asked about."""


class SlotKind(str, Enum):
    INVERTED_C = "inverted-C"  # etched in the radiating patch
    U = "U"  # etched in the feed-side matching section


@dataclass(frozen=True)
class ServiceBand:
    name: str
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not 0 < self.f_lo < self.f_hi:
            raise ValueError(f"band {self.name!r}: need 0 < f_lo < f_hi")

    def contains(self, f: float) -> bool:
        return self.f_lo <= f <= self.f_hi

    def overlaps(self, lo: float, hi: float) -> bool:
        return lo <= self.f_hi and hi >= self.f_lo


UWB_BAND = ServiceBand("UWB", 3.1e9, 10.6e9)
WIMAX_BAND = ServiceBand("WiMAX", 3.3e9, 3.7e9)
WLAN_BAND = ServiceBand("WLAN", 5.15e9, 5.825e9)
XBAND_DOWNLINK = ServiceBand("X-band downlink", 7.25e9, 7.75e9)
DEFAULT_NOTCH_BANDS = (WIMAX_BAND, WLAN_BAND, XBAND_DOWNLINK)


@dataclass(frozen=True)
class NotchSpec:
    """One band-notch slot.

    ``slot_width_mm`` and ``arm_length_mm`` are the slot's outer span and arm
    length; they only shape the layout. ``cut_width_mm`` is the etched
    trace width. ``reference_size_mm`` is an optional length that
    reports compare against the computed one.
    """

    target_center: float
    band: ServiceBand
    slot_kind: SlotKind
    slot_length_mm: float
    slot_width_mm: float
    q_factor: float = 20.0
    arm_length_mm: float | None = None
    cut_width_mm: float = 0.3
    reference_size_mm: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "slot_kind", SlotKind(self.slot_kind))
        if not self.slot_length_mm > 0:
            raise ValueError("slot_length_mm must be > 0")
        if not self.slot_width_mm > 0:
            raise ValueError("slot_width_mm must be > 0")
        if not self.q_factor > 0:
            raise ValueError("q_factor must be > 0")
        if not self.cut_width_mm > 0:
            raise ValueError("cut_width_mm must be > 0")
        if self.arm_length_mm is not None and not self.arm_length_mm > 0:
            raise ValueError("arm_length_mm must be > 0 when given")
        if not self.band.contains(self.target_center):
            raise ValueError(
                f"target {self.target_center / 1e9:g} GHz outside band {self.band.name!r}"
            )


def slot_length_for_frequency(f: float, eps_eff: float) -> float:
    """Half-guided-wavelength slot length in mm for notch frequency ``f`` (Hz)."""
    if not f > 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    if not eps_eff >= 1:
        raise ValueError(f"eps_eff must be >= 1, got {eps_eff}")
    return SPEED_OF_LIGHT / (2.0 * f * math.sqrt(eps_eff)) * 1e3


def notch_frequency_from_length(slot_length_mm: float, eps_eff: float) -> float:
    """Notch frequency in Hz of a half-wave slot ``slot_length_mm`` long."""
    if not slot_length_mm > 0:
        raise ValueError(f"slot length must be > 0, got {slot_length_mm}")
    if not eps_eff >= 1:
        raise ValueError(f"eps_eff must be >= 1, got {eps_eff}")
    return SPEED_OF_LIGHT / (2.0 * slot_length_mm * 1e-3 * math.sqrt(eps_eff))


def size_discrepancy(spec: NotchSpec, eps_eff: float) -> float | None:
    """Relative gap between the half-wave length for the target and the
    reference size, or None when none is recorded."""
    if spec.reference_size_mm is None:
        return None
    computed = slot_length_for_frequency(spec.target_center, eps_eff)
    return (spec.reference_size_mm - computed) / computed


def resonator_element(spec: NotchSpec, line_z0: float, eps_eff: float = FR4_EPS_EFF) -> ShuntSeriesRLC:
    """Shunt series-RLC stand-in for a slot.

    Resonates where the slot is half a guided wavelength long. The loaded Q
    counts the branch resistance plus the line seen from the branch
    (``line_z0 / 2``, source and load in parallel).
    """
    if not line_z0 > 0:
        raise ValueError("line_z0 must be > 0")
    f0 = notch_frequency_from_length(spec.slot_length_mm, eps_eff)
    w0 = 2 * math.pi * f0
    r = BRANCH_LOSS_FRACTION * line_z0
    inductance = spec.q_factor * (r + line_z0 / 2) / w0
    return ShuntSeriesRLC(r, inductance, 1.0 / (w0**2 * inductance))


# -- band report ----------------------------------------------------------------

def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, stop) index pairs of the True runs in ``mask``."""
    runs, start = [], None
    for i, m in enumerate(mask):
        if m and start is None:
            start = i
        elif not m and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


@dataclass
class BandStatus:
    name: str
    f_lo: float
    f_hi: float
    rejected: bool
    min_vswr: float


@dataclass
class BandReport:
    bands: list[BandStatus]
    passbands: list[tuple[float, float]] = field(default_factory=list)
    stopbands: list[tuple[float, float]] = field(default_factory=list)
    spurious_stopbands: list[tuple[float, float]] = field(default_factory=list)

    @property
    def uwb_matched(self) -> bool:
        """True when every VSWR >= 2 region in the UWB span hits a protected band."""
        return not self.spurious_stopbands

    def band(self, name: str) -> BandStatus:
        for b in self.bands:
            if b.name == name:
                return b
        raise KeyError(name)

    def to_dict(self) -> dict:
        d = asdict(self)
        for b in d["bands"]:
            b["min_vswr"] = _json_float(b["min_vswr"])
        for key in ("passbands", "stopbands", "spurious_stopbands"):
            d[key] = [list(r) for r in d[key]]
        d["uwb_matched"] = self.uwb_matched
        return d


def _json_float(x: float):
    return x if math.isfinite(x) else "inf"


def band_rejection_report(
    trace: S11Trace, bands=DEFAULT_NOTCH_BANDS, uwb_band: ServiceBand = UWB_BAND
) -> BandReport:
    """Which protected bands the trace rejects (VSWR >= 2 throughout), the
    -10 dB passbands, and any VSWR >= 2 region in the UWB span that misses
    every protected band."""
    f = trace.freq_hz
    for b in (*bands, uwb_band):
        if f[0] > b.f_lo or f[-1] < b.f_hi:
            raise CoverageError(
                f"trace {f[0] / 1e9:g}-{f[-1] / 1e9:g} GHz does not span band {b.name!r}"
            )
    vswr = trace.vswr
    statuses = []
    for b in bands:
        inside = (f >= b.f_lo) & (f <= b.f_hi)
        v = vswr[inside]
        if v.size == 0:
            raise CoverageError(f"no trace samples inside band {b.name!r}")
        statuses.append(BandStatus(b.name, b.f_lo, b.f_hi, bool(np.all(v >= REJECT_VSWR)), float(v.min())))

    passbands = [(float(f[i]), float(f[j])) for i, j in _runs(trace.magnitude_db <= PASSBAND_DB)]

    in_uwb = (f >= uwb_band.f_lo) & (f <= uwb_band.f_hi)
    stops = [(float(f[i]), float(f[j])) for i, j in _runs((vswr >= REJECT_VSWR) & in_uwb)]
    spurious = [r for r in stops if not any(b.overlaps(*r) for b in bands)]
    return BandReport(statuses, passbands, stops, spurious)
