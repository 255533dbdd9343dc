"""Antenna design parameters, the reference design, and its circuit model.

The circuit model is a 50 ohm port feeding a uniform microstrip, then every
slot resonator as a shunt branch at the feed/taper junction, then the
exponential taper, terminated in the patch as a constant real load equal to
the taper's load impedance. A frequency-independent patch load is the main
limit of the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .circuit import AbcdMatrix, Cascade, S11Trace, UniformLine, abcd_shunt, s11_from_abcd, sweep
from .core_em import (
    SubstrateSpec,
    effective_permittivity_simple,
    microstrip_width_for_impedance,
    phase_velocity,
)
from .notch import (
    NotchSpec,
    SlotKind,
    WIMAX_BAND,
    WLAN_BAND,
    XBAND_DOWNLINK,
    resonator_element,
    slot_length_for_frequency,
)
from .taper import TaperSpec, taper_network

# Q of the reference design's notches; lowest round value that keeps each
# VSWR >= 2 span over its whole service band with > 80 MHz to spare
REFERENCE_NOTCH_Q = 14.0


@dataclass(frozen=True)
class DesignParams:
    substrate: SubstrateSpec
    substrate_length_mm: float
    substrate_width_mm: float
    patch_radius_mm: float
    feed_length_mm: float
    feed_width_mm: float
    taper: TaperSpec
    ground_length_mm: float
    ground_width_mm: float
    ground_cut_mm: float = 2.0
    notches: tuple[NotchSpec, ...] = ()
    slot_gap_mm: float = 0.5
    port_impedance_ohm: float = 50.0

    def __post_init__(self):
        object.__setattr__(self, "notches", tuple(self.notches))
        for name in (
            "substrate_length_mm",
            "substrate_width_mm",
            "patch_radius_mm",
            "feed_length_mm",
            "feed_width_mm",
            "ground_length_mm",
            "ground_width_mm",
            "ground_cut_mm",
            "slot_gap_mm",
            "port_impedance_ohm",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def eps_eff(self) -> float:
        """Width-independent effective permittivity used for slots and lines."""
        return effective_permittivity_simple(self.substrate.eps_r)

    @property
    def phase_velocity(self) -> float:
        return phase_velocity(self.eps_eff)

    def with_slot_lengths(self, lengths) -> DesignParams:
        lengths = list(lengths)
        if len(lengths) != len(self.notches):
            raise ValueError(f"expected {len(self.notches)} slot lengths, got {len(lengths)}")
        notches = tuple(replace(n, slot_length_mm=float(l)) for n, l in zip(self.notches, lengths))
        return replace(self, notches=notches)


def reference_notches(eps_eff: float, q_factor: float = REFERENCE_NOTCH_Q) -> tuple[NotchSpec, ...]:
    """The three notches (3.5, 5.5, 7.5 GHz), sized as half-wave slots.

    Outer span and arm length carry the reference slot proportions
    (8/7, 6/4.5, 1.6/5.8 mm); ``reference_size_mm`` keeps the reference
    slot sizes for comparison.
    """
    rows = [
        (3.5e9, WIMAX_BAND, SlotKind.INVERTED_C, 8.0, 7.0, 26.34),
        (5.5e9, WLAN_BAND, SlotKind.INVERTED_C, 6.0, 4.5, 19.3),
        (7.5e9, XBAND_DOWNLINK, SlotKind.U, 1.6, 5.8, 12.29),
    ]
    return tuple(
        NotchSpec(
            target_center=f,
            band=band,
            slot_kind=kind,
            slot_length_mm=slot_length_for_frequency(f, eps_eff),
            slot_width_mm=span,
            arm_length_mm=arm,
            q_factor=q_factor,
            reference_size_mm=size,
        )
        for f, band, kind, span, arm, size in rows
    )


def reference_design(with_notches: bool = True) -> DesignParams:
    """Reference triple-notch antenna on 1.6 mm FR-4, 32 x 22 mm board."""
    sub = SubstrateSpec.fr4()
    taper = TaperSpec(z0_ohm=50.0, zl_ohm=40.0, length_mm=10.0)
    notches = reference_notches(effective_permittivity_simple(sub.eps_r)) if with_notches else ()
    return DesignParams(
        substrate=sub,
        substrate_length_mm=32.0,
        substrate_width_mm=22.0,
        patch_radius_mm=6.553,
        feed_length_mm=5.42,
        feed_width_mm=microstrip_width_for_impedance(taper.z0_ohm, sub),
        taper=taper,
        ground_length_mm=5.3,
        ground_width_mm=22.0,
        ground_cut_mm=2.0,
        notches=notches,
        slot_gap_mm=0.5,
    )


# -- circuit model ----------------------------------------------------------------

def resonators(params: DesignParams) -> list:
    return [resonator_element(n, params.taper.z0_ohm, params.eps_eff) for n in params.notches]


def antenna_network(params: DesignParams) -> Cascade:
    v = params.phase_velocity
    feed = UniformLine(params.taper.z0_ohm, params.feed_length_mm, v)
    return Cascade((feed, *resonators(params), *taper_network(params.taper, v).elements))


def model_trace(params: DesignParams, freqs) -> S11Trace:
    return sweep(antenna_network(params), params.port_impedance_ohm, params.taper.zl_ohm, freqs)


@dataclass
class AntennaModel:
    """Sweeps the antenna model on a fixed grid for many slot-length sets.

    The feed line and taper do not depend on slot lengths, so their
    matrices are evaluated once.
    """

    params: DesignParams
    freqs: np.ndarray
    _feed: AbcdMatrix = field(init=False, repr=False)
    _taper: AbcdMatrix = field(init=False, repr=False)

    def __post_init__(self):
        self.freqs = np.asarray(self.freqs, float)
        v = self.params.phase_velocity
        self._feed = UniformLine(self.params.taper.z0_ohm, self.params.feed_length_mm, v).abcd(self.freqs)
        self._taper = taper_network(self.params.taper, v).abcd(self.freqs)

    def trace(self, slot_lengths=None) -> S11Trace:
        p = self.params if slot_lengths is None else self.params.with_slot_lengths(slot_lengths)
        y = np.zeros(self.freqs.shape, complex)
        for r in resonators(p):
            y = y + 1.0 / r.impedance(self.freqs)
        m = self._feed @ abcd_shunt(y) @ self._taper
        gamma = s11_from_abcd(m, p.port_impedance_ohm, p.taper.zl_ohm)
        return S11Trace(self.freqs, np.atleast_1d(gamma))
