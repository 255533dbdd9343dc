"""Sizing, circuit modelling and layout of printed UWB monopoles with
slot-resonator notches and a tapered microstrip feed."""

from .circuit import S11Trace, sweep
from .core_em import SubstrateSpec
from .design import DesignParams, reference_design
from .notch import NotchSpec, ServiceBand
from .taper import TaperSpec

__version__ = "0.1.0"

__all__ = [
    "DesignParams",
    "NotchSpec",
    "S11Trace",
    "ServiceBand",
    "SubstrateSpec",
    "TaperSpec",
    "reference_design",
    "sweep",
]
