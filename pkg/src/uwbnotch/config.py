"""JSON design configuration: schema, defaults and conversion to model objects.

A config file is a partial document merged over :data:`DEFAULT_CONFIG`;
nested objects merge key by key, lists replace wholesale. Frequencies are in
hertz, lengths in mm.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .circuit import frequency_grid
from .core_em import SubstrateSpec, effective_permittivity_simple, microstrip_width_for_impedance
from .design import REFERENCE_NOTCH_Q, DesignParams
from .geometry.export import SchemaError
from .notch import NotchSpec, ServiceBand, SlotKind, slot_length_for_frequency
from .taper import TaperSpec

CONFIG_SCHEMA_VERSION = 1

_POS = {"type": "number", "exclusiveMinimum": 0}
_BAND = {
    "type": "object",
    "properties": {"name": {"type": "string"}, "f_lo_hz": _POS, "f_hi_hz": _POS},
    "required": ["name", "f_lo_hz", "f_hi_hz"],
    "additionalProperties": False,
}
_NOTCH = {
    "type": "object",
    "properties": {
        "band": {"type": "string"},
        "target_hz": _POS,
        "slot_kind": {"enum": [k.value for k in SlotKind]},
        "slot_length_mm": {"oneOf": [_POS, {"type": "null"}]},
        "slot_width_mm": _POS,
        "arm_length_mm": {"oneOf": [_POS, {"type": "null"}]},
        "cut_width_mm": _POS,
        "q_factor": _POS,
        "reference_size_mm": {"oneOf": [_POS, {"type": "null"}]},
    },
    "required": ["band", "target_hz", "slot_kind", "slot_width_mm"],
    "additionalProperties": False,
}


def _obj(props: dict) -> dict:
    return {"type": "object", "properties": props, "additionalProperties": False}


CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    **_obj(
        {
            "schema_version": {"const": CONFIG_SCHEMA_VERSION},
            "substrate": _obj(
                {
                    "eps_r": {"type": "number", "minimum": 1},
                    "height_mm": _POS,
                    "metal_thickness_mm": {"type": "number", "minimum": 0},
                    "loss_tangent": {"type": "number", "minimum": 0},
                }
            ),
            "substrate_length_mm": _POS,
            "substrate_width_mm": _POS,
            "patch_radius_mm": _POS,
            "patch_design_frequency_hz": _POS,
            "feed_length_mm": _POS,
            "feed_width_mm": {"oneOf": [_POS, {"type": "null"}]},
            "taper": _obj(
                {
                    "z0_ohm": _POS,
                    "zl_ohm": _POS,
                    "exponent_product": {"type": "number"},
                    "length_mm": _POS,
                    "segments": {"type": "integer", "minimum": 2},
                }
            ),
            "ground_length_mm": _POS,
            "ground_width_mm": _POS,
            "ground_cut_mm": _POS,
            "slot_gap_mm": _POS,
            "port_impedance_ohm": _POS,
            "notches": {"type": "array", "items": _NOTCH},
            "bands": {"type": "array", "items": _BAND},
            "uwb_band": _BAND,
            "sweep": _obj({"start_hz": _POS, "stop_hz": _POS, "step_hz": _POS}),
            "optimizer": _obj(
                {
                    "tolerance_hz": _POS,
                    "max_iterations": {"type": "integer", "minimum": 1},
                    "bounds_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                }
            ),
        }
    ),
}

DEFAULT_CONFIG: dict = {
    "schema_version": CONFIG_SCHEMA_VERSION,
    "substrate": {"eps_r": 4.4, "height_mm": 1.6, "metal_thickness_mm": 0.0036, "loss_tangent": 0.0},
    "substrate_length_mm": 32.0,
    "substrate_width_mm": 22.0,
    "patch_radius_mm": 6.553,
    "patch_design_frequency_hz": 3.1e9,
    "feed_length_mm": 5.42,
    "feed_width_mm": None,
    "taper": {"z0_ohm": 50.0, "zl_ohm": 40.0, "length_mm": 10.0, "segments": 1024},
    "ground_length_mm": 5.3,
    "ground_width_mm": 22.0,
    "ground_cut_mm": 2.0,
    "slot_gap_mm": 0.5,
    "port_impedance_ohm": 50.0,
    "notches": [
        {
            "band": "WiMAX",
            "target_hz": 3.5e9,
            "slot_kind": "inverted-C",
            "slot_length_mm": None,
            "slot_width_mm": 8.0,
            "arm_length_mm": 7.0,
            "cut_width_mm": 0.3,
            "q_factor": REFERENCE_NOTCH_Q,
            "reference_size_mm": 26.34,
        },
        {
            "band": "WLAN",
            "target_hz": 5.5e9,
            "slot_kind": "inverted-C",
            "slot_length_mm": None,
            "slot_width_mm": 6.0,
            "arm_length_mm": 4.5,
            "cut_width_mm": 0.3,
            "q_factor": REFERENCE_NOTCH_Q,
            "reference_size_mm": 19.3,
        },
        {
            "band": "X-band downlink",
            "target_hz": 7.5e9,
            "slot_kind": "U",
            "slot_length_mm": None,
            "slot_width_mm": 1.6,
            "arm_length_mm": 5.8,
            "cut_width_mm": 0.3,
            "q_factor": REFERENCE_NOTCH_Q,
            "reference_size_mm": 12.29,
        },
    ],
    "bands": [
        {"name": "WiMAX", "f_lo_hz": 3.3e9, "f_hi_hz": 3.7e9},
        {"name": "WLAN", "f_lo_hz": 5.15e9, "f_hi_hz": 5.825e9},
        {"name": "X-band downlink", "f_lo_hz": 7.25e9, "f_hi_hz": 7.75e9},
    ],
    "uwb_band": {"name": "UWB", "f_lo_hz": 3.1e9, "f_hi_hz": 10.6e9},
    "sweep": {"start_hz": 2.0e9, "stop_hz": 12.0e9, "step_hz": 1.0e7},
    "optimizer": {"tolerance_hz": 5.0e6, "max_iterations": 500, "bounds_fraction": 0.5},
}


class ConfigError(ValueError):
    """Config failed schema or semantic validation; ``problems`` lists why."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = list(problems)


@dataclass(frozen=True)
class DesignConfig:
    params: DesignParams
    bands: tuple[ServiceBand, ...]
    uwb_band: ServiceBand
    sweep_hz: tuple[float, float, float]
    tolerance_hz: float
    max_iterations: int
    bounds_fraction: float
    patch_design_frequency_hz: float
    document: dict

    @property
    def freqs(self) -> np.ndarray:
        return frequency_grid(*self.sweep_hz)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _band(d: dict) -> ServiceBand:
    return ServiceBand(d["name"], float(d["f_lo_hz"]), float(d["f_hi_hz"]))


def parse_sweep(text: str) -> tuple[float, float, float]:
    """``"lo:hi:step"`` in GHz to hertz."""
    try:
        lo, hi, step = (float(x) * 1e9 for x in text.split(":"))
    except ValueError:
        raise ValueError(f"sweep must look like lo:hi:step in GHz, got {text!r}") from None
    if not (0 < lo < hi and step > 0):
        raise ValueError(f"invalid sweep {text!r}")
    return lo, hi, step


def load_config(source: str | Path | dict | None = None, sweep: str | None = None) -> DesignConfig:
    """Validate and resolve a config document (path, dict, or None for defaults).

    Raises:
        ConfigError: unreadable file, schema violation, or inconsistent values.
    """
    if source is None:
        user: dict = {}
    elif isinstance(source, dict):
        user = source
    else:
        try:
            user = json.loads(Path(source).read_text())
        except OSError as exc:
            raise ConfigError([f"cannot read config: {exc}"]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError([f"$: invalid JSON ({exc.msg} at line {exc.lineno})"]) from None

    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(user), key=lambda e: e.json_path)
    if errors:
        raise ConfigError([str(SchemaError(e.json_path, e.message)) for e in errors])

    doc = _merge(DEFAULT_CONFIG, user)
    if "exponent_product" in user.get("taper", {}):
        doc["taper"]["zl_ohm"] = doc["taper"]["z0_ohm"] * math.exp(doc["taper"]["exponent_product"])
    doc["taper"].pop("exponent_product", None)
    if sweep is not None:
        try:
            lo, hi, step = parse_sweep(sweep)
        except ValueError as exc:
            raise ConfigError([str(exc)]) from None
        doc["sweep"] = {"start_hz": lo, "stop_hz": hi, "step_hz": step}
    try:
        return _resolve(doc)
    except (ValueError, KeyError) as exc:
        raise ConfigError([str(exc)]) from None


def _resolve(doc: dict) -> DesignConfig:
    problems = []
    sub = SubstrateSpec(**doc["substrate"])
    eps_eff = effective_permittivity_simple(sub.eps_r)
    t = doc["taper"]
    taper = TaperSpec(t["z0_ohm"], t["zl_ohm"], t["length_mm"], t["segments"])
    bands = tuple(_band(b) for b in doc["bands"])
    by_name = {b.name: b for b in bands}
    notches = []
    for i, n in enumerate(doc["notches"]):
        if n["band"] not in by_name:
            problems.append(f"$.notches[{i}].band: unknown band {n['band']!r}")
            continue
        length = n.get("slot_length_mm")
        if length is None:
            length = slot_length_for_frequency(n["target_hz"], eps_eff)
        try:
            notches.append(
                NotchSpec(
                    target_center=float(n["target_hz"]),
                    band=by_name[n["band"]],
                    slot_kind=SlotKind(n["slot_kind"]),
                    slot_length_mm=float(length),
                    slot_width_mm=float(n["slot_width_mm"]),
                    q_factor=float(n.get("q_factor", 20.0)),
                    arm_length_mm=n.get("arm_length_mm"),
                    cut_width_mm=float(n.get("cut_width_mm", 0.3)),
                    reference_size_mm=n.get("reference_size_mm"),
                )
            )
        except ValueError as exc:
            problems.append(f"$.notches[{i}]: {exc}")
    targets = [n.target_center for n in notches]
    if any(b <= a for a, b in zip(targets, targets[1:])):
        problems.append("$.notches: targets must be strictly increasing")
    if problems:
        raise ConfigError(problems)

    feed_width = doc["feed_width_mm"]
    if feed_width is None:
        feed_width = microstrip_width_for_impedance(taper.z0_ohm, sub)
    params = DesignParams(
        substrate=sub,
        substrate_length_mm=doc["substrate_length_mm"],
        substrate_width_mm=doc["substrate_width_mm"],
        patch_radius_mm=doc["patch_radius_mm"],
        feed_length_mm=doc["feed_length_mm"],
        feed_width_mm=feed_width,
        taper=taper,
        ground_length_mm=doc["ground_length_mm"],
        ground_width_mm=doc["ground_width_mm"],
        ground_cut_mm=doc["ground_cut_mm"],
        notches=tuple(notches),
        slot_gap_mm=doc["slot_gap_mm"],
        port_impedance_ohm=doc["port_impedance_ohm"],
    )
    s = doc["sweep"]
    sweep_hz = (float(s["start_hz"]), float(s["stop_hz"]), float(s["step_hz"]))
    frequency_grid(*sweep_hz)
    opt = doc["optimizer"]
    return DesignConfig(
        params=params,
        bands=bands,
        uwb_band=_band(doc["uwb_band"]),
        sweep_hz=sweep_hz,
        tolerance_hz=float(opt["tolerance_hz"]),
        max_iterations=int(opt["max_iterations"]),
        bounds_fraction=float(opt["bounds_fraction"]),
        patch_design_frequency_hz=float(doc["patch_design_frequency_hz"]),
        document=doc,
    )
