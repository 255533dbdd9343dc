"""SVG and JSON serialization of :class:`AntennaGeometry`."""

from __future__ import annotations

import json
from xml.sax.saxutils import quoteattr

import jsonschema

from ..notch import SlotKind
from .layout import AntennaGeometry, Circle, Polygon, Rect, SlotPath

GEOMETRY_SCHEMA_VERSION = 1

_POINT = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_COMMON = {"name": {"type": "string"}, "layer": {"enum": ["front", "back"]}}


def _shape_schema(kind: str, props: dict) -> dict:
    return {
        "type": "object",
        "properties": {"type": {"const": kind}, **_COMMON, **props},
        "required": ["type", "name", "layer", *props],
        "additionalProperties": False,
    }


_SHAPE = {
    "oneOf": [
        _shape_schema("rect", {k: {"type": "number"} for k in ("x", "y", "width", "height")}),
        _shape_schema("circle", {"cx": {"type": "number"}, "cy": {"type": "number"}, "radius": {"type": "number", "exclusiveMinimum": 0}}),
        _shape_schema("polygon", {"points": {"type": "array", "items": _POINT, "minItems": 3}}),
        _shape_schema(
            "slot",
            {
                "kind": {"enum": [k.value for k in SlotKind]},
                "width_mm": {"type": "number", "exclusiveMinimum": 0},
                "host": {"type": "string"},
                "centerline": {"type": "array", "items": _POINT, "minItems": 2},
            },
        ),
    ]
}

GEOMETRY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": GEOMETRY_SCHEMA_VERSION},
        "units": {"const": "mm"},
        "front_layer": {"type": "array", "items": _SHAPE},
        "back_layer": {"type": "array", "items": _SHAPE},
    },
    "required": ["schema_version", "units", "front_layer", "back_layer"],
    "additionalProperties": False,
}


class SchemaError(ValueError):
    """Document does not match the schema; ``path`` is a JSONPath location."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# -- JSON -----------------------------------------------------------------------

def _shape_to_dict(s) -> dict:
    if isinstance(s, Rect):
        return {"type": "rect", "name": s.name, "layer": s.layer, "x": s.x, "y": s.y, "width": s.width, "height": s.height}
    if isinstance(s, Circle):
        return {"type": "circle", "name": s.name, "layer": s.layer, "cx": s.cx, "cy": s.cy, "radius": s.radius}
    if isinstance(s, Polygon):
        return {"type": "polygon", "name": s.name, "layer": s.layer, "points": [list(p) for p in s.points]}
    if isinstance(s, SlotPath):
        return {
            "type": "slot",
            "name": s.name,
            "layer": s.layer,
            "kind": s.kind.value,
            "width_mm": s.width_mm,
            "host": s.host,
            "centerline": [list(p) for p in s.centerline],
        }
    raise TypeError(f"unknown shape {s!r}")


def _shape_from_dict(d: dict):
    kind = d["type"]
    if kind == "rect":
        return Rect(d["name"], d["layer"], d["x"], d["y"], d["width"], d["height"])
    if kind == "circle":
        return Circle(d["name"], d["layer"], d["cx"], d["cy"], d["radius"])
    if kind == "polygon":
        return Polygon(d["name"], d["layer"], tuple(tuple(p) for p in d["points"]))
    return SlotPath(
        tuple(tuple(p) for p in d["centerline"]), d["width_mm"], SlotKind(d["kind"]), name=d["name"], layer=d["layer"], host=d["host"]
    )


def geometry_to_dict(geom: AntennaGeometry) -> dict:
    return {
        "schema_version": GEOMETRY_SCHEMA_VERSION,
        "units": geom.units,
        "front_layer": [_shape_to_dict(s) for s in geom.front_layer],
        "back_layer": [_shape_to_dict(s) for s in geom.back_layer],
    }


def export_json(geom: AntennaGeometry) -> str:
    return json.dumps(geometry_to_dict(geom), indent=2) + "\n"


def import_json(document: str | dict) -> AntennaGeometry:
    """Parse a geometry document.

    Raises:
        SchemaError: malformed JSON or a schema violation, with its location.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError("$", f"invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})") from None
    validator = jsonschema.Draft202012Validator(GEOMETRY_SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(document))
    if error is not None:
        raise SchemaError(error.json_path, error.message)
    return AntennaGeometry(
        tuple(_shape_from_dict(s) for s in document["front_layer"]),
        tuple(_shape_from_dict(s) for s in document["back_layer"]),
        document["units"],
    )


# -- SVG ------------------------------------------------------------------------

_STYLE = {
    "substrate": 'fill="#3b7a57" fill-opacity="0.35" stroke="#1f4d36" stroke-width="0.05"',
    "copper": 'fill="#c8873a" stroke="none"',
    "ground": 'fill="#8c5a2b" fill-opacity="0.6" stroke="none"',
}


def _num(x: float) -> str:
    s = f"{x:.4f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Flip:
    def __init__(self, height: float):
        self.height = height

    def pt(self, x: float, y: float) -> str:
        return f"{_num(x)},{_num(self.height - y)}"

    def ring(self, points) -> str:
        head, *rest = points
        return "M" + self.pt(*head) + "".join(" L" + self.pt(*p) for p in rest) + " Z"


def _outline_path(shape, flip: _Flip) -> str:
    if isinstance(shape, Rect):
        x0, y0, x1, y1 = shape.bounds()
        return flip.ring([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])
    if isinstance(shape, Circle):
        r = _num(shape.radius)
        left, right = flip.pt(shape.cx - shape.radius, shape.cy), flip.pt(shape.cx + shape.radius, shape.cy)
        return f"M{left} A{r},{r} 0 1 0 {right} A{r},{r} 0 1 0 {left} Z"
    return flip.ring(shape.points)


def export_svg(geom: AntennaGeometry) -> str:
    """SVG drawing, 1 user unit = 1 mm, with ``front`` and ``back`` groups.

    Slots are subpaths of their host's path so the even-odd rule cuts them out.
    """
    substrate = geom.find("substrate")
    w, h = substrate.width, substrate.height
    flip = _Flip(substrate.y + h)
    cutouts: dict[str, list[str]] = {}
    for slot in geom.slots:
        cutouts.setdefault(slot.host, []).append(flip.ring(slot.outline()))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(w)}mm" height="{_num(h)}mm" '
        f'viewBox="{_num(substrate.x)} {_num(substrate.y)} {_num(w)} {_num(h)}">',
    ]
    for layer, shapes in (("front", geom.front_layer), ("back", geom.back_layer)):
        lines.append(f'  <g id="{layer}">')
        for s in shapes:
            if isinstance(s, SlotPath):
                continue
            style = _STYLE["substrate"] if s.name == "substrate" else _STYLE["ground" if layer == "back" else "copper"]
            d = " ".join([_outline_path(s, flip), *cutouts.get(s.name, [])])
            lines.append(f'    <path id={quoteattr(s.name)} fill-rule="evenodd" {style} d="{d}"/>')
        lines.append("  </g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
