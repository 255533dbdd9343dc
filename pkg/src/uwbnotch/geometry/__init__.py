from ..design import DesignParams
from .export import GEOMETRY_SCHEMA, SchemaError, export_json, export_svg, geometry_to_dict, import_json
from .layout import (
    AntennaGeometry,
    Circle,
    GeometryValidationError,
    Polygon,
    Rect,
    SlotPath,
    arm_split,
    build_geometry,
    circular_patch_radius,
    slot_path,
    taper_width_profile,
    validate,
)

__all__ = [
    "AntennaGeometry",
    "Circle",
    "DesignParams",
    "GEOMETRY_SCHEMA",
    "GeometryValidationError",
    "Polygon",
    "Rect",
    "SchemaError",
    "SlotPath",
    "arm_split",
    "build_geometry",
    "circular_patch_radius",
    "export_json",
    "export_svg",
    "geometry_to_dict",
    "import_json",
    "slot_path",
    "taper_width_profile",
    "validate",
]
