"""Planar layout of the antenna: shapes, slot paths, builder and validation.

Coordinates are in mm with the origin at the lower-left substrate corner,
x across the board and y along the feed toward the patch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

from shapely.geometry import Point
from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry import box

from ..core_em import OutOfRangeError, SubstrateSpec, microstrip_width_for_impedance
from ..design import DesignParams
from ..notch import SlotKind
from ..taper import impedance_at

TAPER_PROFILE_POINTS = 65
WIDTH_TOLERANCE_MM = 0.01
CIRCLE_RESOLUTION = 256

Point2 = tuple[float, float]


class GeometryValidationError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


@dataclass(frozen=True)
class Rect:
    name: str
    layer: str
    x: float
    y: float
    width: float
    height: float

    def to_shapely(self):
        return box(self.x, self.y, self.x + self.width, self.y + self.height)

    def bounds(self):
        return self.x, self.y, self.x + self.width, self.y + self.height


@dataclass(frozen=True)
class Circle:
    name: str
    layer: str
    cx: float
    cy: float
    radius: float

    def to_shapely(self):
        return Point(self.cx, self.cy).buffer(self.radius, quad_segs=CIRCLE_RESOLUTION // 4)

    def bounds(self):
        return self.cx - self.radius, self.cy - self.radius, self.cx + self.radius, self.cy + self.radius


@dataclass(frozen=True)
class Polygon:
    name: str
    layer: str
    points: tuple[Point2, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in self.points))

    def to_shapely(self):
        return ShapelyPolygon(self.points)

    def bounds(self):
        xs, ys = zip(*self.points)
        return min(xs), min(ys), max(xs), max(ys)


@dataclass(frozen=True)
class SlotPath:
    """Etched slot: a polyline centerline swept with ``width_mm``.

    ``host`` names the copper shape the slot is cut from.
    """

    centerline: tuple[Point2, ...]
    width_mm: float
    kind: SlotKind
    name: str = "slot"
    layer: str = "front"
    host: str = "patch"

    def __post_init__(self):
        object.__setattr__(self, "centerline", tuple((float(x), float(y)) for x, y in self.centerline))
        object.__setattr__(self, "kind", SlotKind(self.kind))
        if len(self.centerline) < 2:
            raise ValueError("slot centerline needs at least two points")
        if not self.width_mm > 0:
            raise ValueError("slot width must be > 0")

    @property
    def length_mm(self) -> float:
        return sum(math.dist(p, q) for p, q in zip(self.centerline, self.centerline[1:]))

    def is_simple(self) -> bool:
        from shapely.geometry import LineString

        return LineString(self.centerline).is_simple

    def outline(self) -> tuple[Point2, ...]:
        """Closed outline with mitred corners, ends flush with the centerline endpoints."""
        pts = self.centerline
        normals = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            d = math.hypot(x1 - x0, y1 - y0)
            normals.append((-(y1 - y0) / d, (x1 - x0) / d))
        half = self.width_mm / 2
        offsets = [normals[0]]
        for n1, n2 in zip(normals, normals[1:]):
            k = 1 + n1[0] * n2[0] + n1[1] * n2[1]
            offsets.append(((n1[0] + n2[0]) / k, (n1[1] + n2[1]) / k))
        offsets.append(normals[-1])
        left = [(x + half * ox, y + half * oy) for (x, y), (ox, oy) in zip(pts, offsets)]
        right = [(x - half * ox, y - half * oy) for (x, y), (ox, oy) in zip(pts, offsets)]
        return tuple(left + right[::-1])

    def to_shapely(self):
        return ShapelyPolygon(self.outline())

    def bounds(self):
        xs, ys = zip(*self.outline())
        return min(xs), min(ys), max(xs), max(ys)


Shape = Rect | Circle | Polygon | SlotPath


@dataclass(frozen=True)
class AntennaGeometry:
    front_layer: tuple = ()
    back_layer: tuple = ()
    units: str = "mm"

    def __post_init__(self):
        object.__setattr__(self, "front_layer", tuple(self.front_layer))
        object.__setattr__(self, "back_layer", tuple(self.back_layer))

    def shapes(self):
        return (*self.front_layer, *self.back_layer)

    def find(self, name: str):
        for s in self.shapes():
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def slots(self) -> list[SlotPath]:
        return [s for s in self.front_layer if isinstance(s, SlotPath)]


# -- slot construction ------------------------------------------------------------

def _rotate(dx: float, dy: float, orientation_deg: float) -> Point2:
    quarter = orientation_deg / 90.0
    if quarter == int(quarter):
        c, s = [(1, 0), (0, 1), (-1, 0), (0, -1)][int(quarter) % 4]
    else:
        a = math.radians(orientation_deg)
        c, s = math.cos(a), math.sin(a)
    return dx * c - dy * s, dx * s + dy * c


def arm_split(total_length_mm: float, proportions: tuple[float, float] = (2.0, 1.0)) -> tuple[float, float]:
    """(bridge, arm) lengths for a bridge:arm:arm split of ``total_length_mm``."""
    bridge_w, arm_w = proportions
    if not (bridge_w > 0 and arm_w > 0):
        raise ValueError(f"slot proportions must be positive, got {proportions}")
    unit = total_length_mm / (bridge_w + 2 * arm_w)
    return bridge_w * unit, arm_w * unit


def slot_path(
    kind: SlotKind | str,
    total_length_mm: float,
    width_mm: float,
    anchor: Point2 = (0.0, 0.0),
    orientation_deg: float = 0.0,
    proportions: tuple[float, float] = (2.0, 1.0),
    name: str = "slot",
    host: str | None = None,
) -> SlotPath:
    """Three-segment slot: arm, bridge, arm.

    ``anchor`` is the bridge midpoint. At orientation 0 an inverted-C hangs
    its arms below the bridge (opening toward -y, the feed) and a U raises
    them above it (opening toward +y, the patch).
    """
    kind = SlotKind(kind)
    if not total_length_mm > 0:
        raise ValueError("slot length must be > 0")
    bridge, arm = arm_split(total_length_mm, proportions)
    sign = -1.0 if kind is SlotKind.INVERTED_C else 1.0
    local = [(-bridge / 2, sign * arm), (-bridge / 2, 0.0), (bridge / 2, 0.0), (bridge / 2, sign * arm)]
    ax, ay = anchor
    pts = []
    for dx, dy in local:
        rx, ry = _rotate(dx, dy, orientation_deg)
        pts.append((ax + rx, ay + ry))
    if host is None:
        host = "patch" if kind is SlotKind.INVERTED_C else "taper"
    return SlotPath(tuple(pts), width_mm, kind, name=name, host=host)


def slot_proportions(notch) -> tuple[float, float]:
    if notch.arm_length_mm is not None:
        return notch.slot_width_mm, notch.arm_length_mm
    return 2.0, 1.0


# -- patch synthesis -------------------------------------------------------------

def circular_patch_radius(f_design: float, sub: SubstrateSpec) -> float:
    """Physical radius (mm) of a circular patch resonating at ``f_design`` (Hz).

    Cavity model of the TM11 mode with the fringing-field correction
    (Balanis, Antenna Theory, 4th ed., eq. 14-67).
    """
    if not f_design > 0:
        raise ValueError(f"design frequency must be > 0, got {f_design}")
    h_cm = sub.height_mm / 10
    f_cm = 8.791e9 / (f_design * math.sqrt(sub.eps_r))
    fringe = 1 + 2 * h_cm / (math.pi * sub.eps_r * f_cm) * (math.log(math.pi * f_cm / (2 * h_cm)) + 1.7726)
    return 10 * f_cm / math.sqrt(fringe)


# -- builder --------------------------------------------------------------------

def taper_width_profile(params: DesignParams, n: int = TAPER_PROFILE_POINTS) -> list[tuple[float, float]]:
    """(z, width) samples of the taper outline, source end first."""
    t = params.taper
    out = []
    for k in range(n):
        z = t.length_mm * k / (n - 1)
        out.append((z, microstrip_width_for_impedance(impedance_at(z, t), params.substrate)))
    return out


@dataclass
class _Layout:
    front: list = field(default_factory=list)
    back: list = field(default_factory=list)
    problems: list = field(default_factory=list)


def build_geometry(params: DesignParams, validate_result: bool = True) -> AntennaGeometry:
    """Lay out substrate, feed, taper, patch, slots and ground.

    Raises:
        GeometryValidationError: every violated constraint, listed.
    """
    lay = _Layout()
    cx = params.substrate_width_mm / 2
    lay.front.append(Rect("substrate", "front", 0.0, 0.0, params.substrate_width_mm, params.substrate_length_mm))
    wf = params.feed_width_mm
    lay.front.append(Rect("feed", "front", cx - wf / 2, 0.0, wf, params.feed_length_mm))

    y0 = params.feed_length_mm
    try:
        profile = taper_width_profile(params)
    except OutOfRangeError as exc:
        raise GeometryValidationError([f"taper impedance not realizable: {exc}"]) from None
    right = [(cx + w / 2, y0 + z) for z, w in profile]
    left = [(cx - w / 2, y0 + z) for z, w in reversed(profile)]
    lay.front.append(Polygon("taper", "front", tuple(right + left)))

    w_end = profile[-1][1]
    zl_width = microstrip_width_for_impedance(params.taper.zl_ohm, params.substrate)
    if abs(w_end - zl_width) > WIDTH_TOLERANCE_MM:
        lay.problems.append(f"taper/load width mismatch: {w_end:.4f} vs {zl_width:.4f} mm")

    # the taper mouth is a chord of the patch circle
    r = params.patch_radius_mm
    y_end = y0 + params.taper.length_mm
    cy = y_end + math.sqrt(max(r * r - (w_end / 2) ** 2, 0.0))
    lay.front.append(Circle("patch", "front", cx, cy, r))

    _place_slots(params, lay, cx, cy, y0)

    gx = (params.substrate_width_mm - params.ground_width_mm) / 2
    gl, c = params.ground_length_mm, params.ground_cut_mm
    ground = (
        (gx, 0.0),
        (gx + params.ground_width_mm, 0.0),
        (gx + params.ground_width_mm, gl),
        (cx + c / 2, gl),
        (cx + c / 2, gl - c),
        (cx - c / 2, gl - c),
        (cx - c / 2, gl),
        (gx, gl),
    )
    lay.back.append(Polygon("ground", "back", ground))

    geom = AntennaGeometry(tuple(lay.front), tuple(lay.back))
    if validate_result:
        problems = lay.problems + validate(geom)
        if problems:
            raise GeometryValidationError(problems)
    return geom


def _place_slots(params: DesignParams, lay: _Layout, cx: float, cy: float, y_taper: float) -> None:
    c_slots = [(i, n) for i, n in enumerate(params.notches) if n.slot_kind is SlotKind.INVERTED_C]
    c_slots.sort(key=lambda item: -item[1].slot_length_mm)
    slots = {}
    top = None
    for i, n in c_slots:
        bridge, arm = arm_split(n.slot_length_mm, slot_proportions(n))
        if top is None:
            # outermost slot: bounding box centred on the patch
            top = cy + arm / 2
        slots[i] = slot_path(
            n.slot_kind, n.slot_length_mm, n.cut_width_mm, (cx, top), 0.0, slot_proportions(n), name=f"slot{i + 1}"
        )
        top -= n.cut_width_mm + params.slot_gap_mm

    for i, n in enumerate(params.notches):
        if n.slot_kind is SlotKind.U:
            bridge, arm = arm_split(n.slot_length_mm, slot_proportions(n))
            bottom = y_taper + (params.taper.length_mm - arm) / 2
            slots[i] = slot_path(
                n.slot_kind, n.slot_length_mm, n.cut_width_mm, (cx, bottom), 0.0, slot_proportions(n), name=f"slot{i + 1}"
            )
    lay.front.extend(slots[i] for i in sorted(slots))


# -- validation -------------------------------------------------------------------

def validate(geom: AntennaGeometry) -> list[str]:
    """All constraint violations of ``geom``; empty when it is sound."""
    problems = []
    names = [s.name for s in geom.shapes()]
    for dup in sorted({n for n in names if names.count(n) > 1}):
        problems.append(f"duplicate shape name: {dup!r}")
    by_name = {s.name: s for s in geom.shapes()}
    for s in geom.front_layer:
        if s.layer != "front":
            problems.append(f"layer tag mismatch: {s.name!r} tagged {s.layer!r} in front layer")
    for s in geom.back_layer:
        if s.layer != "back":
            problems.append(f"layer tag mismatch: {s.name!r} tagged {s.layer!r} in back layer")

    substrate = by_name.get("substrate")
    if not isinstance(substrate, Rect):
        return problems + ["missing substrate outline"]
    sx0, sy0, sx1, sy1 = substrate.bounds()
    eps = 1e-9
    for s in geom.shapes():
        if s is substrate:
            continue
        x0, y0, x1, y1 = s.bounds()
        if x0 < sx0 - eps or y0 < sy0 - eps or x1 > sx1 + eps or y1 > sy1 + eps:
            problems.append(f"{s.name} outside substrate")

    for slot in geom.slots:
        if slot.length_mm <= 0 or not slot.is_simple():
            problems.append(f"slot {slot.name!r} centerline degenerate or self-intersecting")
            continue
        host = by_name.get(slot.host)
        if host is None or isinstance(host, SlotPath):
            problems.append(f"slot {slot.name!r} has no host shape {slot.host!r}")
            continue
        if not host.to_shapely().contains_properly(slot.to_shapely()):
            problems.append(f"slot outside {slot.host}: {slot.name!r}")
    for a, b in combinations(geom.slots, 2):
        if a.to_shapely().intersects(b.to_shapely()):
            problems.append(f"slot overlap: {a.name!r} and {b.name!r}")

    feed, taper = by_name.get("feed"), by_name.get("taper")
    if isinstance(feed, Rect) and isinstance(taper, Polygon):
        (xr, yr), (xl, yl) = taper.points[0], taper.points[-1]
        if abs((xr - xl) - feed.width) > WIDTH_TOLERANCE_MM:
            problems.append(f"taper/feed width mismatch: {xr - xl:.4f} vs {feed.width:.4f} mm")
        if abs(yr - (feed.y + feed.height)) > WIDTH_TOLERANCE_MM or abs(yl - yr) > WIDTH_TOLERANCE_MM:
            problems.append("taper not joined to feed end")
    return problems
