"""Value types shared by every geometric operation.

All regions handled by the engine are convex solids: yaw-only boxes and
vertical prisms over convex footprints. A convex solid is an internally
connected point set, so every region the engine produces is a proper
spatial region without any runtime check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np
from shapely.geometry import Polygon

from app.utils.errors import DegenerateInput, MisalignedBox, UnitError

# geometric identity, metres
EPS_GEOM = 1e-6
# "zero volume", cubic metres
EPS_VOL = 1e-9
# minimum half-extent given to degenerate clouds, metres
DELTA_MIN = 1e-3

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


def normalize_angle(angle: float) -> float:
    """Map an angle to [0, 2pi)."""
    a = math.fmod(angle, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI - 1e-12:
        a = 0.0
    return a


def wrap_angle(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = normalize_angle(angle)
    if a > math.pi:
        a -= TWO_PI
    return a


def rotation_2d(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s], [s, c]])


def _require_finite(values: Iterable[float], what: str):
    for v in values:
        if not math.isfinite(v):
            raise UnitError(f"{what} must be finite, got {v!r}")


@dataclass(frozen=True)
class Point3:
    """A geometrical point: coordinates in metres in an explicit frame."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        _require_finite((self.x, self.y, self.z), "point coordinates")

    @classmethod
    def from_seq(cls, values: Sequence[float]) -> "Point3":
        if len(values) != 3:
            raise UnitError(f"a point needs 3 coordinates, got {len(values)}")
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)

    @property
    def xy(self) -> np.ndarray:
        return np.array([self.x, self.y])


ORIGIN = Point3(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class ConvexPolygon2D:
    """Counterclockwise vertex ring without repeated closing vertex."""

    vertices: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        if len(self.vertices) < 3:
            raise DegenerateInput(f"a polygon needs at least 3 vertices, got {len(self.vertices)}")

    @classmethod
    def from_array(cls, pts: np.ndarray) -> "ConvexPolygon2D":
        return cls(tuple((float(x), float(y)) for x, y in np.asarray(pts, dtype=float)))

    @classmethod
    def from_shapely(cls, poly: Polygon) -> "ConvexPolygon2D":
        ring = np.asarray(poly.exterior.coords)[:-1]
        if not poly.exterior.is_ccw:
            ring = ring[::-1]
        return cls.from_array(ring)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=float)

    def to_shapely(self) -> Polygon:
        return Polygon(self.vertices)

    @property
    def area(self) -> float:
        pts = self.as_array()
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    @property
    def centroid(self) -> np.ndarray:
        c = self.to_shapely().centroid
        return np.array([c.x, c.y])


@dataclass(frozen=True)
class OrientedBox:
    """Box with a gravity-parallel base and arbitrary yaw about Z.

    `half_extents` are measured along the box's own X, Y, Z axes; the box X
    axis points at `yaw` radians from the X axis of the frame the centre is
    expressed in.
    """

    center: Point3
    half_extents: Tuple[float, float, float]
    yaw: float = 0.0

    def __post_init__(self):
        he = tuple(float(h) for h in self.half_extents)
        if len(he) != 3:
            raise UnitError(f"half extents need 3 values, got {len(he)}")
        _require_finite(he + (float(self.yaw),), "box parameters")
        if min(he) <= 0.0:
            raise DegenerateInput(f"half extents must be strictly positive, got {he}")
        object.__setattr__(self, "half_extents", he)
        object.__setattr__(self, "yaw", normalize_angle(float(self.yaw)))

    @classmethod
    def from_bounds(cls, mins: Sequence[float], maxs: Sequence[float], yaw: float = 0.0) -> "OrientedBox":
        """Axis-aligned box from min/max corners, optionally re-labelled with a yaw."""
        lo, hi = np.asarray(mins, dtype=float), np.asarray(maxs, dtype=float)
        return cls(Point3.from_seq((lo + hi) / 2.0), tuple((hi - lo) / 2.0), yaw)

    @property
    def hx(self) -> float:
        return self.half_extents[0]

    @property
    def hy(self) -> float:
        return self.half_extents[1]

    @property
    def hz(self) -> float:
        return self.half_extents[2]

    @property
    def z_min(self) -> float:
        return self.center.z - self.hz

    @property
    def z_max(self) -> float:
        return self.center.z + self.hz

    @property
    def volume(self) -> float:
        return 8.0 * self.hx * self.hy * self.hz

    @property
    def diameter(self) -> float:
        return 2.0 * math.sqrt(self.hx ** 2 + self.hy ** 2 + self.hz ** 2)

    def axes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Unit vectors of the box X and Y axes in the XY plane."""
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return np.array([c, s]), np.array([-s, c])

    def footprint_array(self) -> np.ndarray:
        ax, ay = self.axes()
        c = self.center.xy
        return np.array([
            c - self.hx * ax - self.hy * ay,
            c + self.hx * ax - self.hy * ay,
            c + self.hx * ax + self.hy * ay,
            c - self.hx * ax + self.hy * ay,
        ])

    def footprint(self) -> ConvexPolygon2D:
        return ConvexPolygon2D.from_array(self.footprint_array())

    def corners(self) -> np.ndarray:
        """The 8 corners, bottom ring then top ring, shape (8, 3)."""
        ring = self.footprint_array()
        bottom = np.column_stack([ring, np.full(4, self.z_min)])
        top = np.column_stack([ring, np.full(4, self.z_max)])
        return np.vstack([bottom, top])

    def to_local(self, points: np.ndarray) -> np.ndarray:
        """Express global points (N, 3) in box-centred, box-aligned coordinates."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts - self.center.as_array()
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        local = np.empty_like(rel)
        local[:, 0] = c * rel[:, 0] + s * rel[:, 1]
        local[:, 1] = -s * rel[:, 0] + c * rel[:, 1]
        local[:, 2] = rel[:, 2]
        return local

    def to_global(self, local: np.ndarray) -> np.ndarray:
        loc = np.atleast_2d(np.asarray(local, dtype=float))
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        out = np.empty_like(loc)
        out[:, 0] = c * loc[:, 0] - s * loc[:, 1]
        out[:, 1] = s * loc[:, 0] + c * loc[:, 1]
        out[:, 2] = loc[:, 2]
        return out + self.center.as_array()

    def contains_points(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        local = np.abs(self.to_local(points))
        he = np.asarray(self.half_extents) + tol
        return np.all(local <= he, axis=1)

    def signed_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed Euclidean distance to the box surface; negative inside."""
        q = np.abs(self.to_local(points)) - np.asarray(self.half_extents)
        outside = np.linalg.norm(np.maximum(q, 0.0), axis=1)
        inside = np.minimum(np.max(q, axis=1), 0.0)
        return outside + inside

    def aligned_to(self, yaw: float, tol: float = EPS_GEOM) -> "OrientedBox":
        """Same solid re-expressed with a yaw differing by a multiple of pi/2."""
        quarter_turns = (self.yaw - yaw) / HALF_PI
        k = round(quarter_turns)
        # angular tolerance scaled to a length error at the box corners
        if abs(quarter_turns - k) * HALF_PI * max(1.0, max(self.hx, self.hy)) > tol:
            raise MisalignedBox(
                f"box yaw {self.yaw:.6f} is not aligned with {normalize_angle(yaw):.6f} modulo pi/2"
            )
        hx, hy, hz = self.half_extents
        if k % 2:
            hx, hy = hy, hx
        return OrientedBox(self.center, (hx, hy, hz), yaw)

    def normalized(self) -> "OrientedBox":
        """Canonical form with yaw in [0, pi/2)."""
        canonical = math.fmod(self.yaw, HALF_PI)
        if HALF_PI - canonical < 1e-12:
            canonical = 0.0
        return self.aligned_to(canonical)

    def translated(self, dx: float, dy: float, dz: float = 0.0) -> "OrientedBox":
        c = self.center
        return OrientedBox(Point3(c.x + dx, c.y + dy, c.z + dz), self.half_extents, self.yaw)

    def to_prism(self) -> "Prism":
        return Prism(self.footprint(), self.z_min, self.z_max)


@dataclass(frozen=True)
class Prism:
    """Vertical prism: convex footprint extruded between two heights."""

    footprint: ConvexPolygon2D
    z_min: float
    z_max: float
    _shape: Polygon = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.z_max < self.z_min:
            raise DegenerateInput(f"prism z range is inverted: [{self.z_min}, {self.z_max}]")
        object.__setattr__(self, "_shape", self.footprint.to_shapely())

    @property
    def shape(self) -> Polygon:
        return self._shape

    @property
    def height(self) -> float:
        return self.z_max - self.z_min

    @property
    def volume(self) -> float:
        return self.footprint.area * self.height

    @property
    def centroid(self) -> Point3:
        cx, cy = self.footprint.centroid
        return Point3(float(cx), float(cy), 0.5 * (self.z_min + self.z_max))
