"""Envelope fitting: 2D hulls, minimum-area rectangles and yaw-only boxes.

The minimum box of a cloud is the minimum-area rectangle of its XY
projection extruded from the lowest to the highest point, i.e. an oriented
envelope followed by an extrusion along Z.
"""
from __future__ import annotations

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull

from app.geometry.primitives import (
    DELTA_MIN,
    EPS_GEOM,
    HALF_PI,
    ConvexPolygon2D,
    OrientedBox,
    Point3,
)
from app.utils.errors import DegenerateInput

PointsLike = Union[np.ndarray, Sequence[Point3], Sequence[Sequence[float]]]

# relative tolerance when comparing candidate rectangle areas
_AREA_RTOL = 1e-9


def as_points(points: PointsLike, dim: int = 3) -> np.ndarray:
    if len(points) and isinstance(points[0], Point3):
        arr = np.array([p.as_tuple() for p in points], dtype=float)
    else:
        arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] < dim:
        raise DegenerateInput(f"expected an (N, {dim}) point array, got shape {arr.shape}")
    return arr[:, :dim]


def _is_collinear(pts: np.ndarray, tol: float = EPS_GEOM) -> bool:
    rel = pts - pts[0]
    lengths = np.linalg.norm(rel, axis=1)
    far = int(np.argmax(lengths))
    if lengths[far] <= tol:
        return True
    d = rel[far] / lengths[far]
    offsets = np.abs(rel[:, 0] * d[1] - rel[:, 1] * d[0])
    return bool(np.max(offsets) <= tol)


def _drop_collinear(ring: np.ndarray, tol: float = EPS_GEOM) -> np.ndarray:
    changed = True
    while changed and len(ring) > 3:
        changed = False
        for i in range(len(ring)):
            prev, cur, nxt = ring[i - 1], ring[i], ring[(i + 1) % len(ring)]
            edge = nxt - prev
            norm = np.linalg.norm(edge)
            cross = (cur[0] - prev[0]) * edge[1] - (cur[1] - prev[1]) * edge[0]
            if norm <= tol or abs(cross) / norm <= tol:
                ring = np.delete(ring, i, axis=0)
                changed = True
                break
    return ring


def convex_hull_2d(points: PointsLike) -> ConvexPolygon2D:
    """Convex hull, counterclockwise, starting at the lexicographically lowest vertex."""
    pts = np.unique(as_points(points, dim=2), axis=0)
    if len(pts) < 3 or _is_collinear(pts):
        raise DegenerateInput(f"convex hull needs 3 non-collinear points, got {len(pts)} distinct")

    hull = ConvexHull(pts)
    # scipy returns 2D hull vertices in counterclockwise order
    ring = _drop_collinear(pts[hull.vertices])
    start = min(range(len(ring)), key=lambda i: (ring[i][0], ring[i][1]))
    return ConvexPolygon2D.from_array(np.roll(ring, -start, axis=0))


def _rect_for_angle(pts: np.ndarray, theta: float) -> Tuple[float, np.ndarray, np.ndarray]:
    c, s = math.cos(theta), math.sin(theta)
    u = pts[:, 0] * c + pts[:, 1] * s
    v = -pts[:, 0] * s + pts[:, 1] * c
    lo = np.array([u.min(), v.min()])
    hi = np.array([u.max(), v.max()])
    extent = hi - lo
    return float(extent[0] * extent[1]), lo, hi


def min_oriented_rect(poly: ConvexPolygon2D) -> Tuple[np.ndarray, np.ndarray, float]:
    """Minimum-area enclosing rectangle by rotating calipers.

    Some optimal rectangle is flush with a hull edge, so only edge directions
    (modulo pi/2) are tried. Equal areas resolve to the smallest yaw.

    Returns:
        (center2d, half_extents2d, yaw) with yaw in [0, pi/2)
    """
    pts = poly.as_array()
    edges = np.roll(pts, -1, axis=0) - pts
    angles = np.mod(np.arctan2(edges[:, 1], edges[:, 0]), HALF_PI)
    angles[angles > HALF_PI - 1e-12] = 0.0
    candidates = np.unique(np.round(angles, 12))

    best = None
    for theta in candidates:
        area, lo, hi = _rect_for_angle(pts, float(theta))
        if best is None or area < best[0] * (1.0 - _AREA_RTOL):
            best = (area, float(theta), lo, hi)

    _, yaw, lo, hi = best
    mid_local = (lo + hi) / 2.0
    c, s = math.cos(yaw), math.sin(yaw)
    center = np.array([c * mid_local[0] - s * mid_local[1], s * mid_local[0] + c * mid_local[1]])
    return center, (hi - lo) / 2.0, yaw


def _segment_rect(xy: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """Rectangle around collinear or coincident XY points."""
    rel = xy - xy[0]
    lengths = np.linalg.norm(rel, axis=1)
    far = int(np.argmax(lengths))
    if lengths[far] <= EPS_GEOM:
        return xy.mean(axis=0), np.array([DELTA_MIN, DELTA_MIN]), 0.0
    d = rel[far] / lengths[far]
    t = rel @ d
    yaw = math.atan2(d[1], d[0])
    center = xy[0] + d * (t.min() + t.max()) / 2.0
    half = np.array([max((t.max() - t.min()) / 2.0, DELTA_MIN), DELTA_MIN])
    return center, half, yaw


def fit_min_oriented_box(points: PointsLike) -> OrientedBox:
    """Minimum yaw-only box containing all points.

    Degenerate clouds (a point, a segment or a vertical patch) get their
    missing extents inflated to DELTA_MIN.
    """
    pts = as_points(points)
    if len(pts) == 0:
        raise DegenerateInput("cannot fit a box to an empty point set")
    xy = pts[:, :2]
    try:
        center, half, yaw = min_oriented_rect(convex_hull_2d(xy))
    except DegenerateInput:
        center, half, yaw = _segment_rect(xy)

    z_lo, z_hi = float(pts[:, 2].min()), float(pts[:, 2].max())
    hz = max((z_hi - z_lo) / 2.0, DELTA_MIN)
    box = OrientedBox(
        Point3(float(center[0]), float(center[1]), (z_lo + z_hi) / 2.0),
        (max(float(half[0]), DELTA_MIN), max(float(half[1]), DELTA_MIN), hz),
        yaw,
    )
    return box.normalized()


def plane_normal(vertices: PointsLike) -> np.ndarray:
    """Unit normal of the best-fit plane through 3D vertices."""
    pts = as_points(vertices)
    if len(pts) < 3:
        raise DegenerateInput(f"a plane needs at least 3 vertices, got {len(pts)}")
    centered = pts - pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    if sv[1] <= EPS_GEOM:
        raise DegenerateInput("surface vertices are collinear")
    normal = vt[-1]
    return normal / np.linalg.norm(normal)


def floor_slab(vertices: PointsLike, thickness: float) -> OrientedBox:
    """Floor polygon thickened downward below its highest vertex."""
    pts = as_points(vertices)
    try:
        center, half, yaw = min_oriented_rect(convex_hull_2d(pts[:, :2]))
    except DegenerateInput:
        center, half, yaw = _segment_rect(pts[:, :2])
    top = float(pts[:, 2].max())
    box = OrientedBox(
        Point3(float(center[0]), float(center[1]), top - thickness / 2.0),
        (max(float(half[0]), DELTA_MIN), max(float(half[1]), DELTA_MIN), thickness / 2.0),
        yaw,
    )
    return box.normalized()


def wall_slab(vertices: PointsLike, thickness: float, observer: Optional[Point3] = None) -> OrientedBox:
    """Wall polygon thickened on the side facing away from the observer.

    The observed face stays where the sensor saw it, so objects mounted on
    the wall touch the slab without penetrating it.
    """
    pts = as_points(vertices)
    xy = pts[:, :2]
    mean = xy.mean(axis=0)
    _, _, vt = np.linalg.svd(xy - mean, full_matrices=False)
    direction = vt[0] / np.linalg.norm(vt[0])
    normal = np.array([-direction[1], direction[0]])

    t = (xy - mean) @ direction
    n = (xy - mean) @ normal
    if observer is not None and float((observer.xy - mean) @ normal) > 0.0:
        normal, n = -normal, -n

    n_lo, n_hi = float(n.min()), float(n.max()) + thickness
    t_mid = (float(t.min()) + float(t.max())) / 2.0
    center_xy = mean + direction * t_mid + normal * (n_lo + n_hi) / 2.0
    z_lo, z_hi = float(pts[:, 2].min()), float(pts[:, 2].max())
    box = OrientedBox(
        Point3(float(center_xy[0]), float(center_xy[1]), (z_lo + z_hi) / 2.0),
        (
            max((float(t.max()) - float(t.min())) / 2.0, DELTA_MIN),
            (n_hi - n_lo) / 2.0,
            max((z_hi - z_lo) / 2.0, DELTA_MIN),
        ),
        math.atan2(direction[1], direction[0]),
    )
    return box.normalized()
