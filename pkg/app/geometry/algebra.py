"""Distance, intersection and rigid-motion algebra over yaw-only solids.

Both boxes and prisms are products of a convex XY footprint and a Z
interval, so distances split into an XY part and a Z part, and
intersections into a footprint clip times a Z overlap.
"""
from __future__ import annotations

import math
from typing import Optional, Tuple

from shapely import affinity

from app.geometry.primitives import ConvexPolygon2D, OrientedBox, Point3, Prism


def _canonical_pair(a: OrientedBox, b: OrientedBox) -> Tuple[OrientedBox, OrientedBox]:
    # fixed argument order keeps symmetric operations bit-identical
    key_a = (a.center.as_tuple(), a.half_extents, a.yaw)
    key_b = (b.center.as_tuple(), b.half_extents, b.yaw)
    return (a, b) if key_a <= key_b else (b, a)


def _z_gap(lo1: float, hi1: float, lo2: float, hi2: float) -> float:
    return max(0.0, lo2 - hi1, lo1 - hi2)


def _z_overlap(lo1: float, hi1: float, lo2: float, hi2: float) -> float:
    return max(0.0, min(hi1, hi2) - max(lo1, lo2))


def prism_distance(p: Prism, q: Prism) -> float:
    dxy = float(p.shape.distance(q.shape))
    dz = _z_gap(p.z_min, p.z_max, q.z_min, q.z_max)
    return math.hypot(dxy, dz)


def box_distance(a: OrientedBox, b: OrientedBox) -> float:
    """Minimum Euclidean distance between two solid boxes; 0 when they meet."""
    a, b = _canonical_pair(a, b)
    return prism_distance(a.to_prism(), b.to_prism())


def prism_overlap_volume(p: Prism, q: Prism) -> float:
    dz = _z_overlap(p.z_min, p.z_max, q.z_min, q.z_max)
    if dz <= 0.0:
        return 0.0
    return float(p.shape.intersection(q.shape).area) * dz


def box_intersection_volume(a: OrientedBox, b: OrientedBox) -> float:
    a, b = _canonical_pair(a, b)
    return prism_overlap_volume(a.to_prism(), b.to_prism())


def prism_intersection(p: Prism, q: Prism) -> Optional[Prism]:
    """Intersection solid, or None when the overlap has no volume."""
    lo, hi = max(p.z_min, q.z_min), min(p.z_max, q.z_max)
    if hi <= lo:
        return None
    clipped = p.shape.intersection(q.shape)
    if clipped.geom_type != "Polygon" or clipped.is_empty or clipped.area <= 0.0:
        return None
    try:
        footprint = ConvexPolygon2D.from_shapely(clipped)
    except Exception:
        return None
    return Prism(footprint, lo, hi)


def intersection_prism(a: OrientedBox, b: OrientedBox) -> Optional[Prism]:
    a, b = _canonical_pair(a, b)
    return prism_intersection(a.to_prism(), b.to_prism())


def scale_prism(p: Prism, factor: float) -> Prism:
    """Scale a prism about its centroid, uniformly in all three axes."""
    scaled = affinity.scale(p.shape, xfact=factor, yfact=factor, origin="centroid")
    mid, half = 0.5 * (p.z_min + p.z_max), 0.5 * p.height * factor
    return Prism(ConvexPolygon2D.from_shapely(scaled), mid - half, mid + half)


def rotate_box_about_axis(b: OrientedBox, origin: Point3, theta: float) -> OrientedBox:
    """Rigid rotation by theta about the vertical line through origin."""
    if theta == 0.0:
        return b
    c, s = math.cos(theta), math.sin(theta)
    dx, dy = b.center.x - origin.x, b.center.y - origin.y
    center = Point3(origin.x + c * dx - s * dy, origin.y + s * dx + c * dy, b.center.z)
    return OrientedBox(center, b.half_extents, b.yaw + theta)
