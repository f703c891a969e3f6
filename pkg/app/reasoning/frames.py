"""Frames of reference and the Contextualised Bounding Box (CBB).

Every frame is right-handed with Z opposite to gravity, so a frame is fully
described by an origin and the yaw of its X axis in the global frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from app.geometry.algebra import rotate_box_about_axis
from app.geometry.primitives import (
    EPS_GEOM,
    HALF_PI,
    ORIGIN,
    OrientedBox,
    Point3,
    normalize_angle,
)
from app.utils.errors import DegenerateViewpoint

# angular tolerance for the pi/4 tie between CBB candidates
EPS_ANGLE = 1e-9


class FrameKind(str, Enum):
    GLOBAL = "global"
    ROBOT = "robot"
    VIEWPOINT = "viewpoint"
    INTRINSIC = "intrinsic"
    CONTEXTUALISED = "contextualised"


@dataclass(frozen=True)
class FrameOfReference:
    origin: Point3
    yaw: float
    kind: FrameKind

    def __post_init__(self):
        object.__setattr__(self, "yaw", normalize_angle(float(self.yaw)))
        object.__setattr__(self, "kind", FrameKind(self.kind))

    def x_axis(self) -> np.ndarray:
        return np.array([math.cos(self.yaw), math.sin(self.yaw)])

    def y_axis(self) -> np.ndarray:
        return np.array([-math.sin(self.yaw), math.cos(self.yaw)])

    def to_local(self, points: np.ndarray) -> np.ndarray:
        """Express global points (N, 3) in this frame."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        rel = pts - self.origin.as_array()
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        out = np.empty_like(rel)
        out[:, 0] = c * rel[:, 0] + s * rel[:, 1]
        out[:, 1] = -s * rel[:, 0] + c * rel[:, 1]
        out[:, 2] = rel[:, 2]
        return out


GLOBAL_FRAME = FrameOfReference(ORIGIN, 0.0, FrameKind.GLOBAL)


@dataclass(frozen=True)
class RobotPose:
    position: Point3
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(float(self.heading)))


def robot_frame(pose: RobotPose) -> FrameOfReference:
    return FrameOfReference(pose.position, pose.heading, FrameKind.ROBOT)


def intrinsic_frame(min_box: OrientedBox) -> FrameOfReference:
    """Centred on the object, aligned with its minimum box."""
    return FrameOfReference(min_box.center, min_box.yaw, FrameKind.INTRINSIC)


def robot_viewpoint(pose: RobotPose, object_centroid: Point3) -> FrameOfReference:
    """The robot frame turned about Z so X points at the object centroid.

    Raises:
        DegenerateViewpoint: the centroid is straight above or below the robot.
    """
    dx = object_centroid.x - pose.position.x
    dy = object_centroid.y - pose.position.y
    if math.hypot(dx, dy) < EPS_GEOM:
        raise DegenerateViewpoint(
            f"object centroid {object_centroid.as_tuple()} is vertically collocated with the robot"
        )
    return FrameOfReference(pose.position, math.atan2(dy, dx), FrameKind.VIEWPOINT)


def contextualised_frame(viewpoint: FrameOfReference, object_centroid: Point3) -> FrameOfReference:
    """Viewpoint orientation translated to the object centroid.

    A robot frame is accepted in place of a viewpoint for the degenerate case
    where no sight line exists.
    """
    if viewpoint.kind not in (FrameKind.VIEWPOINT, FrameKind.ROBOT):
        raise ValueError(f"contextualised frame needs a viewpoint frame, got {viewpoint.kind.value}")
    return FrameOfReference(object_centroid, viewpoint.yaw, FrameKind.CONTEXTUALISED)


def relative_yaw(box: OrientedBox, frame: FrameOfReference) -> float:
    """yaw(box, frame) reduced modulo pi/2, in [0, pi/2)."""
    phi = math.fmod(normalize_angle(box.yaw - frame.yaw), HALF_PI)
    return 0.0 if phi >= HALF_PI - 1e-15 else phi


def alignment_error(box: OrientedBox, frame: FrameOfReference) -> float:
    """Angular distance between the box axes and the nearest frame axis."""
    phi = relative_yaw(box, frame)
    return min(phi, HALF_PI - phi)


def cbb_rotation(min_box: OrientedBox, fc: FrameOfReference) -> float:
    """Signed rotation of smallest magnitude aligning the box with the frame modulo pi/2.

    Of the four aligning candidates the two nearest zero are -phi and
    pi/2 - phi; at phi = pi/4 the counterclockwise one wins.
    """
    phi = relative_yaw(min_box, fc)
    if phi < math.pi / 4.0 - EPS_ANGLE:
        return -phi
    return HALF_PI - phi


def build_cbb(min_box: OrientedBox, fc: FrameOfReference) -> OrientedBox:
    if fc.kind is not FrameKind.CONTEXTUALISED:
        raise ValueError(f"CBB needs a contextualised frame, got {fc.kind.value}")
    if math.hypot(fc.origin.x - min_box.center.x, fc.origin.y - min_box.center.y) > EPS_GEOM:
        raise ValueError("contextualised frame origin must sit on the box centroid")
    return rotate_box_about_axis(min_box, fc.origin, cbb_rotation(min_box, fc))
