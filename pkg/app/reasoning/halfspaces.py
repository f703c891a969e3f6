"""Face-extruded halfspace regions of a box.

A halfspace here is a finite prism flush against one face of the source box,
with the face's cross-section and a depth of `s` times the box's full extent
along that axis. Lateral halfspaces are laid along the axes of the given
frame; top and bottom ones follow the box itself and ignore the frame, so no
viewpoint changes them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from app.geometry.primitives import OrientedBox, Point3
from app.reasoning.frames import FrameOfReference

DEFAULT_SCALE = 2.0


class SemiAxis(str, Enum):
    X_POS = "X+"
    X_NEG = "X-"
    Y_POS = "Y+"
    Y_NEG = "Y-"
    Z_POS = "Z+"
    Z_NEG = "Z-"


LATERAL_AXES = (SemiAxis.X_POS, SemiAxis.X_NEG, SemiAxis.Y_POS, SemiAxis.Y_NEG)
VERTICAL_AXES = (SemiAxis.Z_POS, SemiAxis.Z_NEG)
ALL_AXES = LATERAL_AXES + VERTICAL_AXES

# contextualised-frame reading of the lateral semi-axes; X_c points away from the robot
FRONT = SemiAxis.X_NEG
BACK = SemiAxis.X_POS
LEFT = SemiAxis.Y_POS
RIGHT = SemiAxis.Y_NEG


@dataclass(frozen=True)
class HalfspaceSet:
    source_box: OrientedBox
    frame: FrameOfReference
    scale: float
    regions: Mapping[SemiAxis, OrientedBox]

    def region(self, axis: SemiAxis) -> OrientedBox:
        return self.regions[SemiAxis(axis)]

    def __contains__(self, axis) -> bool:
        return SemiAxis(axis) in self.regions


def _shift(center: Point3, offset: np.ndarray) -> Point3:
    return Point3(center.x + float(offset[0]), center.y + float(offset[1]), center.z + float(offset[2]))


def _lateral_region(aligned: OrientedBox, frame: FrameOfReference, axis: SemiAxis, s: float) -> OrientedBox:
    ex, ey, ez = aligned.half_extents
    if axis in (SemiAxis.X_POS, SemiAxis.X_NEG):
        sign = 1.0 if axis is SemiAxis.X_POS else -1.0
        direction, face, half_depth = frame.x_axis(), ex, ex * s
        half = (half_depth, ey, ez)
    else:
        sign = 1.0 if axis is SemiAxis.Y_POS else -1.0
        direction, face, half_depth = frame.y_axis(), ey, ey * s
        half = (ex, half_depth, ez)
    # near bound on the face, far bound one full depth beyond it
    unit = np.array([direction[0], direction[1], 0.0]) * sign
    face_center = _shift(aligned.center, unit * face)
    return OrientedBox(_shift(face_center, unit * half_depth), half, frame.yaw)


def _vertical_region(box: OrientedBox, axis: SemiAxis, s: float) -> OrientedBox:
    half_depth = box.hz * s
    if axis is SemiAxis.Z_POS:
        center_z = box.z_max + half_depth
    else:
        center_z = box.z_min - half_depth
    center = Point3(box.center.x, box.center.y, center_z)
    return OrientedBox(center, (box.hx, box.hy, half_depth), box.yaw)


def halfspaces_of(
    box: OrientedBox,
    frame: FrameOfReference,
    s: float = DEFAULT_SCALE,
    axes: Iterable[SemiAxis] = ALL_AXES,
) -> HalfspaceSet:
    """Extruded halfspaces of `box` for the requested semi-axes of `frame`.

    Raises:
        MisalignedBox: a lateral halfspace was requested and the box is not
            aligned with `frame` modulo pi/2.
    """
    if not (s > 0.0 and math.isfinite(s)):
        raise ValueError(f"halfspace scale must be a positive number, got {s}")
    axes = tuple(SemiAxis(a) for a in axes)

    regions = {}
    if any(a in LATERAL_AXES for a in axes):
        aligned = box.aligned_to(frame.yaw)
        for axis in axes:
            if axis in LATERAL_AXES:
                regions[axis] = _lateral_region(aligned, frame, axis, s)
    for axis in axes:
        if axis in VERTICAL_AXES:
            regions[axis] = _vertical_region(box, axis, s)
    return HalfspaceSet(box, frame, s, MappingProxyType(regions))


def lateral_halfspaces_of_cbb(cbb: OrientedBox, fc: FrameOfReference, s: float = DEFAULT_SCALE) -> HalfspaceSet:
    """Front (X-), back (X+), left (Y+) and right (Y-) regions of a CBB."""
    return halfspaces_of(cbb, fc, s, LATERAL_AXES)
