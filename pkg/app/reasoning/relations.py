"""Metric, topological and directional relations between scene objects.

Relations are evaluated on fitted minimum boxes. Directional relations read
"figure o2 relative to reference o1": intrinsic-frame cardinal relations use
the halfspaces of o1's minimum box, viewpoint relations use the top
and bottom halfspaces of the minimum box and the lateral halfspaces of the
CBB built for the current robot pose.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.geometry.algebra import box_distance, box_intersection_volume, intersection_prism
from app.geometry.primitives import EPS_VOL, OrientedBox, Prism
from app.reasoning.frames import (
    FrameKind,
    FrameOfReference,
    RobotPose,
    build_cbb,
    contextualised_frame,
    intrinsic_frame,
    robot_frame,
    robot_viewpoint,
)
from app.reasoning.halfspaces import (
    BACK,
    FRONT,
    LEFT,
    RIGHT,
    VERTICAL_AXES,
    HalfspaceSet,
    SemiAxis,
    halfspaces_of,
    lateral_halfspaces_of_cbb,
)
from app.scene.model import FrameNote, SceneObject
from app.utils.errors import DegenerateViewpoint
from app.utils.logger import log_event

Region = Union[SceneObject, OrientedBox]


class RelationConfig(BaseModel):
    """Thresholds the relation predicates read; lengths in metres."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    closeness_T: float = Field(default=0.5, gt=0, allow_inf_nan=False)
    touch_eps: float = Field(default=0.01, gt=0, allow_inf_nan=False)
    halfspace_scale_s: float = Field(default=2.0, gt=0, allow_inf_nan=False)
    containment_tol: float = Field(default=1e-3, gt=0, lt=1)
    adjacency_delta: float = Field(default=0.02, gt=0, allow_inf_nan=False)

    @model_validator(mode="after")
    def _check_thresholds(self):
        if self.closeness_T < self.touch_eps:
            raise ValueError(
                f"closeness_T ({self.closeness_T}) must be >= touch_eps ({self.touch_eps})"
            )
        return self


DEFAULT_RELATION_CONFIG = RelationConfig()


class Strictness(str, Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


class CardinalTag(str, Enum):
    EAST = "East"
    WEST = "West"
    NORTH = "North"
    SOUTH = "South"
    ABOVE = "Above"
    BELOW = "Below"


class ViewTag(str, Enum):
    ABOVE = "Above"
    BELOW = "Below"
    LEFT_OF = "LeftOf"
    RIGHT_OF = "RightOf"
    IN_FRONT_OF = "InFrontOf"
    BEHIND = "Behind"


class MetricTag(str, Enum):
    TOUCHES = "Touches"
    NEAR = "Near"
    INTERSECTS = "Intersects"


CARDINAL_AXES = {
    CardinalTag.EAST: SemiAxis.X_POS,
    CardinalTag.WEST: SemiAxis.X_NEG,
    CardinalTag.NORTH: SemiAxis.Y_POS,
    CardinalTag.SOUTH: SemiAxis.Y_NEG,
    CardinalTag.ABOVE: SemiAxis.Z_POS,
    CardinalTag.BELOW: SemiAxis.Z_NEG,
}

VIEW_AXES = {
    ViewTag.ABOVE: SemiAxis.Z_POS,
    ViewTag.BELOW: SemiAxis.Z_NEG,
    ViewTag.LEFT_OF: LEFT,
    ViewTag.RIGHT_OF: RIGHT,
    ViewTag.IN_FRONT_OF: FRONT,
    ViewTag.BEHIND: BACK,
}


def box_of(o: Region) -> OrientedBox:
    return o if isinstance(o, OrientedBox) else o.box


def object_distance(o1: Region, o2: Region) -> float:
    return box_distance(box_of(o1), box_of(o2))


def is_close(o1: Region, o2: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> bool:
    return object_distance(o1, o2) <= cfg.closeness_T


def touches(o1: Region, o2: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> bool:
    # penetrating boxes have distance 0 and therefore touch
    return object_distance(o1, o2) <= cfg.touch_eps


def intersection_volume(o1: Region, o2: Region) -> float:
    return box_intersection_volume(box_of(o1), box_of(o2))


def intersects(o1: Region, o2: Region) -> bool:
    return intersection_volume(o1, o2) > EPS_VOL


def intersection_region(o1: Region, o2: Region) -> Optional[Prism]:
    """inter(o1, o2) as a clipped prism, None when the solids do not overlap."""
    return intersection_prism(box_of(o1), box_of(o2))


def completely_contains(o1: Region, o2: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> bool:
    """True when o1 contains o2, by comparing the overlap with o2's volume."""
    inner = box_of(o2)
    return intersection_volume(o1, inner) >= (1.0 - cfg.containment_tol) * inner.volume


def _in_region(region: OrientedBox, o2: Region, strictness: Strictness, cfg: RelationConfig) -> bool:
    if strictness is Strictness.STRICT:
        return completely_contains(region, o2, cfg)
    return intersects(region, o2)


def directional_fo(
    o2: Region,
    o1: Region,
    frame: Optional[FrameOfReference],
    tag: CardinalTag,
    strictness: Strictness = Strictness.RELAXED,
    cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
) -> bool:
    """Cardinal relation of o2 w.r.t. o1 in o1's intrinsic frame.

    Relaxed: o2 meets the tagged halfspace; strict: the halfspace contains o2.
    """
    ref = box_of(o1)
    frame = frame or intrinsic_frame(ref)
    axis = CARDINAL_AXES[CardinalTag(tag)]
    hs = halfspaces_of(ref, frame, cfg.halfspace_scale_s, (axis,))
    return _in_region(hs.region(axis), o2, Strictness(strictness), cfg)


@dataclass(frozen=True)
class ViewContext:
    """Everything needed to read viewpoint relations against one reference."""

    reference: Region
    fc: FrameOfReference
    cbb: OrientedBox
    lateral: HalfspaceSet
    vertical: HalfspaceSet
    frame_note: FrameNote = FrameNote.CONTEXTUALISED

    @classmethod
    def from_frame(cls, reference: Region, fc: FrameOfReference, cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
                   frame_note: FrameNote = FrameNote.CONTEXTUALISED) -> "ViewContext":
        min_box = box_of(reference)
        cbb = build_cbb(min_box, fc)
        return cls(
            reference=reference,
            fc=fc,
            cbb=cbb,
            lateral=lateral_halfspaces_of_cbb(cbb, fc, cfg.halfspace_scale_s),
            vertical=halfspaces_of(min_box, intrinsic_frame(min_box), cfg.halfspace_scale_s, VERTICAL_AXES),
            frame_note=frame_note,
        )

    @classmethod
    def for_pose(cls, reference: Region, pose: RobotPose, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> "ViewContext":
        """Build the viewpoint, contextualised frame and CBB of `reference` for a robot pose.

        With the robot straight above or below the centroid there is no sight
        line; the robot frame itself is used and the context is flagged.
        """
        centroid = box_of(reference).center
        note = FrameNote.CONTEXTUALISED
        try:
            viewpoint = robot_viewpoint(pose, centroid)
        except DegenerateViewpoint as e:
            log_event("DEGENERATE_VIEWPOINT", f"{getattr(reference, 'id', 'box')}: {e.message}", "warning")
            viewpoint = robot_frame(pose)
            note = FrameNote.DEGENERATE_VIEWPOINT
        return cls.from_frame(reference, contextualised_frame(viewpoint, centroid), cfg, note)

    def region_axis(self, tag: ViewTag) -> str:
        return VIEW_AXES[ViewTag(tag)].value

    def region(self, tag: ViewTag) -> OrientedBox:
        axis = VIEW_AXES[ViewTag(tag)]
        if axis in VERTICAL_AXES:
            return self.vertical.region(axis)
        return self.lateral.region(axis)

    def holds(self, o2: Region, tag: ViewTag, cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
              _strict: bool = False) -> bool:
        strictness = Strictness.STRICT if _strict else Strictness.RELAXED
        return _in_region(self.region(tag), o2, strictness, cfg)


def directional_fc(
    o2: Region,
    o1: Region,
    fc: FrameOfReference,
    tag: ViewTag,
    cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
) -> bool:
    """Viewpoint relation of o2 w.r.t. o1 (relaxed reading)."""
    if fc.kind is not FrameKind.CONTEXTUALISED:
        raise ValueError(f"viewpoint relations need a contextualised frame, got {fc.kind.value}")
    return ViewContext.from_frame(o1, fc, cfg).holds(o2, tag, cfg)
