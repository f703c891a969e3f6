"""Runtime scene types: labelled objects, scenes and relation triples."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from app.geometry.primitives import OrientedBox, Point3
from app.reasoning.frames import RobotPose

MAX_LABELS = 5


class SurfaceKind(str, Enum):
    SOLID = "solid"
    WALL = "wall"
    FLOOR = "floor"


class FrameNote(str, Enum):
    CONTEXTUALISED = "contextualised"
    INTRINSIC = "intrinsic"
    GLOBAL = "global"
    DEGENERATE_VIEWPOINT = "degenerate-viewpoint"


def make_object_id(timestamp: str, index: int) -> str:
    """Identifier made of the collection timestamp and an incremental digit."""
    return f"{timestamp}{index}"


@dataclass(frozen=True)
class SceneObject:
    id: str
    box: OrientedBox
    labels: Tuple[Tuple[str, float], ...] = ()
    surface_kind: SurfaceKind = SurfaceKind.SOLID
    points: Optional[np.ndarray] = field(default=None, compare=False, repr=False)
    polygon: Optional[Tuple[Tuple[float, float, float], ...]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "surface_kind", SurfaceKind(self.surface_kind))
        object.__setattr__(self, "labels", tuple((str(l), float(c)) for l, c in self.labels))

    @property
    def is_surface(self) -> bool:
        return self.surface_kind is not SurfaceKind.SOLID

    @property
    def volume(self) -> float:
        return self.box.volume

    @property
    def centroid(self) -> Point3:
        return self.box.center

    @property
    def label(self) -> str:
        return self.labels[0][0] if self.labels else self.id


@dataclass(frozen=True)
class Scene:
    objects: Tuple[SceneObject, ...]
    robot_pose: RobotPose
    schema_version: int = 1

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))

    def by_id(self) -> Dict[str, SceneObject]:
        return {o.id: o for o in self.objects}

    def get(self, object_id: str) -> SceneObject:
        return self.by_id()[object_id]

    @property
    def surfaces(self) -> Tuple[SceneObject, ...]:
        return tuple(o for o in self.objects if o.is_surface)

    @property
    def solids(self) -> Tuple[SceneObject, ...]:
        return tuple(o for o in self.objects if not o.is_surface)

    def __len__(self) -> int:
        return len(self.objects)


@dataclass(frozen=True)
class RelationTriple:
    figure_id: str
    relation: str
    reference_id: str
    frame_note: FrameNote = FrameNote.GLOBAL
    audit: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "frame_note", FrameNote(self.frame_note))
        object.__setattr__(self, "audit", tuple(self.audit))

    def sort_key(self) -> Tuple[str, str, str, str]:
        return (self.reference_id, self.figure_id, self.relation, self.frame_note.value)

    def as_tuple(self) -> Tuple[str, str, str]:
        return (self.figure_id, self.relation, self.reference_id)
