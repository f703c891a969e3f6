"""Scene file schema (JSON, versioned).

    {
      "schema_version": 1,
      "units": {"length": "m", "angle": "rad"},          optional
      "robot_pose": {"x": 0, "y": 0, "z": 1.2, "heading": 0},
      "objects": [
        {"id": "...", "labels": [{"label": "mug", "confidence": 0.9}],
         exactly one of:
         "points": [[x, y, z], ...],
         "box": {"center": [x, y, z], "half_extents": [hx, hy, hz], "yaw": 0.0},
         "surface": {"kind": "wall" | "floor", "polygon": [[x, y, z], ...]}}
      ]
    }

Strict loads reject unknown fields and every implicit coercion (numeric
strings, booleans as numbers); lenient loads accept both.

Labels hold at most five hypotheses with confidences in [0, 1], listed in
descending order of confidence. Lengths are metres and angles radians.
"""
from typing import Annotated, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

SUPPORTED_SCHEMA_VERSIONS = (1,)

# strict validation accepts JSON arrays only as lists, never as tuples
Vec3 = Annotated[List[float], Field(min_length=3, max_length=3)]


class _Record(BaseModel):
    # unknown fields are kept so strict loading can report them by path
    model_config = ConfigDict(extra="allow")


class UnitsRecord(_Record):
    length: Literal["m"] = "m"
    angle: Literal["rad"] = "rad"


class PoseRecord(_Record):
    x: float
    y: float
    z: float = 0.0
    heading: float


class LabelRecord(_Record):
    label: str = Field(min_length=1)
    confidence: float = Field(ge=0.0, le=1.0)


class BoxRecord(_Record):
    center: Vec3
    half_extents: Vec3
    yaw: float = 0.0

    @field_validator("half_extents")
    @classmethod
    def _positive(cls, value):
        if min(value) <= 0.0:
            raise ValueError("half extents must be strictly positive")
        return value


class SurfaceRecord(_Record):
    kind: Literal["wall", "floor"]
    polygon: List[Vec3] = Field(min_length=3)


class ObjectRecord(_Record):
    id: str = Field(min_length=1)
    labels: List[LabelRecord] = Field(default_factory=list, max_length=5)
    points: Optional[List[Vec3]] = Field(default=None, min_length=1)
    box: Optional[BoxRecord] = None
    surface: Optional[SurfaceRecord] = None

    @field_validator("labels")
    @classmethod
    def _descending(cls, value):
        confidences = [item.confidence for item in value]
        if confidences != sorted(confidences, reverse=True):
            raise ValueError("label confidences must be in descending order")
        return value

    @model_validator(mode="after")
    def _one_geometry(self):
        given = [name for name in ("points", "box", "surface") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one of points/box/surface is required, got {given or 'none'}")
        return self


class SceneFile(_Record):
    schema_version: int
    units: UnitsRecord = Field(default_factory=UnitsRecord)
    robot_pose: PoseRecord
    objects: List[ObjectRecord] = Field(default_factory=list)


def unknown_fields(record: BaseModel, path: str = "") -> List[str]:
    """Dotted paths of every field the schema does not define."""
    found = [f"{path}.{key}" if path else key for key in (record.model_extra or {})]
    for name in type(record).model_fields:
        value = getattr(record, name)
        child = f"{path}.{name}" if path else name
        if isinstance(value, BaseModel):
            found.extend(unknown_fields(value, child))
        elif isinstance(value, list):
            for i, item in enumerate(value):
                if isinstance(item, BaseModel):
                    found.extend(unknown_fields(item, f"{child}[{i}]"))
    return found
