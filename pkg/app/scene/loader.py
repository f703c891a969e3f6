import json
import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.config import EngineConfig
from app.geometry.envelope import fit_min_oriented_box, floor_slab, plane_normal, wall_slab
from app.geometry.primitives import OrientedBox, Point3
from app.reasoning.frames import RobotPose
from app.scene.model import Scene, SceneObject, SurfaceKind
from app.scene.schema import SUPPORTED_SCHEMA_VERSIONS, ObjectRecord, SceneFile, unknown_fields
from app.utils.errors import DegenerateInput, ParseError, UnitError, ValidationError
from app.utils.logger import log_event

FLOOR_MIN_NZ = math.cos(math.radians(15.0))
WALL_MAX_NZ = math.sin(math.radians(15.0))


def _loc(parts) -> str:
    out = ""
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else (f".{p}" if out else str(p))
    return out or "scene"


def _check_finite(value: Any, where: str):
    if isinstance(value, float) and not math.isfinite(value):
        raise UnitError(f"non-finite value {value!r}", location=where)
    if isinstance(value, dict):
        for k, v in value.items():
            _check_finite(v, f"{where}.{k}" if where else str(k))
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            _check_finite(v, f"{where}[{i}]")


def classify_surface(polygon) -> SurfaceKind:
    """Floor or wall from the orientation of the polygon's normal."""
    nz = abs(float(plane_normal(polygon)[2]))
    if nz > FLOOR_MIN_NZ:
        return SurfaceKind.FLOOR
    if nz < WALL_MAX_NZ:
        return SurfaceKind.WALL
    raise ValidationError(f"surface normal z-component {nz:.3f} is neither floor-like nor wall-like")


def _build_object(record: ObjectRecord, index: int, pose: RobotPose, tau: float) -> SceneObject:
    where = f"objects[{index}]"
    labels = tuple((lab.label, lab.confidence) for lab in record.labels)
    try:
        if record.points is not None:
            points = np.asarray(record.points, dtype=float)
            return SceneObject(record.id, fit_min_oriented_box(points), labels, SurfaceKind.SOLID, points=points)

        if record.box is not None:
            box = OrientedBox(Point3.from_seq(record.box.center), tuple(record.box.half_extents), record.box.yaw)
            return SceneObject(record.id, box, labels, SurfaceKind.SOLID)

        polygon = tuple(tuple(float(c) for c in v) for v in record.surface.polygon)
        declared = SurfaceKind(record.surface.kind)
        measured = classify_surface(polygon)
        if measured is not declared:
            raise ValidationError(f"surface declared as {declared.value} but its normal says {measured.value}")
        if declared is SurfaceKind.FLOOR:
            box = floor_slab(polygon, tau)
        else:
            box = wall_slab(polygon, tau, observer=pose.position)
        return SceneObject(record.id, box, labels, declared, polygon=polygon)
    except (ValidationError, UnitError) as e:
        raise type(e)(e.message, location=f"{where} ({record.id})") from e
    except DegenerateInput as e:
        raise ValidationError(e.message, location=f"{where} ({record.id})") from e


def scene_from_dict(data: Dict[str, Any], strict: bool = True, cfg: Optional[EngineConfig] = None) -> Scene:
    cfg = cfg or EngineConfig()
    if not isinstance(data, dict):
        raise ValidationError("scene must be a JSON object")
    _check_finite(data, "")

    version = data.get("schema_version")
    if version not in SUPPORTED_SCHEMA_VERSIONS:
        raise ValidationError(
            f"unsupported schema_version {version!r}; supported: {list(SUPPORTED_SCHEMA_VERSIONS)}",
            location="schema_version",
        )

    try:
        parsed = SceneFile.model_validate(data, strict=strict)
    except PydanticValidationError as e:
        first = e.errors()[0]
        raise ValidationError(first.get("msg", "invalid scene"), location=_loc(first.get("loc", ()))) from e

    if strict:
        extra = unknown_fields(parsed)
        if extra:
            raise ValidationError(f"unknown fields: {', '.join(extra)}", location=extra[0])

    seen: Dict[str, int] = {}
    for i, record in enumerate(parsed.objects):
        if record.id in seen:
            raise ValidationError(
                f"duplicate id {record.id!r} (first used by objects[{seen[record.id]}])",
                location=f"objects[{i}].id",
            )
        seen[record.id] = i

    p = parsed.robot_pose
    pose = RobotPose(Point3(p.x, p.y, p.z), p.heading)
    objects = [_build_object(record, i, pose, cfg.plane_thickness_tau) for i, record in enumerate(parsed.objects)]
    return Scene(tuple(objects), pose, parsed.schema_version)


def load_scene(path: str, strict: bool = True, cfg: Optional[EngineConfig] = None) -> Scene:
    """Read, validate and fit a scene file.

    Raises:
        ParseError: unreadable file or malformed JSON (with line and column).
        ValidationError: schema or invariant breach, duplicate ids.
        UnitError: non-finite numbers.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read scene: {e}", location=path) from e

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, location=f"{path}:{e.lineno}:{e.colno}") from e

    try:
        scene = scene_from_dict(data, strict=strict, cfg=cfg)
    except (ValidationError, UnitError) as e:
        location = f"{path}: {e.location}" if e.location else path
        raise type(e)(e.message, location=location) from e

    log_event("SCENE_LOAD", f"Loaded {len(scene)} objects from {path}")
    return scene


def _vec(values) -> List[float]:
    return [float(v) for v in values]


def object_record(obj: SceneObject) -> Dict[str, Any]:
    record: Dict[str, Any] = {"id": obj.id}
    if obj.labels:
        record["labels"] = [{"label": l, "confidence": c} for l, c in obj.labels]
    if obj.is_surface and obj.polygon is not None:
        record["surface"] = {"kind": obj.surface_kind.value, "polygon": [_vec(v) for v in obj.polygon]}
    elif obj.points is not None:
        record["points"] = [_vec(p) for p in obj.points]
    else:
        record["box"] = box_record(obj.box)
    return record


def box_record(box: OrientedBox) -> Dict[str, Any]:
    return {"center": _vec(box.center.as_tuple()), "half_extents": _vec(box.half_extents), "yaw": float(box.yaw)}


def dump_scene(scene: Scene) -> Dict[str, Any]:
    pose = scene.robot_pose
    return {
        "schema_version": scene.schema_version,
        "units": {"length": "m", "angle": "rad"},
        "robot_pose": {"x": pose.position.x, "y": pose.position.y, "z": pose.position.z, "heading": pose.heading},
        "objects": [object_record(o) for o in scene.objects],
    }


def save_scene(scene: Scene, path: str):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(dump_scene(scene), fh, indent=2, sort_keys=True)
        fh.write("\n")
