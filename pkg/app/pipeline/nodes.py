from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from app.pipeline.state import ExtractionState
from app.reasoning.commonsense import (
    CommonsenseTag,
    affixed_on,
    beside,
    inside,
    leans_on,
    on_top_of,
    part_in,
)
from app.reasoning.relations import (
    CardinalTag,
    MetricTag,
    RelationConfig,
    Strictness,
    ViewContext,
    ViewTag,
    directional_fo,
    intersects,
    object_distance,
)
from app.scene.model import FrameNote, RelationTriple, Scene, SceneObject
from app.utils.formatters import filter_triples, sort_triples
from app.utils.logger import log_event, log_pipeline_step


def select_references(scene: Scene) -> List[SceneObject]:
    """Walls and floors first, then solids by descending volume; ties by id."""
    def key(o: SceneObject):
        return (0 if o.is_surface else 1, -o.volume, o.id)

    return sorted(scene.objects, key=key)


def figures_for(order: Sequence[SceneObject], index: int) -> List[SceneObject]:
    """Solids that may be located against order[index] in figure-reference form."""
    reference = order[index]
    if reference.is_surface:
        return [o for o in order if not o.is_surface]
    return [o for o in order[index + 1:] if not o.is_surface]


def close_pairs(order: Sequence[SceneObject], radius: float) -> List[Tuple[str, str, float]]:
    """(figure id, reference id, distance) for every figure-reference pair within radius.

    A KD-tree over box centres with a bounding-sphere margin discards far
    pairs before any exact box distance is computed.
    """
    if len(order) < 2:
        return []
    centers = np.array([o.box.center.as_tuple() for o in order])
    spheres = np.array([o.box.diameter / 2.0 for o in order])
    tree = cKDTree(centers)
    rank = {o.id: i for i, o in enumerate(order)}

    pairs = []
    for i, reference in enumerate(order):
        allowed = {o.id for o in figures_for(order, i)}
        if not allowed:
            continue
        reach = spheres[i] + spheres.max() + radius
        for j in sorted(tree.query_ball_point(centers[i], reach)):
            figure = order[j]
            if figure.id not in allowed:
                continue
            if centers_gap(centers[i], centers[j], spheres[i], spheres[j]) > radius:
                continue
            distance = object_distance(figure, reference)
            if distance <= radius:
                pairs.append((figure.id, reference.id, distance))
    pairs.sort(key=lambda p: (rank[p[1]], rank[p[0]]))
    return pairs


def centers_gap(c1: np.ndarray, c2: np.ndarray, r1: float, r2: float) -> float:
    return float(np.linalg.norm(c1 - c2)) - r1 - r2


def _triple(figure: SceneObject, relation: str, reference: SceneObject, note: FrameNote,
            audit: Iterable[str] = ()) -> RelationTriple:
    return RelationTriple(figure.id, relation, reference.id, note, tuple(audit))


def evaluate_pair(figure: SceneObject, reference: SceneObject, ctx: ViewContext, distance: float,
                  scene: Scene, cfg: RelationConfig, include_intrinsic: bool = False) -> List[RelationTriple]:
    """Every relation of `figure` against `reference` that holds."""
    out: List[RelationTriple] = []
    note = ctx.frame_note

    if distance <= cfg.closeness_T:
        out.append(_triple(figure, MetricTag.NEAR.value, reference, FrameNote.GLOBAL, ("IsClose=true",)))
    if distance <= cfg.touch_eps:
        out.append(_triple(figure, MetricTag.TOUCHES.value, reference, FrameNote.GLOBAL, ("Touches=true",)))
    overlapping = intersects(figure, reference)
    if overlapping:
        out.append(_triple(figure, MetricTag.INTERSECTS.value, reference, FrameNote.GLOBAL, ("Int=true",)))

    for tag in ViewTag:
        if ctx.holds(figure, tag, cfg):
            out.append(_triple(figure, tag.value, reference, note, (f"Int(hs:{ctx.region_axis(tag)})=true",)))

    checks = (
        (CommonsenseTag.BESIDE, beside(figure, reference, ctx, cfg), note),
        (CommonsenseTag.ON_TOP_OF, on_top_of(figure, reference, ctx, cfg), note),
        (CommonsenseTag.LEANS_ON, leans_on(figure, reference, ctx, cfg, scene.objects), note),
        (CommonsenseTag.AFFIXED_ON, affixed_on(figure, reference, ctx, cfg, scene.objects), note),
        (CommonsenseTag.INSIDE, inside(figure, reference, cfg), FrameNote.GLOBAL),
    )
    for tag, judgement, frame in checks:
        if judgement:
            out.append(_triple(figure, tag.value, reference, frame, judgement.audit))

    if overlapping:
        judgement = part_in(figure, reference, cfg)
        if judgement:
            out.append(_triple(figure, CommonsenseTag.PART_IN.value, reference, FrameNote.GLOBAL, judgement.audit))

    if include_intrinsic:
        for tag in CardinalTag:
            if directional_fo(figure, reference, None, tag, Strictness.RELAXED, cfg):
                out.append(_triple(figure, tag.value, reference, FrameNote.INTRINSIC, ("reading=relaxed",)))
    return out


def select_references_node(state: ExtractionState) -> Dict:
    scene = state["scene"]
    references = select_references(scene)
    log_pipeline_step("select_references", f"{len(scene)} objects", len(references))
    return {
        "references": references,
        "steps_completed": state.get("steps_completed", []) + ["select_references"],
    }


def prune_pairs_node(state: ExtractionState) -> Dict:
    order = state["references"]
    radius = state["config"].pruning_radius
    pairs = close_pairs(order, radius)
    log_pipeline_step("prune_pairs", f"radius {radius}", len(pairs))
    return {
        "candidate_pairs": pairs,
        "steps_completed": state["steps_completed"] + ["prune_pairs"],
    }


def evaluate_pairs_node(state: ExtractionState) -> Dict:
    scene = state["scene"]
    pose = state["robot_pose"]
    cfg = state["relation_config"]
    include_intrinsic = state["config"].include_intrinsic
    objects = scene.by_id()

    triples: List[RelationTriple] = []
    log: List[Dict] = []
    contexts: Dict[str, ViewContext] = {}
    for figure_id, reference_id, distance in state["candidate_pairs"]:
        reference = objects[reference_id]
        if reference_id not in contexts:
            # the view frames and the CBB depend on the reference and the pose only
            contexts[reference_id] = ViewContext.for_pose(reference, pose, cfg)
        ctx = contexts[reference_id]
        found = evaluate_pair(objects[figure_id], reference, ctx, distance, scene, cfg, include_intrinsic)
        log.append({
            "figure": figure_id,
            "reference": reference_id,
            "distance": distance,
            "frame": ctx.frame_note.value,
            "relations": sorted({t.relation for t in found}),
        })
        log_event("PAIR_EVAL", f"{figure_id} -> {reference_id}: {len(found)} relations", "debug")
        triples.extend(found)

    return {
        "triples": triples,
        "evaluation_log": log,
        "steps_completed": state["steps_completed"] + ["evaluate_pairs"],
    }


def emit_node(state: ExtractionState) -> Dict:
    triples = sort_triples(filter_triples(state.get("triples", []), state.get("relation_filter")))
    log_pipeline_step("emit", "triples", len(triples))
    return {
        "triples": triples,
        "steps_completed": state.get("steps_completed", []) + ["emit"],
    }
