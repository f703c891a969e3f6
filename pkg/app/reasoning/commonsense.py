"""Commonsense predicates composed from the base relations.

Each predicate returns a `Judgement`: truthy like a bool, and carrying the
base relation answers it was derived from.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple

from app.geometry.algebra import prism_overlap_volume, scale_prism
from app.geometry.primitives import EPS_VOL
from app.reasoning.relations import (
    DEFAULT_RELATION_CONFIG,
    CardinalTag,
    Region,
    RelationConfig,
    Strictness,
    ViewContext,
    ViewTag,
    box_of,
    completely_contains,
    directional_fo,
    intersection_region,
    is_close,
    touches,
)
from app.utils.errors import NoIntersection


class CommonsenseTag(str, Enum):
    BESIDE = "Beside"
    ON_TOP_OF = "OnTopOf"
    LEANS_ON = "LeansOn"
    AFFIXED_ON = "AffixedOn"
    INSIDE = "Inside"
    PART_IN = "PartIn"
    NEAR = "Near"


@dataclass(frozen=True)
class Judgement:
    holds: bool
    audit: Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.holds


def _fact(name: str, value: bool) -> str:
    return f"{name}={'true' if value else 'false'}"


def _context(o1: Region, fc, cfg: RelationConfig) -> ViewContext:
    if isinstance(fc, ViewContext):
        return fc
    return ViewContext.from_frame(o1, fc, cfg)


def _id(o: Region) -> Optional[str]:
    return getattr(o, "id", None)


def _others(scene: Iterable[Region], *excluded: Region) -> Tuple[Region, ...]:
    skip_ids = {_id(o) for o in excluded if _id(o) is not None}
    return tuple(
        o for o in scene
        if not any(o is e for e in excluded) and (_id(o) is None or _id(o) not in skip_ids)
    )


def beside(o2: Region, o1: Region, fc, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> Judgement:
    ctx = _context(o1, fc, cfg)
    right = ctx.holds(o2, ViewTag.RIGHT_OF, cfg)
    left = ctx.holds(o2, ViewTag.LEFT_OF, cfg)
    return Judgement(right or left, (_fact("RightOf", right), _fact("LeftOf", left)))


def on_top_of(o2: Region, o1: Region, fc, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> Judgement:
    ctx = _context(o1, fc, cfg)
    above = ctx.holds(o2, ViewTag.ABOVE, cfg)
    touching = touches(o2, o1, cfg)
    return Judgement(above and touching, (_fact("Above", above), _fact("Touches", touching)))


def leans_on(o2: Region, o1: Region, fc, cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
             scene: Iterable[Region] = ()) -> Judgement:
    """o2 touches o1 sideways and stands on some third object.

    Candidate supports are all scene members other than o1 and o2.
    """
    ctx = _context(o1, fc, cfg)
    touching = touches(o2, o1, cfg)
    above = ctx.holds(o2, ViewTag.ABOVE, cfg)
    below = ctx.holds(o2, ViewTag.BELOW, cfg)
    audit = [_fact("Touches", touching), _fact("Above", above), _fact("Below", below)]
    if not touching or above or below:
        return Judgement(False, tuple(audit))

    # Below(o3, o2) reads o2's bottom halfspace, which no viewpoint changes
    for o3 in _others(scene, o1, o2):
        if touches(o2, o3, cfg) and directional_fo(o3, o2, None, CardinalTag.BELOW, Strictness.RELAXED, cfg):
            audit.append(f"support={_id(o3) or 'o3'}")
            return Judgement(True, tuple(audit))
    audit.append("support=none")
    return Judgement(False, tuple(audit))


def affixed_on(o2: Region, o1: Region, fc, cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
               scene: Iterable[Region] = ()) -> Judgement:
    """Sufficient condition only: o1 is the sole object touching o2.

    False does not rule out a physical mounting that also has other contacts.
    """
    ctx = _context(o1, fc, cfg)
    touching = touches(o2, o1, cfg)
    above = ctx.holds(o2, ViewTag.ABOVE, cfg)
    audit = [_fact("Touches", touching), _fact("Above", above), "rule=one-way"]
    if not touching or above:
        return Judgement(False, tuple(audit))
    for o3 in _others(scene, o1, o2):
        if touches(o3, o2, cfg):
            audit.append(f"other_contact={_id(o3) or 'o3'}")
            return Judgement(False, tuple(audit))
    audit.append("other_contact=none")
    return Judgement(True, tuple(audit))


def inside(o2: Region, o1: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> Judgement:
    contained = completely_contains(o1, o2, cfg)
    return Judgement(contained, (_fact("ComplCont", contained),))


def adjacency_proxies(o1: Region, o2: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> Tuple[float, float]:
    """Volume stand-ins for the count of points of o1 and o2 bordering inter(o1, o2).

    The intersection is grown about its centroid by (1 + adjacency_delta); the
    part of that shell lying in each object, minus the intersection itself,
    measures how much of the object borders it.

    Raises:
        NoIntersection: the two solids do not overlap.
    """
    inter = intersection_region(o1, o2)
    if inter is None:
        raise NoIntersection(f"{_id(o1) or 'o1'} and {_id(o2) or 'o2'} do not intersect")
    shell = scale_prism(inter, 1.0 + cfg.adjacency_delta)
    core = inter.volume
    p1 = prism_overlap_volume(shell, box_of(o1).to_prism()) - core
    p2 = prism_overlap_volume(shell, box_of(o2).to_prism()) - core
    return p1, p2


def part_in(o1: Region, o2: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> Judgement:
    """o1 partially inside o2; non-overlapping pairs answer False."""
    try:
        p1, p2 = adjacency_proxies(o1, o2, cfg)
    except NoIntersection:
        return Judgement(False, ("Intersects=false",))
    # audit entries are boolean facts, never raw volumes
    holds = p1 < p2 - EPS_VOL
    return Judgement(holds, ("Intersects=true", _fact("AdjacencyBelow", holds)))


def near(o1: Region, o2: Region, cfg: RelationConfig = DEFAULT_RELATION_CONFIG) -> Judgement:
    close = is_close(o1, o2, cfg)
    return Judgement(close, (_fact("IsClose", close),))
