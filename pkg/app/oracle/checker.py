"""Brute-force point-sampling oracle for the analytic relations.

Every relation is re-derived from point sets: halfspace regions come from
coordinate inequalities in the reference's frames, distances and overlaps
from signed distances of sampled points, adjacency from shell-membership
counts. Each answer carries a margin: how far the sampled quantity sits from
the decision threshold after allowing for sample resolution. Margins of
adjacency answers are relative count differences, all others are metres.
"""
from __future__ import annotations

import math
import time
import zlib
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from app.geometry.primitives import EPS_GEOM, HALF_PI, OrientedBox, Point3, normalize_angle, rotation_2d
from app.oracle.sampling import DEFAULT_SEED, SampledRegion, sample_box_volume
from app.reasoning.commonsense import CommonsenseTag, affixed_on, beside, inside, leans_on, on_top_of, part_in
from app.reasoning.frames import RobotPose
from app.reasoning.relations import (
    DEFAULT_RELATION_CONFIG,
    CardinalTag,
    MetricTag,
    RelationConfig,
    Strictness,
    ViewContext,
    ViewTag,
    directional_fo,
    intersection_region,
    intersects,
    is_close,
    touches,
)
from app.scene.model import Scene, SceneObject, make_object_id
from app.utils.logger import log_event, log_performance

MIN_SAMPLES = 10_000
DEFAULT_SAMPLES = 100_000
RESOLUTION_FACTOR = 2.0
COUNT_SIGMAS = 3.0
CBB_TIE = 1e-9

STRICTNESS_SEP = "/"


def cardinal_name(tag: CardinalTag, strictness: Strictness) -> str:
    return f"{CardinalTag(tag).value}{STRICTNESS_SEP}{Strictness(strictness).value}"


ORACLE_RELATIONS: Tuple[str, ...] = (
    tuple(t.value for t in MetricTag)
    + (CommonsenseTag.INSIDE.value, CommonsenseTag.PART_IN.value)
    + tuple(cardinal_name(t, s) for t in CardinalTag for s in (Strictness.RELAXED, Strictness.STRICT))
    + tuple(t.value for t in ViewTag)
    + tuple(t.value for t in (CommonsenseTag.BESIDE, CommonsenseTag.ON_TOP_OF,
                              CommonsenseTag.LEANS_ON, CommonsenseTag.AFFIXED_ON))
)


@dataclass(frozen=True)
class OracleVerdict:
    answer: bool
    margin: float

    def __bool__(self) -> bool:
        return self.answer


def _all_of(verdicts: Iterable[OracleVerdict]) -> OracleVerdict:
    verdicts = list(verdicts)
    if all(verdicts):
        return OracleVerdict(True, min(v.margin for v in verdicts))
    return OracleVerdict(False, max(v.margin for v in verdicts if not v))


def _any_of(verdicts: Iterable[OracleVerdict]) -> OracleVerdict:
    verdicts = list(verdicts)
    if any(verdicts):
        return OracleVerdict(True, max(v.margin for v in verdicts if v))
    return OracleVerdict(False, min(v.margin for v in verdicts))


def _not(verdict: OracleVerdict) -> OracleVerdict:
    return OracleVerdict(not verdict.answer, verdict.margin)


def _seed_for(seed: int, key: str) -> int:
    return (seed * 1_000_003 + zlib.crc32(key.encode("utf-8"))) % (2 ** 32)


def box_from_local_bounds(origin: Point3, yaw: float, lo: np.ndarray, hi: np.ndarray) -> OrientedBox:
    """Box given by per-axis bounds in a frame centred at `origin` and turned by `yaw`."""
    mid = (lo + hi) / 2.0
    xy = rotation_2d(yaw) @ mid[:2]
    center = Point3(origin.x + float(xy[0]), origin.y + float(xy[1]), origin.z + float(mid[2]))
    return OrientedBox(center, tuple(float(v) for v in (hi - lo) / 2.0), yaw)


class _Solid:
    """A box with lazily drawn volume and surface samples."""

    def __init__(self, box: OrientedBox, n: int, seed: int):
        self.box = box
        self.n = n
        self.seed = seed

    @cached_property
    def volume(self) -> SampledRegion:
        return SampledRegion.create(self.box, self.n, self.seed)

    @cached_property
    def surface(self) -> SampledRegion:
        return SampledRegion.create(self.box, self.n, self.seed + 1, surface=True)

    def sdf(self, points: np.ndarray) -> np.ndarray:
        return self.box.signed_distance(points)


class PairOracle:
    """Sample-based answers for one (figure, reference) pair under one robot pose."""

    def __init__(self, reference, figure, robot_pose: RobotPose,
                 cfg: RelationConfig = DEFAULT_RELATION_CONFIG, n: int = DEFAULT_SAMPLES,
                 seed: int = DEFAULT_SEED):
        if n < MIN_SAMPLES:
            raise ValueError(f"oracle needs at least {MIN_SAMPLES} samples per region, got {n}")
        self.reference_box = reference if isinstance(reference, OrientedBox) else reference.box
        self.figure_box = figure if isinstance(figure, OrientedBox) else figure.box
        self.pose = robot_pose
        self.cfg = cfg
        self.n = n
        self.seed = seed
        self._solids: Dict[str, _Solid] = {}
        self._cache: Dict[str, OracleVerdict] = {}

    def _solid(self, key: str, box: OrientedBox) -> _Solid:
        if key not in self._solids:
            self._solids[key] = _Solid(box, self.n, _seed_for(self.seed, key))
        return self._solids[key]

    @property
    def reference(self) -> _Solid:
        return self._solid("reference", self.reference_box)

    @property
    def figure(self) -> _Solid:
        return self._solid("figure", self.figure_box)

    # sampled measurements

    def _penetration(self, a: _Solid, b: _Solid) -> Tuple[float, float]:
        """Smallest signed distance between the point sets, and its resolution.

        Negative values are a penetration depth; non-negative ones an upper
        bound on the gap.
        """
        pen = min(
            float(a.sdf(b.surface.points).min()),
            float(a.sdf(b.volume.points).min()),
            float(b.sdf(a.surface.points).min()),
        )
        resolution = RESOLUTION_FACTOR * max(a.surface.spacing(), b.surface.spacing())
        return pen, resolution

    @staticmethod
    def _within(pen: float, resolution: float, threshold: float) -> OracleVerdict:
        if pen <= threshold:
            return OracleVerdict(True, threshold - pen)
        return OracleVerdict(False, max(0.0, pen - resolution - threshold))

    @staticmethod
    def _overlapping(pen: float, resolution: float) -> OracleVerdict:
        if pen < 0.0:
            return OracleVerdict(True, -pen)
        return OracleVerdict(False, max(0.0, pen - resolution))

    def _contained(self, region: _Solid, inner: _Solid) -> OracleVerdict:
        worst = float(region.sdf(inner.surface.points).max())
        resolution = RESOLUTION_FACTOR * inner.surface.spacing()
        if worst <= 0.0:
            return OracleVerdict(True, max(0.0, -worst - resolution))
        return OracleVerdict(False, worst)

    # regions from coordinate inequalities

    def _intrinsic_region(self, tag: CardinalTag) -> OrientedBox:
        box = self.reference_box
        h = np.asarray(box.half_extents)
        s = self.cfg.halfspace_scale_s
        lo, hi = -h.copy(), h.copy()
        axis, positive = {
            CardinalTag.EAST: (0, True), CardinalTag.WEST: (0, False),
            CardinalTag.NORTH: (1, True), CardinalTag.SOUTH: (1, False),
            CardinalTag.ABOVE: (2, True), CardinalTag.BELOW: (2, False),
        }[CardinalTag(tag)]
        depth = 2.0 * h[axis] * s
        if positive:
            lo[axis], hi[axis] = h[axis], h[axis] + depth
        else:
            lo[axis], hi[axis] = -h[axis] - depth, -h[axis]
        return box_from_local_bounds(box.center, box.yaw, lo, hi)

    @cached_property
    def view_yaw(self) -> float:
        c = self.reference_box.center
        p = self.pose.position
        if math.hypot(c.x - p.x, c.y - p.y) < EPS_GEOM:
            return self.pose.heading
        return normalize_angle(math.atan2(c.y - p.y, c.x - p.x))

    @cached_property
    def cbb_bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        """Extents of the view-aligned box in contextualised-frame coordinates, from its rotated corners."""
        box = self.reference_box
        yaw = self.view_yaw
        phi = float(np.mod(box.yaw - yaw, HALF_PI))
        if HALF_PI - phi < 1e-15:
            phi = 0.0
        theta = -phi if phi < math.pi / 4.0 - CBB_TIE else HALF_PI - phi

        center = box.center.as_array()
        corners = box.corners() - center
        turned = corners[:, :2] @ rotation_2d(theta).T
        local_xy = turned @ rotation_2d(-yaw).T
        lo = np.array([local_xy[:, 0].min(), local_xy[:, 1].min(), -box.hz])
        hi = np.array([local_xy[:, 0].max(), local_xy[:, 1].max(), box.hz])
        return lo, hi

    def _view_region(self, tag: ViewTag) -> OrientedBox:
        tag = ViewTag(tag)
        if tag is ViewTag.ABOVE:
            return self._intrinsic_region(CardinalTag.ABOVE)
        if tag is ViewTag.BELOW:
            return self._intrinsic_region(CardinalTag.BELOW)
        lo, hi = (b.copy() for b in self.cbb_bounds)
        s = self.cfg.halfspace_scale_s
        width, depth = hi[0] - lo[0], hi[1] - lo[1]
        if tag is ViewTag.IN_FRONT_OF:
            lo[0], hi[0] = lo[0] - s * width, lo[0]
        elif tag is ViewTag.BEHIND:
            lo[0], hi[0] = hi[0], hi[0] + s * width
        elif tag is ViewTag.LEFT_OF:
            lo[1], hi[1] = hi[1], hi[1] + s * depth
        else:
            lo[1], hi[1] = lo[1] - s * depth, lo[1]
        return box_from_local_bounds(self.reference_box.center, self.view_yaw, lo, hi)

    # relations

    def touches(self) -> OracleVerdict:
        return self._within(*self._penetration(self.reference, self.figure), self.cfg.touch_eps)

    def near(self) -> OracleVerdict:
        return self._within(*self._penetration(self.reference, self.figure), self.cfg.closeness_T)

    def intersects(self) -> OracleVerdict:
        return self._overlapping(*self._penetration(self.reference, self.figure))

    def inside(self) -> OracleVerdict:
        return self._contained(self.reference, self.figure)

    def cardinal(self, tag: CardinalTag, strictness: Strictness) -> OracleVerdict:
        name = cardinal_name(tag, Strictness.RELAXED)
        region = self._solid(f"intrinsic:{name}", self._intrinsic_region(tag))
        if Strictness(strictness) is Strictness.STRICT:
            return self._contained(region, self.figure)
        return self._overlapping(*self._penetration(region, self.figure))

    def view(self, tag: ViewTag) -> OracleVerdict:
        region = self._solid(f"view:{ViewTag(tag).value}", self._view_region(tag))
        return self._overlapping(*self._penetration(region, self.figure))

    def part_in(self) -> OracleVerdict:
        """Figure partially inside reference, by counting shell samples on each side."""
        overlap = self.intersects()
        if not overlap:
            return OracleVerdict(False, overlap.margin)
        inter = intersection_region(self.figure_box, self.reference_box)
        if inter is None:
            return OracleVerdict(False, 0.0)

        factor = 1.0 + self.cfg.adjacency_delta
        c = inter.centroid.as_array()
        minx, miny, maxx, maxy = inter.shape.bounds
        lo = c + (np.array([minx, miny, inter.z_min]) - c) * factor
        hi = c + (np.array([maxx, maxy, inter.z_max]) - c) * factor
        domain = OrientedBox.from_bounds(lo, hi)
        rng = np.random.default_rng(_seed_for(self.seed, "shell"))
        pts = sample_box_volume(domain, self.n, rng)

        def in_both(p):
            return self.figure_box.contains_points(p) & self.reference_box.contains_points(p)

        core = in_both(pts)
        shell = in_both(c + (pts - c) / factor)
        fig_count = int(np.sum(shell & ~core & self.figure_box.contains_points(pts)))
        ref_count = int(np.sum(shell & ~core & self.reference_box.contains_points(pts)))
        total = max(fig_count + ref_count, 1)
        margin = abs(fig_count - ref_count) / total - COUNT_SIGMAS / math.sqrt(total)
        return OracleVerdict(fig_count < ref_count, max(0.0, margin))

    def evaluate(self, relation: str) -> OracleVerdict:
        if relation not in self._cache:
            self._cache[relation] = self._evaluate(relation)
        return self._cache[relation]

    def _evaluate(self, relation: str) -> OracleVerdict:
        if STRICTNESS_SEP in relation:
            tag, strictness = relation.split(STRICTNESS_SEP, 1)
            return self.cardinal(CardinalTag(tag), Strictness(strictness))
        simple: Dict[str, Callable[[], OracleVerdict]] = {
            MetricTag.TOUCHES.value: self.touches,
            MetricTag.NEAR.value: self.near,
            MetricTag.INTERSECTS.value: self.intersects,
            CommonsenseTag.INSIDE.value: self.inside,
            CommonsenseTag.PART_IN.value: self.part_in,
        }
        if relation in simple:
            return simple[relation]()
        if relation in {t.value for t in ViewTag}:
            return self.view(ViewTag(relation))
        if relation == CommonsenseTag.BESIDE.value:
            return _any_of([self.evaluate(ViewTag.LEFT_OF.value), self.evaluate(ViewTag.RIGHT_OF.value)])
        if relation == CommonsenseTag.ON_TOP_OF.value:
            return _all_of([self.evaluate(ViewTag.ABOVE.value), self.evaluate(MetricTag.TOUCHES.value)])
        if relation == CommonsenseTag.AFFIXED_ON.value:
            # two objects only: no third contact can exist
            return _all_of([self.evaluate(MetricTag.TOUCHES.value), _not(self.evaluate(ViewTag.ABOVE.value))])
        if relation == CommonsenseTag.LEANS_ON.value:
            # a lean needs a third supporting object
            return OracleVerdict(False, math.inf)
        raise ValueError(f"unknown relation {relation!r}; expected one of {list(ORACLE_RELATIONS)}")


def oracle_relation(o1, o2, relation: str, robot_pose: RobotPose,
                    cfg: RelationConfig = DEFAULT_RELATION_CONFIG, n: int = DEFAULT_SAMPLES,
                    seed: int = DEFAULT_SEED) -> OracleVerdict:
    """Sampled answer for `relation` of figure o2 against reference o1."""
    return PairOracle(o1, o2, robot_pose, cfg, n, seed).evaluate(relation)


def engine_relation(o1, o2, relation: str, ctx: ViewContext, cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
                    scene: Iterable = ()) -> bool:
    """The analytic engine's answer for the same question."""
    if STRICTNESS_SEP in relation:
        tag, strictness = relation.split(STRICTNESS_SEP, 1)
        return directional_fo(o2, o1, None, CardinalTag(tag), Strictness(strictness), cfg)
    if relation == MetricTag.TOUCHES.value:
        return touches(o2, o1, cfg)
    if relation == MetricTag.NEAR.value:
        return is_close(o2, o1, cfg)
    if relation == MetricTag.INTERSECTS.value:
        return intersects(o2, o1)
    if relation in {t.value for t in ViewTag}:
        return ctx.holds(o2, ViewTag(relation), cfg)
    scene = tuple(scene)
    judges = {
        CommonsenseTag.INSIDE.value: lambda: inside(o2, o1, cfg),
        CommonsenseTag.PART_IN.value: lambda: part_in(o2, o1, cfg),
        CommonsenseTag.BESIDE.value: lambda: beside(o2, o1, ctx, cfg),
        CommonsenseTag.ON_TOP_OF.value: lambda: on_top_of(o2, o1, ctx, cfg),
        CommonsenseTag.LEANS_ON.value: lambda: leans_on(o2, o1, ctx, cfg, scene),
        CommonsenseTag.AFFIXED_ON.value: lambda: affixed_on(o2, o1, ctx, cfg, scene),
    }
    if relation not in judges:
        raise ValueError(f"unknown relation {relation!r}")
    return bool(judges[relation]())


SCENE_LAYOUTS = ("separate", "stacked", "overlap", "inside", "flush")


def random_pair_scene(rng: np.random.Generator, index: int = 0, layout: Optional[str] = None) -> Scene:
    """Two boxes in one of a few seeded layouts, plus a robot pose looking on.

    objects[0] is the reference, objects[1] the figure.
    """
    layout = layout or SCENE_LAYOUTS[int(rng.integers(len(SCENE_LAYOUTS)))]
    h1 = rng.uniform(0.1, 0.8, size=3)
    yaw1 = float(rng.uniform(0.0, 2.0 * math.pi))
    x1, y1 = (float(v) for v in rng.uniform(-1.0, 1.0, size=2))
    ref = OrientedBox(Point3(x1, y1, float(h1[2])), tuple(float(v) for v in h1), yaw1)

    h2 = rng.uniform(0.05, 0.6, size=3)
    yaw2 = float(rng.uniform(0.0, 2.0 * math.pi))
    if layout == "separate":
        angle = rng.uniform(0.0, 2.0 * math.pi)
        reach = rng.uniform(0.0, 2.5)
        center = ref.center.as_array() + np.array([reach * math.cos(angle), reach * math.sin(angle),
                                                   rng.uniform(-1.0, 1.0)])
    elif layout == "stacked":
        offset = ref.to_global(np.array([[*rng.uniform(-1.0, 1.0, size=2) * h1[:2], 0.0]]))[0]
        center = np.array([offset[0], offset[1], ref.z_max + h2[2]])
    elif layout == "overlap":
        center = ref.to_global(np.array([rng.uniform(-1.2, 1.2, size=3) * h1]))[0]
    elif layout == "inside":
        h2 = h1 * rng.uniform(0.2, 0.6, size=3)
        yaw2 = yaw1
        center = ref.to_global(np.array([rng.uniform(-1.0, 1.0, size=3) * (h1 - h2)]))[0]
    elif layout == "flush":
        yaw2 = yaw1
        side = 1.0 if rng.random() < 0.5 else -1.0
        local = np.array([[side * (h1[0] + h2[0]), rng.uniform(-1.0, 1.0) * h1[1], h2[2] - h1[2]]])
        center = ref.to_global(local)[0]
    else:
        raise ValueError(f"unknown layout {layout!r}; expected one of {SCENE_LAYOUTS}")
    fig = OrientedBox(Point3.from_seq(center), tuple(float(v) for v in h2), yaw2)

    angle = rng.uniform(0.0, 2.0 * math.pi)
    reach = rng.uniform(3.0, 6.0)
    pose = RobotPose(
        Point3(ref.center.x + reach * math.cos(angle), ref.center.y + reach * math.sin(angle), 0.0),
        float(rng.uniform(0.0, 2.0 * math.pi)),
    )
    stamp = f"scene{index:04d}_"
    objects = (
        SceneObject(make_object_id(stamp, 0), ref, (("box", 1.0),)),
        SceneObject(make_object_id(stamp, 1), fig, (("box", 1.0),)),
    )
    return Scene(objects, pose)


@dataclass
class AgreementReport:
    seed: int
    samples: int
    band: float
    scenes: int = 0
    comparisons: int = 0
    agreements: int = 0
    in_band: List[Dict[str, Any]] = field(default_factory=list)
    out_of_band: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.out_of_band

    def to_dict(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["passed"] = self.passed
        return payload


def boundary_band(cfg: RelationConfig) -> float:
    return max(cfg.touch_eps, 1e-3)


def check_scene(scene: Scene, cfg: RelationConfig, n: int, seed: int,
                relations: Iterable[str] = ORACLE_RELATIONS) -> List[Dict[str, Any]]:
    """Engine and oracle answers for every relation of a two-object scene."""
    reference, figure = scene.objects[0], scene.objects[1]
    ctx = ViewContext.for_pose(reference, scene.robot_pose, cfg)
    oracle = PairOracle(reference, figure, scene.robot_pose, cfg, n, seed)
    rows = []
    for relation in relations:
        verdict = oracle.evaluate(relation)
        rows.append({
            "figure": figure.id,
            "reference": reference.id,
            "relation": relation,
            "engine": engine_relation(reference, figure, relation, ctx, cfg, scene.objects),
            "oracle": verdict.answer,
            "margin": verdict.margin if math.isfinite(verdict.margin) else None,
        })
    return rows


def run_agreement(n_scenes: int, seed: int = DEFAULT_SEED, samples: int = DEFAULT_SAMPLES,
                  cfg: RelationConfig = DEFAULT_RELATION_CONFIG,
                  relations: Optional[Iterable[str]] = None) -> AgreementReport:
    """Compare engine and oracle on seeded random two-object scenes.

    Disagreements whose margin is inside the boundary band are recorded but
    do not fail the report.
    """
    started = time.perf_counter()
    relations = tuple(relations) if relations else ORACLE_RELATIONS
    band = boundary_band(cfg)
    report = AgreementReport(seed=seed, samples=samples, band=band)
    rng = np.random.default_rng(seed)
    for index in range(n_scenes):
        scene = random_pair_scene(rng, index)
        for row in check_scene(scene, cfg, samples, _seed_for(seed, f"scene{index}"), relations):
            report.comparisons += 1
            if row["engine"] == row["oracle"]:
                report.agreements += 1
                continue
            margin = row["margin"]
            if margin is not None and margin <= band:
                report.in_band.append(row)
                log_event("ORACLE_DISAGREEMENT", f"in band: {row}", "debug")
            else:
                report.out_of_band.append(row)
                log_event("ORACLE_DISAGREEMENT", f"out of band: {row}", "warning")
        report.scenes += 1

    log_event(
        "ORACLE_CHECK",
        f"{report.scenes} scenes, {report.comparisons} comparisons, "
        f"{len(report.in_band)} in-band and {len(report.out_of_band)} out-of-band disagreements",
    )
    log_performance("oracle_check", time.perf_counter() - started, f"N={samples}")
    return report
