import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError as PydanticValidationError

from app.config import EngineConfig
from app.geometry.primitives import Point3
from app.oracle.checker import SCENE_LAYOUTS, random_pair_scene
from app.reasoning.frames import FrameKind, FrameOfReference, RobotPose
from app.reasoning.relations import (
    CardinalTag,
    RelationConfig,
    Strictness,
    ViewContext,
    ViewTag,
    completely_contains,
    directional_fc,
    directional_fo,
    intersection_region,
    intersection_volume,
    intersects,
    is_close,
    object_distance,
    touches,
)
from app.scene.model import FrameNote
from tests.conftest import make_box, make_object


@st.composite
def object_pairs(draw):
    def one(name):
        center = draw(st.tuples(*(st.floats(min_value=-2.0, max_value=2.0) for _ in range(3))))
        half = draw(st.tuples(*(st.floats(min_value=0.05, max_value=1.0) for _ in range(3))))
        yaw = draw(st.floats(min_value=0.0, max_value=2 * math.pi))
        return make_object(name, center, half, yaw)

    return one("a"), one("b")


def pose_at(x, y, heading=0.0):
    return RobotPose(Point3(x, y, 0.0), heading)


class TestConfig:
    def test_defaults(self):
        cfg = RelationConfig()
        assert (cfg.closeness_T, cfg.touch_eps, cfg.halfspace_scale_s) == (0.5, 0.01, 2.0)

    def test_closeness_below_touch_tolerance_rejected(self):
        with pytest.raises(ValueError):
            RelationConfig(closeness_T=0.005, touch_eps=0.01)

    def test_non_positive_values_rejected(self):
        with pytest.raises(ValueError):
            RelationConfig(adjacency_delta=0.0)

    def test_frozen_and_closed(self):
        cfg = RelationConfig()
        with pytest.raises(PydanticValidationError):
            cfg.closeness_T = 1.0
        with pytest.raises(PydanticValidationError):
            RelationConfig(closeness=1.0)
        with pytest.raises(PydanticValidationError):
            RelationConfig(touch_eps=float("inf"))

    def test_engine_config_shares_the_threshold_checks(self):
        assert issubclass(EngineConfig, RelationConfig)
        with pytest.raises(PydanticValidationError):
            EngineConfig(closeness_T=0.005, touch_eps=0.01)
        narrowed = EngineConfig(closeness_T=0.7).relation_config()
        assert type(narrowed) is RelationConfig
        assert narrowed.closeness_T == 0.7
        assert narrowed.model_dump() == EngineConfig(closeness_T=0.7).model_dump(include=set(RelationConfig.model_fields))


class TestMetric:
    def test_distance_to_itself(self):
        a = make_object("a", yaw=0.4)
        assert object_distance(a, a) == 0.0

    def test_unit_cubes_two_metres_apart(self):
        assert object_distance(make_object("a"), make_object("b", (3.0, 0.0, 0.0))) == pytest.approx(2.0)

    def test_closeness_boundary_is_inclusive(self, relation_cfg):
        a = make_object("a")
        assert is_close(a, make_object("b", (1.4, 0.0, 0.0)), relation_cfg)
        assert is_close(a, make_object("b", (1.5, 0.0, 0.0)), relation_cfg)
        assert not is_close(a, make_object("b", (1.5001, 0.0, 0.0)), relation_cfg)

    def test_touches(self, relation_cfg):
        a = make_object("a")
        assert touches(a, make_object("b", (1.0, 0.0, 0.0)), relation_cfg)
        assert touches(a, make_object("b", (0.8, 0.0, 0.0)), relation_cfg)
        assert not touches(a, make_object("b", (1.05, 0.0, 0.0)), relation_cfg)

    def test_overlapping_cubes_intersect_by_unit_volume(self):
        a = make_object("a", (1.0, 1.0, 1.0), (1.0, 1.0, 1.0))
        b = make_object("b", (2.0, 2.0, 2.0), (1.0, 1.0, 1.0))
        assert intersects(a, b)
        assert intersection_volume(a, b) == pytest.approx(1.0)
        assert intersection_region(a, b).volume == pytest.approx(1.0)

    def test_face_contact_is_not_an_intersection(self):
        assert not intersects(make_object("a"), make_object("b", (1.0, 0.0, 0.0)))

    def test_disjoint(self):
        a, b = make_object("a"), make_object("b", (4.0, 0.0, 0.0))
        assert not intersects(a, b)
        assert intersection_region(a, b) is None

    @settings(max_examples=50, deadline=None)
    @given(object_pairs())
    def test_metric_relations_are_symmetric(self, pair):
        a, b = pair
        cfg = RelationConfig()
        assert object_distance(a, b) == object_distance(b, a)
        assert is_close(a, b, cfg) == is_close(b, a, cfg)
        assert touches(a, b, cfg) == touches(b, a, cfg)
        assert intersects(a, b) == intersects(b, a)
        if touches(a, b, cfg):
            assert is_close(a, b, cfg)


class TestContainment:
    def test_cube_inside_larger_cube(self, relation_cfg):
        outer = make_object("outer", half=(1.0, 1.0, 1.0))
        inner = make_object("inner", (0.2, 0.1, 0.0), (0.3, 0.3, 0.3), 0.5)
        assert completely_contains(outer, inner, relation_cfg)
        assert not completely_contains(inner, outer, relation_cfg)

    def test_identical_boxes_contain_each_other(self, relation_cfg):
        a = make_object("a", yaw=0.3)
        b = make_object("b", yaw=0.3)
        assert completely_contains(a, b, relation_cfg) and completely_contains(b, a, relation_cfg)

    def test_half_overlap_is_not_containment(self, relation_cfg):
        assert not completely_contains(make_object("a"), make_object("b", (0.5, 0.0, 0.0)), relation_cfg)


class TestIntrinsicDirections:
    def test_cube_east_of_cube(self, relation_cfg):
        a, b = make_object("a"), make_object("b", (1.5, 0.0, 0.0))
        assert directional_fo(b, a, None, CardinalTag.EAST, Strictness.RELAXED, relation_cfg)
        assert directional_fo(b, a, None, CardinalTag.EAST, Strictness.STRICT, relation_cfg)
        assert not directional_fo(b, a, None, CardinalTag.WEST, Strictness.RELAXED, relation_cfg)

    def test_straddling_cube_is_only_relaxed_east(self, relation_cfg):
        a, b = make_object("a"), make_object("b", (1.5, 0.5, 0.0))
        assert directional_fo(b, a, None, CardinalTag.EAST, Strictness.RELAXED, relation_cfg)
        assert not directional_fo(b, a, None, CardinalTag.EAST, Strictness.STRICT, relation_cfg)

    def test_far_west_is_not_east(self, relation_cfg):
        a, b = make_object("a"), make_object("b", (-2.0, 0.0, 0.0))
        assert not directional_fo(b, a, None, CardinalTag.EAST, Strictness.RELAXED, relation_cfg)

    def test_directions_follow_the_reference_yaw(self, relation_cfg):
        a = make_object("a", yaw=math.pi / 2.0)
        b = make_object("b", (0.0, 1.5, 0.0))
        assert directional_fo(b, a, None, CardinalTag.EAST, Strictness.STRICT, relation_cfg)

    @settings(max_examples=60, deadline=None)
    @given(object_pairs())
    def test_strict_implies_relaxed_and_opposites_exclude(self, pair):
        a, b = pair
        cfg = RelationConfig()
        for tag in CardinalTag:
            if directional_fo(b, a, None, tag, Strictness.STRICT, cfg):
                assert directional_fo(b, a, None, tag, Strictness.RELAXED, cfg)
        for one, other in ((CardinalTag.EAST, CardinalTag.WEST), (CardinalTag.NORTH, CardinalTag.SOUTH),
                           (CardinalTag.ABOVE, CardinalTag.BELOW)):
            assert not (directional_fo(b, a, None, one, Strictness.STRICT, cfg)
                        and directional_fo(b, a, None, other, Strictness.STRICT, cfg))


class TestViewpointDirections:
    def desk_and_book(self):
        desk = make_object("desk", (0.0, 0.0, 0.4), (0.6, 0.4, 0.4))
        book = make_object("book", (0.0, 0.0, 0.82), (0.1, 0.15, 0.02), 0.3)
        return desk, book

    def test_book_on_desk_is_only_above(self, relation_cfg):
        desk, book = self.desk_and_book()
        ctx = ViewContext.for_pose(desk, pose_at(-3.0, 0.5), relation_cfg)
        answers = {tag: ctx.holds(book, tag, relation_cfg) for tag in ViewTag}
        assert answers == {tag: tag is ViewTag.ABOVE for tag in ViewTag}

    def test_wall_extinguisher_is_left_of_radiator(self, extinguisher_scene, relation_cfg):
        radiator = extinguisher_scene.get("radiator")
        extinguisher = extinguisher_scene.get("fire_extinguisher2")
        ctx = ViewContext.for_pose(radiator, extinguisher_scene.robot_pose, relation_cfg)
        assert ctx.holds(extinguisher, ViewTag.LEFT_OF, relation_cfg)
        assert not ctx.holds(extinguisher, ViewTag.RIGHT_OF, relation_cfg)

    def test_directional_fc_needs_a_contextualised_frame(self, relation_cfg):
        desk, book = self.desk_and_book()
        with pytest.raises(ValueError):
            directional_fc(book, desk, FrameOfReference(desk.box.center, 0.0, FrameKind.ROBOT),
                           ViewTag.ABOVE, relation_cfg)

    def test_directional_fc_matches_context(self, relation_cfg):
        ref = make_object("ref", (0.0, 0.0, 0.5))
        fig = make_object("fig", (0.0, 1.2, 0.5), (0.2, 0.2, 0.2))
        fc = FrameOfReference(ref.box.center, 0.0, FrameKind.CONTEXTUALISED)
        assert directional_fc(fig, ref, fc, ViewTag.LEFT_OF, relation_cfg)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=0.0, max_value=2 * math.pi), st.floats(min_value=2.0, max_value=8.0))
    def test_antipodal_viewpoints_swap_sides(self, angle, reach):
        cfg = RelationConfig()
        ref = make_object("ref", (0.0, 0.0, 0.5), (0.5, 0.3, 0.5), 0.4)
        fig = make_object("fig", (0.3, 1.0, 0.6), (0.2, 0.2, 0.3), 1.0)
        here = pose_at(reach * math.cos(angle), reach * math.sin(angle), 0.7)
        there = pose_at(-reach * math.cos(angle), -reach * math.sin(angle), 2.1)
        a = ViewContext.for_pose(ref, here, cfg)
        b = ViewContext.for_pose(ref, there, cfg)
        pairs = ((ViewTag.LEFT_OF, ViewTag.RIGHT_OF), (ViewTag.IN_FRONT_OF, ViewTag.BEHIND))
        for one, other in pairs:
            assert a.holds(fig, one, cfg) == b.holds(fig, other, cfg)
            assert a.holds(fig, other, cfg) == b.holds(fig, one, cfg)
        for tag in (ViewTag.ABOVE, ViewTag.BELOW):
            assert a.holds(fig, tag, cfg) == b.holds(fig, tag, cfg)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=-5.0, max_value=5.0),
           st.floats(min_value=0.0, max_value=2 * math.pi))
    def test_above_and_below_ignore_the_robot(self, x, y, heading):
        cfg = RelationConfig()
        desk, book = self.desk_and_book()
        baseline = ViewContext.for_pose(desk, pose_at(-3.0, 0.0), cfg)
        ctx = ViewContext.for_pose(desk, pose_at(x, y, heading), cfg)
        for tag in (ViewTag.ABOVE, ViewTag.BELOW):
            assert ctx.holds(book, tag, cfg) == baseline.holds(book, tag, cfg)
            assert np.allclose(ctx.region(tag).corners(), baseline.region(tag).corners())

    @settings(max_examples=30, deadline=None)
    @given(st.floats(min_value=-10.0, max_value=10.0), st.floats(min_value=-10.0, max_value=10.0),
           st.floats(min_value=0.0, max_value=2 * math.pi))
    def test_rigid_motion_leaves_answers_unchanged(self, dx, dy, turn):
        cfg = RelationConfig()
        c, s = math.cos(turn), math.sin(turn)

        def move(x, y):
            return c * x - s * y + dx, s * x + c * y + dy

        def scene(moved):
            f = move if moved else (lambda x, y: (x, y))
            extra = turn if moved else 0.0
            ref = make_object("ref", (*f(0.0, 0.0), 0.5), (0.5, 0.3, 0.5), 0.4 + extra)
            fig = make_object("fig", (*f(0.3, 1.2), 0.6), (0.2, 0.2, 0.3), 1.0 + extra)
            pose = pose_at(*f(-3.0, -1.0), 0.2 + extra)
            return ref, fig, pose

        ref, fig, pose = scene(False)
        ref_m, fig_m, pose_m = scene(True)
        ctx = ViewContext.for_pose(ref, pose, cfg)
        ctx_m = ViewContext.for_pose(ref_m, pose_m, cfg)
        for tag in ViewTag:
            assert ctx.holds(fig, tag, cfg) == ctx_m.holds(fig_m, tag, cfg)
        assert touches(fig, ref, cfg) == touches(fig_m, ref_m, cfg)
        assert is_close(fig, ref, cfg) == is_close(fig_m, ref_m, cfg)

    def test_robot_under_the_centroid_falls_back_to_its_own_frame(self, relation_cfg):
        ref = make_object("ref", (1.0, 1.0, 2.0))
        ctx = ViewContext.for_pose(ref, pose_at(1.0, 1.0, 0.3), relation_cfg)
        assert ctx.frame_note is FrameNote.DEGENERATE_VIEWPOINT
        assert ctx.fc.yaw == pytest.approx(0.3)
        assert ctx.fc.kind is FrameKind.CONTEXTUALISED


class TestRandomViewpoints:
    """Eight robot poses on a ring around the reference, in antipodal pairs."""

    SIDE_SWAPS = ((ViewTag.LEFT_OF, ViewTag.RIGHT_OF), (ViewTag.RIGHT_OF, ViewTag.LEFT_OF),
                  (ViewTag.IN_FRONT_OF, ViewTag.BEHIND), (ViewTag.BEHIND, ViewTag.IN_FRONT_OF))

    def ring(self, reference, rng):
        c = reference.box.center
        reach = float(rng.uniform(3.0, 6.0))
        start = float(rng.uniform(0.0, 2 * math.pi))
        angles = [start + k * math.pi / 4 for k in range(8)]
        return [pose_at(c.x + reach * math.cos(a), c.y + reach * math.sin(a), float(rng.uniform(0, 2 * math.pi)))
                for a in angles]

    @pytest.mark.parametrize("seed", range(100))
    def test_antipodal_poses_swap_sides_and_keep_verticals(self, seed):
        cfg = RelationConfig()
        rng = np.random.default_rng(1000 + seed)
        ref, fig = random_pair_scene(rng, seed, SCENE_LAYOUTS[seed % len(SCENE_LAYOUTS)]).objects
        contexts = [ViewContext.for_pose(ref, pose, cfg) for pose in self.ring(ref, rng)]
        answers = [{tag: ctx.holds(fig, tag, cfg) for tag in ViewTag} for ctx in contexts]

        for k in range(4):
            here, there = answers[k], answers[k + 4]
            for mine, theirs in self.SIDE_SWAPS:
                assert here[mine] == there[theirs], (seed, k, mine)
        for tag in (ViewTag.ABOVE, ViewTag.BELOW):
            assert len({a[tag] for a in answers}) == 1, (seed, tag)
