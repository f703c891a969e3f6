import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import cKDTree

from app.geometry.algebra import (
    box_distance,
    box_intersection_volume,
    intersection_prism,
    rotate_box_about_axis,
    scale_prism,
)
from app.geometry.envelope import (
    convex_hull_2d,
    fit_min_oriented_box,
    floor_slab,
    min_oriented_rect,
    plane_normal,
    wall_slab,
)
from app.geometry.primitives import DELTA_MIN, HALF_PI, OrientedBox, Point3
from app.oracle.sampling import sample_box_surface, sample_box_volume
from app.utils.errors import DegenerateInput, MisalignedBox, UnitError
from tests.conftest import make_box


@st.composite
def polygons(draw, n=20):
    seed = draw(st.integers(min_value=0, max_value=2 ** 31 - 1))
    rng = np.random.default_rng(seed)
    angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
    radii = rng.uniform(0.5, 3.0, n)
    return np.column_stack([radii * np.cos(angles), radii * np.sin(angles)])


@st.composite
def boxes(draw):
    center = draw(st.tuples(*(st.floats(min_value=-3.0, max_value=3.0) for _ in range(3))))
    half = draw(st.tuples(*(st.floats(min_value=0.05, max_value=1.5) for _ in range(3))))
    yaw = draw(st.floats(min_value=0.0, max_value=2.0 * math.pi))
    return make_box(center, half, yaw)


class TestPrimitives:
    def test_non_finite_point_rejected(self):
        with pytest.raises(UnitError):
            Point3(0.0, float("nan"), 0.0)

    def test_zero_extent_rejected(self):
        with pytest.raises(DegenerateInput):
            make_box(half=(0.5, 0.0, 0.5))

    def test_yaw_normalized(self):
        assert make_box(yaw=-HALF_PI).yaw == pytest.approx(3 * HALF_PI)

    def test_aligned_to_swaps_extents_on_quarter_turn(self):
        box = make_box(half=(1.0, 2.0, 3.0), yaw=HALF_PI)
        aligned = box.aligned_to(0.0)
        assert aligned.half_extents == pytest.approx((2.0, 1.0, 3.0))
        assert np.allclose(np.sort(aligned.corners(), axis=0), np.sort(box.corners(), axis=0))

    def test_aligned_to_rejects_skewed_yaw(self):
        with pytest.raises(MisalignedBox):
            make_box(yaw=0.3).aligned_to(0.0)

    def test_signed_distance(self):
        box = make_box(half=(1.0, 1.0, 1.0))
        d = box.signed_distance(np.array([[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0]]))
        assert d == pytest.approx([-1.0, 1.0, math.sqrt(2.0)])


class TestEnvelope:
    def test_hull_drops_interior_and_collinear_points(self):
        pts = [(0, 0), (1, 0), (2, 0), (2, 2), (0, 2), (1, 1), (0, 1)]
        hull = convex_hull_2d(pts)
        assert hull.vertices == ((0.0, 0.0), (2.0, 0.0), (2.0, 2.0), (0.0, 2.0))
        assert hull.area > 0.0

    def test_hull_of_collinear_points_is_degenerate(self):
        with pytest.raises(DegenerateInput):
            convex_hull_2d([(0, 0), (1, 1), (2, 2)])

    def test_rotated_rectangle_is_recovered(self):
        yaw = 0.4
        box = make_box(half=(2.0, 0.5, 1.0), yaw=yaw)
        center, half, found = min_oriented_rect(convex_hull_2d(box.footprint_array()))
        assert 4.0 * half[0] * half[1] == pytest.approx(4.0, rel=1e-9)
        assert found == pytest.approx(yaw)
        assert center == pytest.approx([0.0, 0.0], abs=1e-9)

    def test_square_tie_resolves_to_smallest_yaw(self):
        _, _, yaw = min_oriented_rect(convex_hull_2d([(0, 0), (1, 0), (1, 1), (0, 1)]))
        assert yaw == 0.0

    @settings(max_examples=25, deadline=None)
    @given(polygons())
    def test_min_rect_beats_rotation_sweep(self, pts):
        hull = convex_hull_2d(pts)
        _, half, _ = min_oriented_rect(hull)
        best = 4.0 * half[0] * half[1]
        ring = hull.as_array()
        for theta in np.radians(np.arange(0.0, 90.0, 0.5)):
            c, s = math.cos(theta), math.sin(theta)
            u = ring @ np.array([c, s])
            v = ring @ np.array([-s, c])
            assert best <= (u.max() - u.min()) * (v.max() - v.min()) * (1.0 + 1e-9)

    def test_fitted_box_contains_its_cloud(self):
        known = make_box((1.0, -2.0, 0.5), (0.8, 0.3, 0.5), 0.7)
        pts = sample_box_volume(known, 1000, np.random.default_rng(3))
        fitted = fit_min_oriented_box(pts)
        assert np.all(fitted.contains_points(pts, tol=1e-9))
        assert fitted.volume <= 1.05 * known.volume
        assert 0.0 <= fitted.yaw < HALF_PI

    def test_single_point_inflated(self):
        box = fit_min_oriented_box([(1.0, 2.0, 3.0)])
        assert box.half_extents == pytest.approx((DELTA_MIN, DELTA_MIN, DELTA_MIN))
        assert box.center.as_tuple() == pytest.approx((1.0, 2.0, 3.0))

    def test_vertical_segment_gets_a_footprint(self):
        box = fit_min_oriented_box([(0.0, 0.0, 0.0), (0.0, 0.0, 2.0)])
        assert box.hz == pytest.approx(1.0)
        assert box.hx == pytest.approx(DELTA_MIN)

    def test_floor_slab_sits_below_its_plane(self):
        slab = floor_slab([(0, 0, 0), (4, 0, 0), (4, 2, 0), (0, 2, 0)], 0.02)
        assert slab.z_max == pytest.approx(0.0)
        assert slab.z_min == pytest.approx(-0.02)
        assert slab.volume == pytest.approx(8.0 * 0.02)

    def test_wall_slab_grows_away_from_observer(self):
        polygon = [(3, -2, 0), (3, 2, 0), (3, 2, 2.5), (3, -2, 2.5)]
        near_side = wall_slab(polygon, 0.02, observer=Point3(0.0, 0.0, 0.0))
        far_side = wall_slab(polygon, 0.02, observer=Point3(6.0, 0.0, 0.0))
        assert near_side.center.x == pytest.approx(3.01)
        assert far_side.center.x == pytest.approx(2.99)
        assert near_side.hz == pytest.approx(1.25)

    def test_plane_normal(self):
        n = plane_normal([(0, 0, 1), (1, 0, 1), (0, 1, 1)])
        assert abs(n[2]) == pytest.approx(1.0)


class TestAlgebra:
    def test_distance_of_separated_boxes(self):
        a = make_box()
        b = make_box((2.0, 0.0, 0.0))
        assert box_distance(a, b) == pytest.approx(1.0)

    def test_distance_combines_xy_and_z_gaps(self):
        a = make_box()
        b = make_box((2.0, 0.0, 1.5))
        assert box_distance(a, b) == pytest.approx(math.hypot(1.0, 0.5))

    def test_touching_and_overlapping_boxes_have_zero_distance(self):
        a = make_box()
        assert box_distance(a, make_box((1.0, 0.0, 0.0))) == 0.0
        assert box_distance(a, make_box((0.5, 0.2, 0.0))) == 0.0

    @settings(max_examples=30, deadline=None)
    @given(boxes(), boxes())
    def test_distance_is_symmetric(self, a, b):
        assert box_distance(a, b) == box_distance(b, a)
        assert box_intersection_volume(a, b) == box_intersection_volume(b, a)

    def test_distance_against_sampled_pairs(self):
        rng = np.random.default_rng(11)
        a = make_box((0.0, 0.0, 0.5), (0.6, 0.3, 0.5), 0.4)
        b = make_box((1.8, 0.9, 0.8), (0.4, 0.5, 0.3), 1.1)
        sa = sample_box_surface(a, 20_000, rng)
        sb = sample_box_surface(b, 20_000, rng)
        sampled = float(cKDTree(sa).query(sb)[0].min())
        analytic = box_distance(a, b)
        assert analytic <= sampled + 1e-9
        assert sampled <= analytic + 5e-2

    def test_rotated_prism_overlap_matches_monte_carlo(self):
        a = make_box(half=(0.5, 0.5, 0.5))
        b = make_box(half=(0.5, 0.5, 0.5), yaw=math.pi / 4.0)
        analytic = box_intersection_volume(a, b)
        assert analytic == pytest.approx(2.0 * (math.sqrt(2.0) - 1.0), rel=1e-9)
        pts = sample_box_volume(a, 200_000, np.random.default_rng(5))
        estimate = a.volume * float(np.mean(b.contains_points(pts)))
        assert estimate == pytest.approx(analytic, rel=0.01)

    def test_disjoint_boxes_have_no_intersection(self):
        a, b = make_box(), make_box((3.0, 0.0, 0.0))
        assert box_intersection_volume(a, b) == 0.0
        assert intersection_prism(a, b) is None

    def test_contained_box_volume(self):
        inner = make_box(half=(0.1, 0.2, 0.3), yaw=0.3)
        assert box_intersection_volume(make_box(), inner) == pytest.approx(inner.volume)

    def test_scale_prism_scales_volume_cubically(self):
        prism = intersection_prism(make_box(), make_box((0.5, 0.5, 0.5)))
        scaled = scale_prism(prism, 1.1)
        assert scaled.volume == pytest.approx(prism.volume * 1.1 ** 3)
        assert scaled.centroid.as_tuple() == pytest.approx(prism.centroid.as_tuple())

    def test_rotation_about_axis(self):
        box = make_box((1.0, 0.0, 2.0), (0.5, 0.2, 0.1))
        turned = rotate_box_about_axis(box, Point3(0.0, 0.0, 0.0), HALF_PI)
        assert turned.center.as_tuple() == pytest.approx((0.0, 1.0, 2.0))
        assert turned.yaw == pytest.approx(HALF_PI)
        assert turned.volume == pytest.approx(box.volume)
