from app.geometry.algebra import (
    box_distance,
    box_intersection_volume,
    intersection_prism,
    prism_distance,
    prism_intersection,
    prism_overlap_volume,
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
from app.geometry.primitives import (
    DELTA_MIN,
    EPS_GEOM,
    EPS_VOL,
    ConvexPolygon2D,
    OrientedBox,
    Point3,
    Prism,
    normalize_angle,
    wrap_angle,
)
