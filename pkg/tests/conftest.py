import os

import pytest

from app.config import EngineConfig
from app.geometry.primitives import OrientedBox, Point3
from app.reasoning.frames import RobotPose
from app.reasoning.relations import RelationConfig
from app.scene.loader import load_scene
from app.scene.model import SceneObject

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")
EXTINGUISHERS_PATH = os.path.join(FIXTURES, "extinguishers.scene.json")


def make_box(center=(0.0, 0.0, 0.0), half=(0.5, 0.5, 0.5), yaw=0.0) -> OrientedBox:
    return OrientedBox(Point3(*center), tuple(half), yaw)


def make_object(object_id, center=(0.0, 0.0, 0.0), half=(0.5, 0.5, 0.5), yaw=0.0, **kwargs) -> SceneObject:
    return SceneObject(object_id, make_box(center, half, yaw), **kwargs)


@pytest.fixture
def engine_cfg():
    # explicit values so QSR_* variables in the environment cannot leak in
    return EngineConfig(
        closeness_T=0.5,
        touch_eps=0.01,
        halfspace_scale_s=2.0,
        containment_tol=1e-3,
        adjacency_delta=0.02,
        plane_thickness_tau=0.02,
        prune_T=None,
        include_intrinsic=False,
    )


@pytest.fixture
def relation_cfg():
    return RelationConfig()


@pytest.fixture
def origin_pose():
    return RobotPose(Point3(0.0, 0.0, 0.0), 0.0)


@pytest.fixture
def extinguisher_path():
    return EXTINGUISHERS_PATH


@pytest.fixture
def extinguisher_scene(engine_cfg):
    return load_scene(EXTINGUISHERS_PATH, cfg=engine_cfg)
