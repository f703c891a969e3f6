from typing import Any, Dict, List, Optional, Tuple, TypedDict

from app.config import EngineConfig
from app.reasoning.frames import RobotPose
from app.reasoning.relations import RelationConfig
from app.scene.model import RelationTriple, Scene, SceneObject


class ExtractionState(TypedDict, total=False):
    scene: Scene
    robot_pose: RobotPose
    config: EngineConfig
    relation_config: RelationConfig
    relation_filter: Optional[List[str]]

    references: List[SceneObject]
    candidate_pairs: List[Tuple[str, str, float]]
    evaluation_log: List[Dict[str, Any]]

    triples: List[RelationTriple]
    steps_completed: List[str]
