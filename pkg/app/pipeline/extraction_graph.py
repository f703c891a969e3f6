import time
from typing import Any, Dict, List, Optional

from langgraph.graph import END, StateGraph

from app.config import EngineConfig
from app.pipeline.nodes import emit_node, evaluate_pairs_node, prune_pairs_node, select_references_node
from app.pipeline.state import ExtractionState
from app.reasoning.frames import RobotPose
from app.scene.model import RelationTriple, Scene
from app.utils.logger import log_event, log_performance


class QsrExtractor:
    """Scene to figure-reference triples, as a LangGraph workflow.

    select_references -> prune_pairs -> evaluate_pairs -> emit; scenes with
    fewer than two objects skip straight to emit.
    """

    def __init__(self):
        self.graph = self._build_graph()
        log_event("PIPELINE", "QSR extraction workflow initialized", "debug")

    def _build_graph(self):
        workflow = StateGraph(ExtractionState)

        workflow.add_node("select_references", select_references_node)
        workflow.add_node("prune_pairs", prune_pairs_node)
        workflow.add_node("evaluate_pairs", evaluate_pairs_node)
        workflow.add_node("emit", emit_node)

        workflow.set_entry_point("select_references")

        workflow.add_conditional_edges(
            "select_references",
            self._route_after_selection,
            {"prune": "prune_pairs", "emit": "emit"},
        )
        workflow.add_edge("prune_pairs", "evaluate_pairs")
        workflow.add_edge("evaluate_pairs", "emit")
        workflow.add_edge("emit", END)

        return workflow.compile()

    @staticmethod
    def _route_after_selection(state: ExtractionState) -> str:
        return "prune" if len(state["references"]) >= 2 else "emit"

    def run(self, scene: Scene, robot_pose: Optional[RobotPose] = None, cfg: Optional[EngineConfig] = None,
            relations: Optional[List[str]] = None) -> Dict[str, Any]:
        """Invoke the workflow and return its final state."""
        cfg = cfg or EngineConfig()
        started = time.perf_counter()
        initial_state: ExtractionState = {
            "scene": scene,
            "robot_pose": robot_pose or scene.robot_pose,
            "config": cfg,
            "relation_config": cfg.relation_config(),
            "relation_filter": relations,
            "references": [],
            "candidate_pairs": [],
            "evaluation_log": [],
            "triples": [],
            "steps_completed": [],
        }
        final_state = self.graph.invoke(initial_state)
        log_performance(
            "extract_qsr",
            time.perf_counter() - started,
            f"{len(final_state['candidate_pairs'])} pairs, {len(final_state['triples'])} triples",
        )
        return final_state

    def extract(self, scene: Scene, robot_pose: Optional[RobotPose] = None, cfg: Optional[EngineConfig] = None,
                relations: Optional[List[str]] = None) -> List[RelationTriple]:
        return self.run(scene, robot_pose, cfg, relations)["triples"]


qsr_extractor = QsrExtractor()


def extract_qsr(scene: Scene, robot_pose: Optional[RobotPose] = None, cfg: Optional[EngineConfig] = None,
                relations: Optional[List[str]] = None) -> List[RelationTriple]:
    """Figure-reference triples for every nearby pair; an empty scene gives []."""
    return qsr_extractor.extract(scene, robot_pose, cfg, relations)
