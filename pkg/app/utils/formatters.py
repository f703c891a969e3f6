import json
from typing import Any, Dict, Iterable, List, Optional

from app.scene.model import RelationTriple

TABLE_COLUMNS = ("figure", "relation", "reference", "frame")


def sort_triples(triples: Iterable[RelationTriple]) -> List[RelationTriple]:
    """Deterministic order: reference, figure, relation, frame note."""
    return sorted(set(triples), key=lambda t: t.sort_key())


def filter_triples(triples: Iterable[RelationTriple], relations: Optional[Iterable[str]]) -> List[RelationTriple]:
    if not relations:
        return list(triples)
    wanted = {r.strip() for r in relations if r.strip()}
    return [t for t in triples if t.relation in wanted]


def triple_to_record(triple: RelationTriple) -> Dict[str, Any]:
    return {
        "figure": triple.figure_id,
        "relation": triple.relation,
        "reference": triple.reference_id,
        "frame": triple.frame_note.value,
        "audit": list(triple.audit),
    }


def record_to_triple(record: Dict[str, Any]) -> RelationTriple:
    return RelationTriple(
        figure_id=record["figure"],
        relation=record["relation"],
        reference_id=record["reference"],
        frame_note=record.get("frame", "global"),
        audit=tuple(record.get("audit", ())),
    )


def render_lines(triples: Iterable[RelationTriple]) -> str:
    """One JSON record per line, keys sorted."""
    lines = [json.dumps(triple_to_record(t), sort_keys=True) for t in sort_triples(triples)]
    return "".join(line + "\n" for line in lines)


def render_table(triples: Iterable[RelationTriple]) -> str:
    rows = [(t.figure_id, t.relation, t.reference_id, t.frame_note.value) for t in sort_triples(triples)]
    if not rows:
        return ""
    header = tuple(c.upper() for c in TABLE_COLUMNS)
    widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]

    def fmt(row):
        return "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()

    return "\n".join([fmt(header)] + [fmt(r) for r in rows]) + "\n"


def format_error_response(error_code: str, error_message: str) -> Dict[str, Any]:
    """Format standardized error payloads"""
    error_map = {
        "QSR_ERROR": "The spatial relation engine failed.",
        "SCENE_ERROR": "Scene input was rejected.",
        "DEGENERATE_INPUT": "Geometry is degenerate (empty, flat or non-finite).",
        "DEGENERATE_VIEWPOINT": "The robot viewpoint is undefined for this object.",
        "MISALIGNED_BOX": "Box is not aligned with the requested frame.",
        "NO_INTERSECTION": "The two solids do not intersect.",
        "PARSE_ERROR": "Scene or config file could not be parsed.",
        "VALIDATION_ERROR": "Input failed validation.",
        "UNIT_ERROR": "Input holds non-finite values.",
        "IO_ERROR": "Output could not be written.",
        "ORACLE_DISAGREEMENT": "Engine and oracle disagree outside the boundary band.",
        "INTERNAL_ERROR": "An unexpected error occurred.",
    }

    return {
        "status": "error",
        "error": {
            "code": error_code if error_code in error_map else "INTERNAL_ERROR",
            "message": error_message or error_map.get(error_code, error_map["INTERNAL_ERROR"]),
        },
    }
