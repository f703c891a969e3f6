"""Command-line entry point: extract, validate, frames, oracle-check.

Environment variables prefixed QSR_ (or a .env file) set the defaults of
every threshold; a --config JSON file overrides them and flags override both.
Diagnostics go to stderr as JSON error payloads. Exit codes: 0 success,
1 invalid input or configuration or an out-of-band oracle disagreement,
2 internal error.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from app.config import (
    LOG_FILE,
    LOG_LEVEL,
    ORACLE_SAMPLES,
    ORACLE_SEED,
    EngineConfig,
    load_engine_config,
    validate_config,
)
from app.oracle.checker import run_agreement
from app.pipeline.extraction_graph import extract_qsr
from app.reasoning.relations import ViewContext, ViewTag
from app.scene.loader import box_record, dump_scene, load_scene
from app.scene.model import Scene
from app.scene.writer import FORMATS, write_triples
from app.utils.errors import QsrError, SceneError, TripleIoError, ValidationError
from app.utils.formatters import format_error_response
from app.utils.logger import log_error, log_event, setup_logging

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INTERNAL = 2


class CliUsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliUsageError(message, location=self.prog)


def _relation_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of engine settings (overrides QSR_* environment)")
    common.add_argument("--log-level", default=LOG_LEVEL, help="logging level on stderr (default: %(default)s)")
    common.add_argument("--log-file", default=LOG_FILE, help="also write logs to this file")

    thresholds = _Parser(add_help=False)
    thresholds.add_argument("--s", dest="halfspace_scale_s", type=float, help="halfspace depth scale")
    thresholds.add_argument("--T", dest="closeness_T", type=float, help="closeness threshold in metres")
    thresholds.add_argument("--touch-eps", dest="touch_eps", type=float, help="contact tolerance in metres")

    scene_args = _Parser(add_help=False)
    scene_args.add_argument("--scene", required=True, help="scene file (JSON)")
    scene_args.add_argument("--lenient", action="store_true", help="ignore unknown fields in the scene file")

    parser = _Parser(prog="spatial-qsr", description="Viewpoint-aware qualitative spatial relations for 3D scenes.")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    extract = commands.add_parser("extract", parents=[common, thresholds, scene_args],
                                  help="scene to figure-reference triples")
    extract.add_argument("--out", help="output file (default: stdout)")
    extract.add_argument("--format", choices=FORMATS, default="lines", help="triple format (default: %(default)s)")
    extract.add_argument("--relations", type=_relation_list,
                         help="comma-separated relation names to keep, e.g. LeftOf,Touches")
    extract.add_argument("--prune-T", dest="prune_T", type=float,
                         help="pair pruning radius in metres (default: --T)")
    extract.add_argument("--include-intrinsic", action="store_true", default=None,
                         help="also emit intrinsic-frame cardinal relations")

    commands.add_parser("validate", parents=[common, scene_args], help="check a scene file and exit")

    frames = commands.add_parser("frames", parents=[common, thresholds, scene_args],
                                 help="dump minimum boxes, CBBs and halfspace regions as a scene")
    frames.add_argument("--out", help="output file (default: stdout)")

    oracle = commands.add_parser("oracle-check", parents=[common, thresholds],
                                 help="compare the engine with the point-sampling oracle")
    oracle.add_argument("--scenes", choices=("random",), default="random", help="scene source")
    oracle.add_argument("--n", type=int, default=200, help="number of scenes (default: %(default)s)")
    oracle.add_argument("--seed", type=int, default=ORACLE_SEED, help="random seed (default: %(default)s)")
    oracle.add_argument("--samples", type=int, default=ORACLE_SAMPLES,
                        help="samples per region (default: %(default)s)")
    oracle.add_argument("--relations", type=_relation_list, help="comma-separated subset of relations to check")
    oracle.add_argument("--out", help="agreement report file (default: stdout)")
    return parser


def _engine_config(args: argparse.Namespace) -> EngineConfig:
    keys = ("halfspace_scale_s", "closeness_T", "touch_eps", "prune_T", "include_intrinsic")
    overrides = {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}
    return load_engine_config(args.config, overrides)


def _write_json(payload: Dict[str, Any], path: Optional[str]):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise TripleIoError(f"cannot write output: {e}", location=path) from e


def frames_dump(scene: Scene, cfg: EngineConfig) -> Dict[str, Any]:
    """Scene-shaped dump of every object's minimum box, CBB and halfspaces.

    Each entry is a box object labelled with its role so any scene reader or
    plotter can draw it.
    """
    relation_cfg = cfg.relation_config()
    payload = dump_scene(scene)
    objects = []
    for obj in scene.objects:
        ctx = ViewContext.for_pose(obj, scene.robot_pose, relation_cfg)
        objects.append({"id": f"{obj.id}/min_box", "labels": [{"label": obj.label, "confidence": 1.0}],
                        "box": box_record(obj.box)})
        objects.append({"id": f"{obj.id}/cbb", "labels": [{"label": f"cbb:{ctx.frame_note.value}", "confidence": 1.0}],
                        "box": box_record(ctx.cbb)})
        for tag in ViewTag:
            objects.append({"id": f"{obj.id}/{tag.value}",
                            "labels": [{"label": f"halfspace:{ctx.region_axis(tag)}", "confidence": 1.0}],
                            "box": box_record(ctx.region(tag))})
    payload["objects"] = objects
    return payload


def cmd_extract(args: argparse.Namespace) -> int:
    cfg = _engine_config(args)
    scene = load_scene(args.scene, strict=not args.lenient, cfg=cfg)
    triples = extract_qsr(scene, cfg=cfg, relations=args.relations)
    write_triples(triples, args.out, args.format)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    cfg = _engine_config(args)
    scene = load_scene(args.scene, strict=not args.lenient, cfg=cfg)
    log_event("SCENE_VALIDATION", f"{args.scene}: {len(scene)} objects, {len(scene.surfaces)} surfaces")
    _write_json({"status": "ok", "objects": len(scene), "surfaces": len(scene.surfaces)}, None)
    return EXIT_OK


def cmd_frames(args: argparse.Namespace) -> int:
    cfg = _engine_config(args)
    scene = load_scene(args.scene, strict=not args.lenient, cfg=cfg)
    _write_json(frames_dump(scene, cfg), args.out)
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    cfg = _engine_config(args)
    if args.n < 1:
        raise ValidationError("--n must be at least 1")
    report = run_agreement(args.n, seed=args.seed, samples=args.samples, cfg=cfg.relation_config(),
                           relations=args.relations)
    _write_json(report.to_dict(), args.out)
    if not report.passed:
        print(json.dumps(format_error_response(
            "ORACLE_DISAGREEMENT", f"{len(report.out_of_band)} out-of-band disagreements")), file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


COMMANDS = {
    "extract": cmd_extract,
    "validate": cmd_validate,
    "frames": cmd_frames,
    "oracle-check": cmd_oracle_check,
}


def _report(code: str, message: str):
    print(json.dumps(format_error_response(code, message)), file=sys.stderr)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse `argv`, run the subcommand and return the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except CliUsageError as e:
        _report(e.code, str(e))
        return EXIT_INVALID

    setup_logging(args.log_level, args.log_file)
    for problem in validate_config():
        log_event("CONFIG", problem, "warning")

    try:
        return COMMANDS[args.command](args)
    except (SceneError, ValueError) as e:
        log_event("CLI_ERROR", str(e), "error")
        _report(getattr(e, "code", "VALIDATION_ERROR"), str(e))
        return EXIT_INVALID
    except QsrError as e:
        log_error(args.command, e)
        _report(e.code, str(e))
        return EXIT_INTERNAL
    except Exception as e:
        log_error(args.command, e)
        _report("INTERNAL_ERROR", f"{type(e).__name__}: {e}")
        return EXIT_INTERNAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
