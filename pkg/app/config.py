import json
import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic import ValidationError as PydanticValidationError

from app.reasoning.relations import RelationConfig
from app.utils.errors import ParseError, ValidationError

load_dotenv()

ENV_PREFIX = "QSR_"

_env_problems: List[str] = []


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return float(raw)
    except ValueError:
        _env_problems.append(f"{ENV_PREFIX}{name}={raw!r} is not a number, using {default}")
        return default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        _env_problems.append(f"{ENV_PREFIX}{name}={raw!r} is not an integer, using {default}")
        return default


def _env_bool(name: str, default: bool) -> bool:
    raw = os.getenv(ENV_PREFIX + name)
    if raw is None or raw.strip() == "":
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


# Relation thresholds (metres unless noted)
CLOSENESS_T = _env_float("CLOSENESS_T", 0.5)
TOUCH_EPS = _env_float("TOUCH_EPS", 0.01)
HALFSPACE_SCALE = _env_float("HALFSPACE_SCALE", 2.0)
CONTAINMENT_TOL = _env_float("CONTAINMENT_TOL", 1e-3)
ADJACENCY_DELTA = _env_float("ADJACENCY_DELTA", 0.02)
PLANE_THICKNESS = _env_float("PLANE_THICKNESS", 0.02)
_prune_raw = os.getenv(ENV_PREFIX + "PRUNE_T")
PRUNE_T = _env_float("PRUNE_T", CLOSENESS_T) if _prune_raw else None
INCLUDE_INTRINSIC = _env_bool("INCLUDE_INTRINSIC", False)

# Logging
LOG_LEVEL = os.getenv(ENV_PREFIX + "LOG_LEVEL", "WARNING")
LOG_FILE = os.getenv(ENV_PREFIX + "LOG_FILE")

# Oracle
ORACLE_SAMPLES = _env_int("ORACLE_SAMPLES", 100_000)
ORACLE_SEED = _env_int("ORACLE_SEED", 42)


class EngineConfig(RelationConfig):
    """Tunable thresholds of the engine; every length is in metres.

    Extends the relation thresholds with environment defaults and the
    settings only the loader and the extraction pipeline read.
    """

    closeness_T: float = Field(default_factory=lambda: CLOSENESS_T, gt=0, allow_inf_nan=False)
    touch_eps: float = Field(default_factory=lambda: TOUCH_EPS, gt=0, allow_inf_nan=False)
    halfspace_scale_s: float = Field(default_factory=lambda: HALFSPACE_SCALE, gt=0, allow_inf_nan=False)
    containment_tol: float = Field(default_factory=lambda: CONTAINMENT_TOL, gt=0, lt=1)
    adjacency_delta: float = Field(default_factory=lambda: ADJACENCY_DELTA, gt=0, allow_inf_nan=False)
    plane_thickness_tau: float = Field(default_factory=lambda: PLANE_THICKNESS, gt=0)
    prune_T: Optional[float] = Field(default_factory=lambda: PRUNE_T, gt=0)
    include_intrinsic: bool = Field(default_factory=lambda: INCLUDE_INTRINSIC)

    @property
    def pruning_radius(self) -> float:
        return self.prune_T if self.prune_T is not None else self.closeness_T

    def relation_config(self) -> RelationConfig:
        return RelationConfig(**self.model_dump(include=set(RelationConfig.model_fields)))


def _describe(error: PydanticValidationError) -> str:
    parts = []
    for item in error.errors():
        where = ".".join(str(p) for p in item.get("loc", ())) or "config"
        parts.append(f"{where}: {item.get('msg')}")
    return "; ".join(parts)


def build_engine_config(values: Dict[str, Any]) -> EngineConfig:
    try:
        return EngineConfig(**values)
    except PydanticValidationError as e:
        raise ValidationError(_describe(e), location="config") from e


def load_engine_config(config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None) -> EngineConfig:
    """Defaults < environment/.env < config file < explicit overrides."""
    values: Dict[str, Any] = {}
    if config_path:
        try:
            with open(config_path, encoding="utf-8") as fh:
                loaded = json.load(fh)
        except OSError as e:
            raise ParseError(f"cannot read config file: {e}", location=config_path) from e
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, location=f"{config_path}:{e.lineno}:{e.colno}") from e
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object", location=config_path)
        values.update(loaded)
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return build_engine_config(values)


def validate_config() -> List[str]:
    return list(_env_problems)
