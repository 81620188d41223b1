import json
from pathlib import Path

from .base import (
    AuthError,
    BinaryNotFound,
    ConfigError,
    MissingCredential,
    NoSolutionFound,
    Planner,
    PlannerError,
    PlannerResponse,
    PlannerTimeout,
    SubprocessFailure,
    TransportError,
)
from .decode import (
    MalformedJson,
    MalformedLine,
    NoJsonObject,
    PlanDecodeError,
    SchemaViolation,
    Truncated,
    decode_plan_json,
    extract_json_object,
    format_sas_plan,
    parse_sas_plan,
    plan_to_json,
)
from .fd import FdPlanner, FdPlannerConfig, find_fast_downward, run_fast_downward, select_plan_file
from .llm import LlmPlanner, LlmPlannerConfig, build_request_body, request_llm_plan
from .prompt import RESPONSE_TEMPLATE, SYSTEM_PROMPT, build_prompt


PRESET_DIR = Path(__file__).resolve().parent.parent / "data" / "planners"


def preset_names() -> list[str]:
    return sorted(p.stem for p in PRESET_DIR.glob("*.json"))


def planner_from_dict(data: dict, max_concurrency: int | None = None) -> Planner:
    """Build a planner from a config mapping whose ``kind`` is ``fd`` or ``llm``."""
    kind = data.get("kind", "llm")
    if kind == "fd":
        data = dict(data)
        mc = data.pop("max_concurrency", 1)
        return FdPlanner(FdPlannerConfig.from_dict(data), max_concurrency=mc)
    if kind == "llm":
        return LlmPlanner(LlmPlannerConfig.from_dict(data))
    raise ConfigError(f"unknown planner kind {kind!r}")


def load_planner_config(ref: str | Path) -> dict:
    """Read a planner config from a JSON file path or a bundled preset name."""
    path = Path(ref)
    if not path.is_file() and (PRESET_DIR / f"{ref}.json").is_file():
        path = PRESET_DIR / f"{ref}.json"
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{ref}: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{ref}: expected a JSON object")
    return data


def load_planner(ref: str | Path) -> Planner:
    try:
        return planner_from_dict(load_planner_config(ref))
    except ConfigError as exc:
        raise ConfigError(f"{ref}: {exc}") from None
