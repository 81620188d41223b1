"""Turning planner output text into :class:`~planbench.plan.Plan` values.

Two formats are understood: the JSON object LLM planners are asked to
return (``reasoning`` plus a ``plan`` array of ``name``/``parameters``/
``reason``/``confirm_reasoning`` objects) and Fast Downward's ``sas_plan``
files. JSON is located and decoded strictly; nothing is repaired.
"""

from __future__ import annotations

import json
import re

from ..plan import Plan, PlanStep

_FENCE = re.compile(r"```[\w+-]*[ \t]*\n?(.*?)(?:```|\Z)", re.S)
_REFUSAL = re.compile(
    r"no\s+(?:valid\s+|possible\s+|feasible\s+)?(?:solution|plan)s?\s+(?:exists?|is\s+possible|can\s+be\s+found)"
    r"|unsolvable|not\s+solvable|cannot\s+be\s+(?:solved|achieved|reached)|impossible\s+to\s+(?:solve|achieve|reach)",
    re.I,
)


class PlanDecodeError(Exception):
    kind = "unparseable"


class NoJsonObject(PlanDecodeError):
    kind = "no_json"

    def __init__(self) -> None:
        super().__init__("response contains no JSON object")


class Truncated(PlanDecodeError):
    kind = "truncated"

    def __init__(self, depth: int):
        self.depth = depth
        super().__init__(f"JSON object is cut off ({depth} unclosed brace(s) at end of text)")


class MalformedJson(PlanDecodeError):
    kind = "malformed_json"


class SchemaViolation(PlanDecodeError):
    kind = "schema_violation"

    def __init__(self, path: str, detail: str):
        self.path = path
        self.detail = detail
        super().__init__(f"{path}: {detail}")


class MalformedLine(PlanDecodeError):
    kind = "malformed_line"

    def __init__(self, line_no: int, text: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: not a plan step: {text!r}")


def _first_object(text: str) -> str:
    start = text.find("{")
    if start < 0:
        raise NoJsonObject()
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        c = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif c == "\\":
                escaped = True
            elif c == '"':
                in_string = False
        elif c == '"':
            in_string = True
        elif c == "{":
            depth += 1
        elif c == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    raise Truncated(depth)


def extract_json_object(text: str) -> str:
    """Return the first balanced ``{...}`` in text, looking inside code fences first."""
    for block in _FENCE.findall(text):
        if "{" in block:
            return _first_object(block)
    return _first_object(text)


def _string(value, path: str, required: bool = True) -> str | None:
    if value is None and not required:
        return None
    if not isinstance(value, str):
        raise SchemaViolation(path, f"expected string, got {type(value).__name__}")
    return value


def decode_plan_json(raw_text: str) -> Plan:
    snippet = extract_json_object(raw_text)
    try:
        obj = json.loads(snippet)
    except json.JSONDecodeError as exc:
        raise MalformedJson(f"invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise SchemaViolation("$", "expected an object")
    if "plan" not in obj:
        raise SchemaViolation("$.plan", "missing")
    raw_steps = obj["plan"]
    if not isinstance(raw_steps, list):
        raise SchemaViolation("$.plan", "expected an array")

    steps = []
    for i, item in enumerate(raw_steps):
        path = f"$.plan[{i}]"
        if not isinstance(item, dict):
            raise SchemaViolation(path, "expected an object")
        name = _string(item.get("name"), f"{path}.name").strip().lower()
        if not name:
            raise SchemaViolation(f"{path}.name", "empty action name")
        params = item.get("parameters")
        if not isinstance(params, list):
            raise SchemaViolation(f"{path}.parameters", "expected an array")
        args = tuple(_string(p, f"{path}.parameters[{j}]").strip().lower() for j, p in enumerate(params))
        steps.append(
            PlanStep(
                name,
                args,
                _string(item.get("reason"), f"{path}.reason", required=False),
                _string(item.get("confirm_reasoning"), f"{path}.confirm_reasoning", required=False),
            )
        )

    reasoning = obj.get("reasoning")
    if isinstance(reasoning, str):
        reasoning = [reasoning]
    if reasoning is not None:
        if not isinstance(reasoning, list):
            raise SchemaViolation("$.reasoning", "expected an array of strings")
        reasoning = tuple(_string(r, f"$.reasoning[{j}]") for j, r in enumerate(reasoning))

    refusal = not steps and bool(_REFUSAL.search(" ".join(reasoning or ()) + " " + raw_text))
    return Plan(tuple(steps), reasoning, source="llm", refusal=refusal)


def plan_to_json(plan: Plan) -> dict:
    """Serialise a plan in the same shape LLM planners are asked to produce."""
    out: dict = {"reasoning": list(plan.reasoning or ()), "plan": []}
    for step in plan.steps:
        out["plan"].append(
            {
                "name": step.name,
                "parameters": list(step.parameters),
                "reason": step.reason or "",
                "confirm_reasoning": step.confirm_reasoning or "",
            }
        )
    return out


def parse_sas_plan(text: str) -> Plan:
    steps = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if not (line.startswith("(") and line.endswith(")")):
            raise MalformedLine(n, raw)
        parts = line[1:-1].lower().split()
        if not parts or any(c in line[1:-1] for c in "()"):
            raise MalformedLine(n, raw)
        steps.append(PlanStep(parts[0], tuple(parts[1:])))
    return Plan(tuple(steps), source="classical")


def format_sas_plan(plan: Plan, cost: int | None = None) -> str:
    lines = [str(step) for step in plan.steps]
    if cost is not None:
        lines.append(f"; cost = {cost} (unit cost)" if cost == len(plan.steps) else f"; cost = {cost} (general cost)")
    return "".join(line + "\n" for line in lines)
