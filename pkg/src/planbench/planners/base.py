from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from ..plan import Plan


class ConfigError(ValueError):
    """A planner or campaign configuration is invalid."""


class PlannerError(Exception):
    """The planner produced no usable output.

    ``reason`` is recorded on the resulting no-plan episode; ``environmental``
    marks failures of the surroundings (missing binary, unreachable or
    rejecting endpoint) rather than of the planner itself.
    """

    reason = "planner_error"
    environmental = False


class TransportError(PlannerError):
    reason = "transport"
    environmental = True


class AuthError(PlannerError):
    reason = "auth"
    environmental = True


class MissingCredential(AuthError):
    """The API key environment variable is unset."""


class PlannerTimeout(PlannerError):
    reason = "timeout"


class BinaryNotFound(PlannerError):
    reason = "binary_not_found"
    environmental = True


class SubprocessFailure(PlannerError):
    reason = "subprocess_failure"
    environmental = True

    def __init__(self, exit_code: int, stderr_tail: str):
        self.exit_code = exit_code
        self.stderr_tail = stderr_tail
        super().__init__(f"planner exited with code {exit_code}: {stderr_tail}")


class NoSolutionFound(PlannerError):
    reason = "no_solution"


@dataclass(frozen=True)
class PlannerResponse:
    raw_text: str
    plan: Plan | None
    decode_error: str | None
    latency_seconds: float
    truncated: bool = False
    decode_kind: str | None = None

    def __post_init__(self) -> None:
        if self.raw_text and (self.plan is None) == (self.decode_error is None):
            raise ValueError("exactly one of plan and decode_error must be set")
        if self.latency_seconds < 0:
            raise ValueError("latency must be non-negative")

    @property
    def no_plan_reason(self) -> str | None:
        """Reason this response yields no plan, or None when a plan was decoded."""
        if self.plan is not None:
            return None
        if self.truncated:
            return "truncated"
        if not self.raw_text:
            return "empty_response"
        return "unparseable"


class Planner(Protocol):
    name: str
    concurrency_key: str | None
    max_concurrency: int

    def available(self) -> str | None: ...

    def solve(self, domain_file: Path, problem_file: Path) -> PlannerResponse: ...
