"""Plans as produced by either planner family."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

PlanSource = Literal["classical", "llm"]


@dataclass(frozen=True)
class PlanStep:
    name: str
    parameters: tuple[str, ...] = ()
    reason: str | None = None
    confirm_reasoning: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("plan step needs an action name")

    def __str__(self) -> str:
        return "(" + " ".join((self.name,) + tuple(self.parameters)) + ")"


@dataclass(frozen=True)
class Plan:
    steps: tuple[PlanStep, ...] = ()
    reasoning: tuple[str, ...] | None = None
    source: PlanSource = "llm"
    gen_time_seconds: float = 0.0
    refusal: bool = False

    def __post_init__(self) -> None:
        if self.gen_time_seconds < 0:
            raise ValueError("gen_time_seconds must be non-negative")

    def __len__(self) -> int:
        return len(self.steps)

    def prefix(self, n: int) -> "Plan":
        return Plan(self.steps[:n], self.reasoning, self.source, self.gen_time_seconds, self.refusal)


def steps_from_pairs(pairs, source: PlanSource = "llm") -> Plan:
    """Build a plan from ``[(name, [args...]), ...]``; handy in tests and scripts."""
    return Plan(tuple(PlanStep(n, tuple(a)) for n, a in pairs), source=source)
