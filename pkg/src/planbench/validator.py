"""Step-by-step plan execution and outcome classification.

A plan is executed from the initial state until the first step that
cannot be ground or whose precondition does not hold. The number of steps
applied before that point is the plan's executed-action count; a plan
that runs to the end succeeds only if the goal holds in the final state.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import Literal

from .pddl import Domain, Problem
from .plan import Plan
from .planners.decode import PlanDecodeError, decode_plan_json, parse_sas_plan
from .world import (
    GroundingError,
    apply_action,
    build_type_index,
    check_applicable,
    goal_satisfied,
    ground,
    initial_state,
    unsatisfied_goals,
)

PREVIEW_LIMIT = 64


class Outcome(str, enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    NO_PLAN = "noPlan"


class FailureReason(str, enum.Enum):
    PRECONDITION_VIOLATION = "precondition_violation"
    UNKNOWN_ACTION = "unknown_action"
    ARITY_MISMATCH = "arity_mismatch"
    TYPE_MISMATCH = "type_mismatch"
    GOAL_NOT_SATISFIED = "goal_not_satisfied"


@dataclass(frozen=True)
class TraceResult:
    outcome: Outcome
    plan_length: int
    executed_actions: int
    reason: str | None = None
    failure_step: int | None = None
    failure_detail: str | None = None
    final_state_preview: tuple[str, ...] | None = None
    plan_cost: int | None = None

    def __post_init__(self) -> None:
        if self.executed_actions > self.plan_length:
            raise ValueError("executed_actions cannot exceed plan_length")
        if self.outcome is Outcome.SUCCESS and self.executed_actions != self.plan_length:
            raise ValueError("a successful plan executes every step")
        if self.outcome is Outcome.NO_PLAN and (self.plan_length or self.executed_actions):
            raise ValueError("a missing plan has no length")

    @property
    def success(self) -> bool:
        return self.outcome is Outcome.SUCCESS

    def to_dict(self) -> dict:
        d = asdict(self)
        d["outcome"] = self.outcome.value
        if self.final_state_preview is not None:
            d["final_state_preview"] = list(self.final_state_preview)
        return d


def no_plan(reason: str, detail: str | None = None) -> TraceResult:
    return TraceResult(Outcome.NO_PLAN, 0, 0, reason=reason, failure_detail=detail)


def _preview(state, limit: int) -> tuple[str, ...]:
    return tuple(sorted(str(a) for a in state))[:limit]


def validate_plan(domain: Domain, problem: Problem, plan: Plan, preview_limit: int = PREVIEW_LIMIT) -> TraceResult:
    index = build_type_index(domain, problem)
    state = initial_state(problem)
    cost = 0
    length = len(plan.steps)
    for i, step in enumerate(plan.steps):
        try:
            action = ground(domain, step.name, step.parameters, index)
        except GroundingError as exc:
            return TraceResult(
                Outcome.FAILURE, length, i, exc.reason, i, f"{step}: {exc}", _preview(state, preview_limit), cost
            )
        violated = check_applicable(state, action)
        if violated is not None:
            return TraceResult(
                Outcome.FAILURE,
                length,
                i,
                FailureReason.PRECONDITION_VIOLATION.value,
                i,
                f"{step}: {violated}",
                _preview(state, preview_limit),
                cost,
            )
        state = apply_action(state, action)
        # without a metric every action costs 1, as in planners' unit-cost mode
        cost += action.cost if problem.metric else 1
    if goal_satisfied(state, problem.goal):
        return TraceResult(Outcome.SUCCESS, length, length, final_state_preview=_preview(state, preview_limit), plan_cost=cost)
    missing = " ".join(str(g) for g in unsatisfied_goals(state, problem.goal))
    return TraceResult(
        Outcome.FAILURE,
        length,
        length,
        FailureReason.GOAL_NOT_SATISFIED.value,
        None,
        f"unsatisfied goal conditions: {missing}",
        _preview(state, preview_limit),
        cost,
    )


def validate_generated_plan(domain: Domain, problem: Problem, plan: Plan) -> TraceResult:
    """Validate a plan a planner returned.

    Unlike :func:`validate_plan`, an empty plan for a problem whose goal
    does not already hold counts as no plan at all (``refusal`` when the
    planner said the task is unsolvable, ``empty`` otherwise).
    """
    if not plan.steps and not goal_satisfied(initial_state(problem), problem.goal):
        return no_plan("refusal" if plan.refusal else "empty")
    return validate_plan(domain, problem, plan)


def validate_plan_text(
    domain: Domain, problem: Problem, plan_text: str, fmt: Literal["json", "sas"] = "json"
) -> TraceResult:
    try:
        plan = decode_plan_json(plan_text) if fmt == "json" else parse_sas_plan(plan_text)
    except PlanDecodeError as exc:
        return no_plan("unparseable", f"{exc.kind}: {exc}")
    return validate_generated_plan(domain, problem, plan)
