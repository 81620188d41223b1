"""Per-domain and overall statistics over episode records.

Success rate is over all problems of a domain. Plan length and executed
actions are averaged over episodes that produced a plan. Overall
(``MEAN``) figures weight each domain by its number of problems, and
execution fidelity is the ratio of the overall mean executed actions to
the overall mean plan length.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from ..runner import EpisodeRecord, domain_sort_key
from ..validator import Outcome


class EmptyInput(ValueError):
    pass


class DuplicateEpisode(ValueError):
    def __init__(self, planner: str, domain: str, problem: str):
        self.planner = planner
        self.domain = domain
        self.problem = problem
        super().__init__(f"more than one record for {planner} on {domain}/{problem}")


@dataclass(frozen=True)
class DomainSummary:
    planner: str
    domain: str
    problems_total: int
    solved: int
    success_rate_pct: float
    mean_plan_length: float | None  # None when no episode produced a plan
    mean_executed_actions: float | None
    no_plan_count: int
    mean_planning_time_s: float
    episodes: int

    def __post_init__(self) -> None:
        if not 0 <= self.success_rate_pct <= 100:
            raise ValueError("success rate out of range")
        if (self.mean_plan_length is None) != (self.mean_executed_actions is None):
            raise ValueError("plan length and executed actions are both present or both absent")
        if self.mean_plan_length is not None and self.mean_executed_actions > self.mean_plan_length + 1e-9:
            raise ValueError("mean executed actions exceed mean plan length")


@dataclass(frozen=True)
class PlannerSummary:
    planner: str
    problems_total: int
    solved: int
    overall_success_rate_pct: float
    overall_mean_plan_length: float | None
    overall_mean_executed_actions: float | None
    execution_fidelity_pct: float | None
    mean_planning_time_s: float | None

    def __post_init__(self) -> None:
        if self.execution_fidelity_pct is not None and self.execution_fidelity_pct > 100 + 1e-9:
            raise ValueError("fidelity above 100%")


@dataclass(frozen=True)
class GridCell:
    domain: str
    problem: str
    outcome: Outcome


@dataclass(frozen=True)
class OutcomeGrid:
    rows: tuple[tuple[str, tuple[GridCell, ...]], ...]

    @property
    def planners(self) -> list[str]:
        return [name for name, _ in self.rows]

    def row(self, planner: str) -> tuple[GridCell, ...]:
        for name, cells in self.rows:
            if name == planner:
                return cells
        raise KeyError(planner)


def summarize_domain(records: Sequence[EpisodeRecord], problems_total: int | None = None) -> DomainSummary:
    if not records:
        raise EmptyInput("no records to summarize")
    planner, domain = records[0].planner, records[0].domain
    if any(r.planner != planner or r.domain != domain for r in records):
        raise ValueError("records must share planner and domain")
    distinct = len({r.problem for r in records})
    if problems_total is None:
        problems_total = distinct
    if problems_total < distinct:
        raise ValueError(f"{domain}: {distinct} problems in records but problems_total is {problems_total}")

    solved = sum(r.outcome == Outcome.SUCCESS.value for r in records)
    with_plan = [r for r in records if r.outcome != Outcome.NO_PLAN.value]
    pl = ac = None
    if with_plan:
        pl = sum(r.plan_length for r in with_plan) / len(with_plan)
        ac = sum(r.executed_actions for r in with_plan) / len(with_plan)
    return DomainSummary(
        planner=planner,
        domain=domain,
        problems_total=problems_total,
        solved=solved,
        success_rate_pct=100.0 * solved / problems_total,
        mean_plan_length=pl,
        mean_executed_actions=ac,
        no_plan_count=len(records) - len(with_plan),
        mean_planning_time_s=sum(r.planning_time_s for r in records) / len(records),
        episodes=len(records),
    )


def summarize_planner(domain_summaries: Sequence[DomainSummary]) -> PlannerSummary:
    if not domain_summaries:
        raise EmptyInput("no domain summaries")
    planner = domain_summaries[0].planner
    total = sum(d.problems_total for d in domain_summaries)
    solved = sum(d.solved for d in domain_summaries)

    planned = [d for d in domain_summaries if d.mean_plan_length is not None]
    weight = sum(d.problems_total for d in planned)
    pl = ac = fidelity = None
    if weight:
        pl = sum(d.problems_total * d.mean_plan_length for d in planned) / weight
        ac = sum(d.problems_total * d.mean_executed_actions for d in planned) / weight
        if pl > 0:
            fidelity = 100.0 * ac / pl

    episodes = sum(d.episodes for d in domain_summaries)
    time_s = sum(d.mean_planning_time_s * d.episodes for d in domain_summaries) / episodes if episodes else None
    return PlannerSummary(
        planner=planner,
        problems_total=total,
        solved=solved,
        overall_success_rate_pct=100.0 * solved / total if total else 0.0,
        overall_mean_plan_length=pl,
        overall_mean_executed_actions=ac,
        execution_fidelity_pct=fidelity,
        mean_planning_time_s=time_s,
    )


def check_unique(records: Iterable[EpisodeRecord]) -> None:
    seen = set()
    for r in records:
        key = (r.planner, r.domain, r.problem)
        if key in seen:
            raise DuplicateEpisode(*key)
        seen.add(key)


def build_outcome_grid(records: Sequence[EpisodeRecord]) -> OutcomeGrid:
    """One cell per (planner, problem), planners in order of first appearance."""
    check_unique(records)
    planners: dict[str, list[EpisodeRecord]] = {}
    for r in records:
        planners.setdefault(r.planner, []).append(r)
    rows = []
    for name, recs in planners.items():
        recs = sorted(recs, key=lambda r: (domain_sort_key(r.domain), r.problem))
        rows.append((name, tuple(GridCell(r.domain, r.problem, Outcome(r.outcome)) for r in recs)))
    return OutcomeGrid(tuple(rows))


@dataclass(frozen=True)
class Report:
    domains: tuple[str, ...]
    domain_summaries: dict  # planner -> tuple[DomainSummary, ...] in domain order
    planner_summaries: tuple[PlannerSummary, ...]
    grid: OutcomeGrid


def build_report(records: Sequence[EpisodeRecord], problems_total: dict[str, int] | None = None) -> Report:
    """Aggregate a run's records.

    ``problems_total`` maps domain name to its problem count (normally from
    the benchmark directory); when omitted, the distinct problems seen in the
    records are counted instead, across all planners.
    """
    if not records:
        raise EmptyInput("no records")
    grid = build_outcome_grid(records)
    if problems_total is None:
        problems_total = {}
        for r in records:
            problems_total.setdefault(r.domain, set()).add(r.problem)
        problems_total = {d: len(p) for d, p in problems_total.items()}
    unknown = {r.domain for r in records} - set(problems_total)
    if unknown:
        raise ValueError(f"records mention domain(s) not in the benchmark: {', '.join(sorted(unknown))}")
    domains = tuple(sorted(problems_total, key=domain_sort_key))

    by_planner: dict[str, dict[str, list[EpisodeRecord]]] = {}
    for r in records:
        by_planner.setdefault(r.planner, {}).setdefault(r.domain, []).append(r)
    domain_summaries = {}
    planner_summaries = []
    for planner, per_domain in by_planner.items():
        sums = []
        for d in domains:
            if d in per_domain:
                sums.append(summarize_domain(per_domain[d], problems_total[d]))
            else:
                # planner never ran here: every problem counts as unsolved
                sums.append(DomainSummary(planner, d, problems_total[d], 0, 0.0, None, None, 0, 0.0, 0))
        domain_summaries[planner] = tuple(sums)
        planner_summaries.append(summarize_planner(sums))
    return Report(domains, domain_summaries, tuple(planner_summaries), grid)
