"""Command-line interface.

Exit codes: 0 ok, 1 plan invalid or goal not reached, 2 no plan or planner
failure, 3 bad input or configuration, 4 environment problem (missing
planner binary, unreachable or rejecting endpoint).
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import __version__
from .generate import random_blocks_problem
from .pddl import PddlError, load_domain, load_problem
from .planners import (
    ConfigError,
    FdPlanner,
    FdPlannerConfig,
    PlannerError,
    format_sas_plan,
    load_planner,
    plan_to_json,
    preset_names,
)
from .report import DuplicateEpisode, EmptyInput, OutputDirUnwritable, build_report, emit_report, fmt, markdown_table
from .runner import (
    CampaignConfig,
    MalformedRecord,
    RunnerError,
    load_benchmark_sets,
    problem_counts,
    read_results,
    run_campaign,
    store_raw,
)
from .validator import Outcome, TraceResult, no_plan, validate_generated_plan, validate_plan_text

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_PLAN = 2
EXIT_INPUT = 3
EXIT_ENV = 4

log = logging.getLogger("planbench")


class InputError(Exception):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.output == "json":
        print(json.dumps(payload, indent=2))
    elif text:
        print(text)


def _note(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr)


def _exit_for(result: TraceResult) -> int:
    return {Outcome.SUCCESS: EXIT_OK, Outcome.FAILURE: EXIT_INVALID, Outcome.NO_PLAN: EXIT_NO_PLAN}[result.outcome]


def _load_pddl(domain_path: str, problem_path: str):
    try:
        domain = load_domain(domain_path)
        return domain, load_problem(problem_path, domain)
    except PddlError as exc:
        raise InputError(f"{exc}") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read PDDL: {exc}") from None


def _trace_text(result: TraceResult) -> str:
    lines = [
        f"outcome: {result.outcome.value}",
        f"plan length (PL): {result.plan_length}",
        f"executed actions (Ac): {result.executed_actions}",
    ]
    if result.reason:
        lines.append(f"reason: {result.reason}")
    if result.failure_step is not None:
        lines.append(f"failure step: {result.failure_step}")
    if result.failure_detail:
        lines.append(f"detail: {result.failure_detail}")
    if result.plan_cost is not None and result.outcome is Outcome.SUCCESS:
        lines.append(f"plan cost: {result.plan_cost}")
    return "\n".join(lines)


def cmd_validate(args) -> int:
    domain, problem = _load_pddl(args.domain, args.problem)
    try:
        text = Path(args.plan).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read plan: {exc}") from None
    fmt_ = args.format
    if fmt_ == "auto":
        stripped = text.lstrip()
        fmt_ = "sas" if (stripped.startswith("(") or stripped.startswith(";") or not stripped) else "json"
    result = validate_plan_text(domain, problem, text, fmt_)
    _emit(args, result.to_dict(), _trace_text(result))
    return _exit_for(result)


def _finish_solve(args, planner_name: str, domain, problem, response, text: str, extra: dict) -> int:
    if response.plan is None:
        result = no_plan(response.no_plan_reason, response.decode_error)
    else:
        result = validate_generated_plan(domain, problem, response.plan)
    payload = {"planner": planner_name, "planning_time_s": round(response.latency_seconds, 6), **extra}
    if result.outcome is Outcome.NO_PLAN:
        payload.update(outcome=result.outcome.value, reason=result.reason, detail=result.failure_detail)
        _emit(args, payload, "")
        detail = f" ({result.failure_detail})" if result.failure_detail else ""
        print(f"no plan: {result.reason}{detail}", file=sys.stderr)
        return EXIT_NO_PLAN
    payload["plan"] = plan_to_json(response.plan)
    if args.validate:
        payload["validation"] = result.to_dict()
        text += "\n" + _trace_text(result)
    _emit(args, payload, text)
    _note(args, f"planning time: {response.latency_seconds:.2f} s")
    return _exit_for(result) if args.validate else EXIT_OK


def cmd_solve_fd(args) -> int:
    domain, problem = _load_pddl(args.domain, args.problem)
    try:
        config = FdPlannerConfig(
            binary_path=args.binary, alias=args.alias, time_limit_seconds=args.time_limit, work_dir=args.work_dir
        )
    except ConfigError as exc:
        raise InputError(str(exc)) from None
    planner = FdPlanner(config)
    response = planner.solve(Path(args.domain), Path(args.problem))
    text = format_sas_plan(response.plan).rstrip("\n") if response.plan is not None else ""
    return _finish_solve(args, planner.name, domain, problem, response, text, {})


def cmd_solve_llm(args) -> int:
    domain, problem = _load_pddl(args.domain, args.problem)
    try:
        planner = load_planner(args.planner)
    except ConfigError as exc:
        raise InputError(str(exc)) from None
    if isinstance(planner, FdPlanner):
        raise InputError(f"{args.planner} is not an LLM planner config")
    response = planner.solve(Path(args.domain), Path(args.problem))
    raw_dir = Path(args.raw_dir)
    raw_dir.mkdir(parents=True, exist_ok=True)
    digest = store_raw(raw_dir, response.raw_text)
    _note(args, f"raw response: {raw_dir / (digest + '.txt')}")
    text = json.dumps(plan_to_json(response.plan), indent=2) if response.plan is not None else ""
    extra = {"raw_digest": digest, "truncated": response.truncated}
    return _finish_solve(args, planner.name, domain, problem, response, text, extra)


def cmd_bench(args) -> int:
    try:
        config = CampaignConfig.load(
            args.config,
            resume=True if args.resume else None,
            run_id=args.run_id,
            parallelism=args.parallelism,
            trials=args.trials,
            output_dir=args.output_dir,
        )
    except ConfigError as exc:
        raise InputError(str(exc)) from None

    def progress(r):
        _note(args, f"{r.planner} {r.domain}/{r.problem}: {r.outcome}"
                    + (f" ({r.failure_reason})" if r.failure_reason else "") + f" {r.planning_time_s:.2f}s")

    try:
        records = run_campaign(config, progress=progress)
    except RunnerError as exc:
        raise InputError(str(exc)) from None
    log_path = config.output_dir / "results.jsonl"
    payload = {"new_episodes": len(records), "results": str(log_path),
               "run_id": records[-1].run_id if records else None}
    _emit(args, payload, f"{len(records)} new episodes -> {log_path}")
    return EXIT_OK


def _summary_text(report) -> str:
    header = ["Planner", "SR", "PL", "Ac", "Fidelity (%)", "Avg. time (s)"]
    rows = [
        [ps.planner, fmt(ps.overall_success_rate_pct), fmt(ps.overall_mean_plan_length),
         fmt(ps.overall_mean_executed_actions), fmt(ps.execution_fidelity_pct), fmt(ps.mean_planning_time_s)]
        for ps in report.planner_summaries
    ]
    return markdown_table(header, rows).rstrip("\n")


def cmd_report(args) -> int:
    try:
        records = read_results(args.results)
    except MalformedRecord as exc:
        raise InputError(str(exc)) from None
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read results: {exc}") from None
    if args.run_id:
        records = [r for r in records if r.run_id == args.run_id]
    if not records:
        raise InputError("no records" + (f" for run {args.run_id}" if args.run_id else ""))
    counts = None
    if args.benchmark_root:
        try:
            counts = problem_counts(load_benchmark_sets(args.benchmark_root))
        except RunnerError as exc:
            raise InputError(str(exc)) from None
    try:
        report = build_report(records, counts)
    except DuplicateEpisode as exc:
        runs = sorted({r.run_id for r in records})
        hint = f"; the log holds runs {', '.join(runs)}, pick one with --run-id" if len(runs) > 1 else ""
        raise InputError(f"DuplicateEpisode: {exc}{hint}") from None
    except (EmptyInput, ValueError) as exc:
        raise InputError(str(exc)) from None
    try:
        written = emit_report(report, args.out)
    except OutputDirUnwritable as exc:
        raise InputError(str(exc)) from None
    for p in written:
        log.info("wrote %s", p)
    payload = {
        "planners": [
            {
                "planner": ps.planner,
                "success_rate_pct": ps.overall_success_rate_pct,
                "mean_plan_length": ps.overall_mean_plan_length,
                "mean_executed_actions": ps.overall_mean_executed_actions,
                "execution_fidelity_pct": ps.execution_fidelity_pct,
                "mean_planning_time_s": ps.mean_planning_time_s,
                "domains": [
                    {
                        "domain": ds.domain,
                        "problems_total": ds.problems_total,
                        "solved": ds.solved,
                        "success_rate_pct": ds.success_rate_pct,
                        "mean_plan_length": ds.mean_plan_length,
                        "mean_executed_actions": ds.mean_executed_actions,
                        "no_plan_count": ds.no_plan_count,
                    }
                    for ds in report.domain_summaries[ps.planner]
                ],
            }
            for ps in report.planner_summaries
        ],
        "files": [str(p) for p in written],
    }
    _emit(args, payload, _summary_text(report))
    return EXIT_OK


def cmd_random_blocks(args) -> int:
    rng = random.Random(args.seed)
    problems = [random_blocks_problem(args.blocks, rng, name=f"random-blocks-{i + 1}") for i in range(args.count)]
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = []
        for i, text in enumerate(problems, start=1):
            p = out / f"p{i:02d}.pddl"
            p.write_text(text, encoding="utf-8")
            paths.append(str(p))
        _emit(args, {"files": paths}, "\n".join(paths))
    else:
        _emit(args, {"problems": problems}, "\n".join(problems).rstrip("\n"))
    return EXIT_OK


def cmd_presets(args) -> int:
    names = preset_names()
    _emit(args, {"presets": names}, "\n".join(names))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=["text", "json"], default=argparse.SUPPRESS)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="planbench", description="Benchmark classical and LLM planners on PDDL.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--output", choices=["text", "json"], default="text", help="stdout format")
    parser.add_argument("--quiet", action="store_true", help="only warnings and errors on stderr")
    parser.add_argument("--seed", type=int, default=0, help="seed for random instance generation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="execute a plan and report SR/PL/Ac ingredients")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("plan")
    p.add_argument("--format", choices=["auto", "json", "sas"], default="auto")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve-fd", parents=[common], help="solve with Fast Downward")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--binary", help="fast-downward.py path (default: $FAST_DOWNWARD, PATH)")
    p.add_argument("--alias", default="seq-sat-lama-2011")
    p.add_argument("--time-limit", type=int, default=600, help="seconds")
    p.add_argument("--work-dir")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(func=cmd_solve_fd)

    p = sub.add_parser("solve-llm", parents=[common], help="ask an LLM endpoint for a plan")
    p.add_argument("domain")
    p.add_argument("problem")
    p.add_argument("--planner", required=True, help="planner config JSON or preset name")
    p.add_argument("--raw-dir", default="raw", help="where raw responses are stored")
    p.add_argument("--validate", action="store_true")
    p.set_defaults(func=cmd_solve_llm)

    p = sub.add_parser("bench", parents=[common], help="run a campaign")
    p.add_argument("config")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--run-id")
    p.add_argument("--parallelism", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--output-dir")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", parents=[common], help="aggregate a results log into tables and figures")
    p.add_argument("results")
    p.add_argument("--benchmark-root", help="benchmark directory giving the problem counts per domain")
    p.add_argument("--out", default="report")
    p.add_argument("--run-id")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("random-blocks", parents=[common], help="generate random blocks problems")
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_random_blocks)

    p = sub.add_parser("presets", parents=[common], help="list bundled planner presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PlannerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ENV if exc.environmental else EXIT_NO_PLAN
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return 130


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
