"""Running planners over benchmark sets and logging one record per episode.

Results go to ``<output_dir>/results.jsonl``, one JSON object per line,
appended and fsync'd as each episode finishes. Raw planner output is kept
next to it under ``raw/<sha256>.txt`` so every record can be re-checked.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
import uuid
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable

from .pddl import Domain, PddlError, Problem, load_domain, load_problem
from .planners import ConfigError, Planner, PlannerError, load_planner_config, planner_from_dict
from .validator import Outcome, no_plan, validate_generated_plan

log = logging.getLogger(__name__)

DOMAIN_ORDER = ("barman", "blocks", "elevator", "satellite", "tidybot")
BUNDLED_BENCHMARKS = Path(__file__).resolve().parent / "data" / "benchmarks"
RESULTS_FILE = "results.jsonl"
RAW_DIR = "raw"


class RunnerError(Exception):
    pass


class MissingDomainFile(RunnerError):
    def __init__(self, set_name: str, path: Path):
        self.set_name = set_name
        super().__init__(f"benchmark set {set_name!r}: missing {path}")


class ParseFailure(RunnerError):
    def __init__(self, file: Path, detail: str):
        self.file = file
        self.detail = detail
        super().__init__(f"{file}: {detail}")


class OutputDirUnwritable(RunnerError):
    pass


class MalformedRecord(RunnerError):
    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        super().__init__(f"results line {line_no}: {detail}")


class DuplicateRun(RunnerError):
    pass


def domain_sort_key(name: str) -> tuple[int, str]:
    """Known benchmark domains first in their usual order, then the rest alphabetically."""
    return (DOMAIN_ORDER.index(name), "") if name in DOMAIN_ORDER else (len(DOMAIN_ORDER), name)


@dataclass(frozen=True)
class BenchmarkSet:
    name: str
    domain_file: Path
    problem_files: tuple[Path, ...]

    def __post_init__(self) -> None:
        if not self.problem_files:
            raise ValueError(f"benchmark set {self.name!r} has no problems")

    @staticmethod
    def problem_id(path: Path) -> str:
        return Path(path).stem


def load_benchmark_set(set_dir: Path) -> BenchmarkSet:
    set_dir = Path(set_dir)
    domain_file = set_dir / "domain.pddl"
    if not domain_file.is_file():
        raise MissingDomainFile(set_dir.name, domain_file)
    problems = tuple(sorted(set_dir.glob("p*.pddl"), key=lambda p: p.name))
    if not problems:
        raise ParseFailure(set_dir, "no problem files (p*.pddl)")
    try:
        domain = load_domain(domain_file)
    except (PddlError, OSError, UnicodeDecodeError) as exc:
        raise ParseFailure(domain_file, str(exc)) from None
    for p in problems:
        try:
            load_problem(p, domain)
        except (PddlError, OSError, UnicodeDecodeError) as exc:
            raise ParseFailure(p, str(exc)) from None
    return BenchmarkSet(set_dir.name, domain_file, problems)


def load_benchmark_sets(root: str | Path, names: Iterable[str] | None = None) -> list[BenchmarkSet]:
    """Load ``<root>/<set>/domain.pddl`` plus ``<root>/<set>/p*.pddl`` for every set directory."""
    root = Path(root)
    if not root.is_dir():
        raise RunnerError(f"benchmark root {root} is not a directory")
    wanted = set(names) if names is not None else None
    dirs = [d for d in root.iterdir() if d.is_dir() and not d.name.startswith(".")]
    if wanted is not None:
        missing = wanted - {d.name for d in dirs}
        if missing:
            raise RunnerError(f"unknown benchmark set(s): {', '.join(sorted(missing))}")
        dirs = [d for d in dirs if d.name in wanted]
    return [load_benchmark_set(d) for d in sorted(dirs, key=lambda d: domain_sort_key(d.name))]


def problem_counts(sets: Iterable[BenchmarkSet]) -> dict[str, int]:
    return {s.name: len(s.problem_files) for s in sets}


@dataclass(frozen=True)
class EpisodeRecord:
    planner: str
    domain: str
    problem: str
    outcome: str
    failure_reason: str | None
    plan_length: int
    executed_actions: int
    planning_time_s: float
    timestamp: str
    raw_digest: str | None
    run_id: str

    def __post_init__(self) -> None:
        if self.outcome not in {o.value for o in Outcome}:
            raise ValueError(f"unknown outcome {self.outcome!r}")
        for name in ("plan_length", "executed_actions"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer")
        if self.executed_actions > self.plan_length:
            raise ValueError("executed_actions cannot exceed plan_length")
        if self.outcome == Outcome.SUCCESS.value and self.executed_actions != self.plan_length:
            raise ValueError("a successful episode executes every step")
        if self.outcome == Outcome.NO_PLAN.value and self.plan_length:
            raise ValueError("a no-plan episode has no plan length")
        if not isinstance(self.planning_time_s, (int, float)) or self.planning_time_s < 0:
            raise ValueError("planning_time_s must be >= 0")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.planner, self.domain, self.problem, self.run_id)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "EpisodeRecord":
        names = [f.name for f in fields(cls)]
        if not isinstance(data, dict):
            raise ValueError("record is not a JSON object")
        missing = [n for n in names if n not in data]
        extra = sorted(set(data) - set(names))
        if missing or extra:
            raise ValueError(f"fields missing {missing} / unexpected {extra}")
        return cls(**{n: data[n] for n in names})


def read_results(path: str | Path) -> list[EpisodeRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append(EpisodeRecord.from_dict(json.loads(line)))
            except (ValueError, TypeError) as exc:
                raise MalformedRecord(n, str(exc)) from None
    return records


def repair_log(path: Path) -> int:
    """Drop a trailing partial line left by an interrupted write; returns bytes removed."""
    if not path.exists():
        return 0
    with open(path, "rb+") as fh:
        data = fh.read()
        if not data or data.endswith(b"\n"):
            return 0
        keep = data.rfind(b"\n") + 1
        fh.truncate(keep)
        fh.flush()
        os.fsync(fh.fileno())
    log.warning("%s: removed %d bytes of an incomplete trailing record", path, len(data) - keep)
    return len(data) - keep


def store_raw(raw_dir: Path, text: str) -> str:
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    target = raw_dir / f"{digest}.txt"
    if not target.exists():
        tmp = raw_dir / f".{digest}.{uuid.uuid4().hex}.tmp"
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, target)
    return digest


@dataclass
class CampaignConfig:
    planners: list
    benchmark_sets: list[BenchmarkSet]
    output_dir: Path
    parallelism: int = 1
    resume: bool = False
    run_id: str | None = None
    trials: int = 1

    def __post_init__(self) -> None:
        self.output_dir = Path(self.output_dir)
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.planners:
            raise ConfigError("campaign has no planners")
        names = [p.name for p in self.planners]
        if len(set(names)) != len(names):
            raise ConfigError(f"planner names must be unique: {names}")
        if not self.benchmark_sets:
            raise ConfigError("campaign has no benchmark sets")

    @classmethod
    def load(cls, path: str | Path, **overrides) -> "CampaignConfig":
        """Read a campaign JSON file.

        Keys: ``planners`` (list of inline planner configs, config file paths,
        or preset names), ``benchmark_root`` (default: bundled mini corpus),
        ``sets`` (optional subset), ``output_dir``, ``parallelism``,
        ``resume``, ``run_id``, ``trials``. Relative paths are resolved
        against the config file's directory. Non-None ``overrides`` win.
        """
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        allowed = {"planners", "benchmark_root", "sets", "output_dir", "parallelism", "resume", "run_id", "trials"}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"{path}: unknown campaign field(s): {', '.join(unknown)}")
        base = path.parent

        def resolve(p) -> Path:
            p = Path(p)
            return p if p.is_absolute() else base / p

        planners = []
        for entry in data.get("planners") or []:
            if isinstance(entry, str):
                ref = resolve(entry) if resolve(entry).is_file() else entry
                entry = load_planner_config(ref)
            if not isinstance(entry, dict):
                raise ConfigError(f"{path}: planner entries must be objects or strings")
            if entry.get("kind") == "fd" and entry.get("binary_path") and os.sep in str(entry["binary_path"]):
                entry = {**entry, "binary_path": str(resolve(entry["binary_path"]))}
            planners.append(planner_from_dict(entry))

        root = resolve(data["benchmark_root"]) if data.get("benchmark_root") else BUNDLED_BENCHMARKS
        try:
            sets = load_benchmark_sets(root, data.get("sets"))
        except RunnerError as exc:
            raise ConfigError(str(exc)) from None
        if "output_dir" not in data and overrides.get("output_dir") is None:
            raise ConfigError(f"{path}: output_dir is required")
        settings = {
            "output_dir": resolve(data["output_dir"]) if "output_dir" in data else None,
            "parallelism": data.get("parallelism", 1),
            "resume": data.get("resume", False),
            "run_id": data.get("run_id"),
            "trials": data.get("trials", 1),
        }
        settings.update({k: v for k, v in overrides.items() if v is not None})
        return cls(planners=planners, benchmark_sets=sets, **settings)


@dataclass
class _Job:
    planner: Planner
    bset: BenchmarkSet
    problem_file: Path
    run_id: str

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.planner.name, self.bset.name, BenchmarkSet.problem_id(self.problem_file), self.run_id)


@dataclass
class _Parsed:
    domains: dict = field(default_factory=dict)
    problems: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def get(self, bset: BenchmarkSet, problem_file: Path) -> tuple[Domain, Problem]:
        with self.lock:
            if bset.name not in self.domains:
                self.domains[bset.name] = load_domain(bset.domain_file)
            domain = self.domains[bset.name]
            if problem_file not in self.problems:
                self.problems[problem_file] = load_problem(problem_file, domain)
            return domain, self.problems[problem_file]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


def run_episode(job: _Job, raw_dir: Path, parsed: _Parsed, semaphore: threading.Semaphore | None) -> EpisodeRecord:
    """Solve and validate one problem; planner errors become no-plan records."""
    domain, problem = parsed.get(job.bset, job.problem_file)
    digest = None
    start = time.monotonic()
    try:
        if semaphore is not None:
            with semaphore:
                start = time.monotonic()
                response = job.planner.solve(job.bset.domain_file, job.problem_file)
        else:
            response = job.planner.solve(job.bset.domain_file, job.problem_file)
    except PlannerError as exc:
        log.warning("%s on %s/%s: %s", job.planner.name, job.bset.name, job.key[2], exc)
        result = no_plan(exc.reason, str(exc))
        elapsed = time.monotonic() - start
    except Exception as exc:  # a planner bug must not end the campaign
        log.exception("%s on %s/%s crashed", job.planner.name, job.bset.name, job.key[2])
        result = no_plan("planner_crash", f"{type(exc).__name__}: {exc}")
        elapsed = time.monotonic() - start
    else:
        digest = store_raw(raw_dir, response.raw_text)
        elapsed = response.latency_seconds
        if response.plan is None:
            result = no_plan(response.no_plan_reason, response.decode_error)
        else:
            result = validate_generated_plan(domain, problem, response.plan)
    return EpisodeRecord(
        planner=job.planner.name,
        domain=job.bset.name,
        problem=job.key[2],
        outcome=result.outcome.value,
        failure_reason=result.reason,
        plan_length=result.plan_length,
        executed_actions=result.executed_actions,
        planning_time_s=round(elapsed, 6),
        timestamp=_now(),
        raw_digest=digest,
        run_id=job.run_id,
    )


class _LogWriter:
    """Appends records one line at a time and makes each durable before the next."""

    def __init__(self, path: Path):
        self.fh = open(path, "a", encoding="utf-8")

    def write(self, record: EpisodeRecord) -> None:
        self.fh.write(record.to_json() + "\n")
        self.fh.flush()
        os.fsync(self.fh.fileno())

    def close(self) -> None:
        self.fh.close()


def _prepare_output(output_dir: Path) -> tuple[Path, Path]:
    try:
        output_dir.mkdir(parents=True, exist_ok=True)
        raw_dir = output_dir / RAW_DIR
        raw_dir.mkdir(exist_ok=True)
        log_path = output_dir / RESULTS_FILE
        with open(log_path, "a", encoding="utf-8"):
            pass
        probe = raw_dir / f".probe-{uuid.uuid4().hex}"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OutputDirUnwritable(f"cannot write to {output_dir}: {exc}") from None
    return log_path, raw_dir


def run_campaign(
    config: CampaignConfig, progress: Callable[[EpisodeRecord], None] | None = None
) -> list[EpisodeRecord]:
    """Run every (planner, set, problem) episode not yet logged; return the new records.

    With ``resume`` and no explicit run id, the most recent run in the log
    is continued. Without ``resume`` a fresh run id is generated, and an
    explicit run id that already has records is refused.
    """
    log_path, raw_dir = _prepare_output(config.output_dir)
    repair_log(log_path)
    try:
        existing = read_results(log_path)
    except MalformedRecord as exc:
        raise RunnerError(f"{log_path}: {exc}") from None

    run_id = config.run_id
    if run_id is None:
        run_id = existing[-1].run_id if (config.resume and existing) else datetime.now(timezone.utc).strftime(
            "%Y%m%dT%H%M%SZ-"
        ) + uuid.uuid4().hex[:6]
    run_ids = [run_id] if config.trials == 1 else [f"{run_id}-t{t}" for t in range(1, config.trials + 1)]
    done = {r.key for r in existing}
    if not config.resume and any(r.run_id in run_ids for r in existing):
        raise DuplicateRun(f"run {run_id!r} already has records in {log_path}; resume it or pick another run id")

    planners = []
    for planner in config.planners:
        why = planner.available()
        if why:
            log.warning("skipping planner %s: %s", planner.name, why)
        else:
            planners.append(planner)

    # per planner, the jobs in (set, filename) order; records are written in that order
    queues: dict[str, list[_Job]] = {}
    for planner in planners:
        jobs = []
        for rid in run_ids:
            for bset in config.benchmark_sets:
                for pf in bset.problem_files:
                    job = _Job(planner, bset, pf, rid)
                    if job.key not in done:
                        jobs.append(job)
        queues[planner.name] = jobs
    skipped = sum(
        len(s.problem_files) for s in config.benchmark_sets
    ) * len(run_ids) * len(planners) - sum(len(q) for q in queues.values())
    if skipped:
        log.info("resuming run %s: %d episode(s) already logged", run_id, skipped)

    semaphores: dict[str, threading.Semaphore] = {}
    for planner in planners:
        if planner.concurrency_key is not None and planner.concurrency_key not in semaphores:
            semaphores[planner.concurrency_key] = threading.BoundedSemaphore(planner.max_concurrency)

    parsed = _Parsed()
    written: list[EpisodeRecord] = []
    writer = _LogWriter(log_path)
    next_index = {name: 0 for name in queues}
    finished: dict[str, dict[int, EpisodeRecord]] = {name: {} for name in queues}

    def flush(name: str) -> None:
        buf = finished[name]
        while next_index[name] in buf:
            record = buf.pop(next_index[name])
            writer.write(record)
            written.append(record)
            next_index[name] += 1
            if progress is not None:
                progress(record)

    # interleave planners so one slow planner does not starve the others
    order = []
    longest = max((len(q) for q in queues.values()), default=0)
    for i in range(longest):
        for name, q in queues.items():
            if i < len(q):
                order.append((name, i, q[i]))

    try:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            pending = {}
            items = iter(order)
            # keep at most `parallelism` episodes in flight so an interrupt loses little work
            while True:
                while len(pending) < config.parallelism:
                    item = next(items, None)
                    if item is None:
                        break
                    name, i, job = item
                    sem = semaphores.get(job.planner.concurrency_key) if job.planner.concurrency_key else None
                    pending[pool.submit(run_episode, job, raw_dir, parsed, sem)] = (name, i)
                if not pending:
                    break
                done_now, _ = wait(pending, return_when=FIRST_COMPLETED)
                for fut in done_now:
                    name, i = pending.pop(fut)
                    finished[name][i] = fut.result()
                    flush(name)
    finally:
        writer.close()
    return written
