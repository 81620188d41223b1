"""Running Fast Downward as a subprocess."""

from __future__ import annotations

import dataclasses
import json
import os
import re
import shutil
import subprocess
import sys
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

from .base import BinaryNotFound, ConfigError, NoSolutionFound, PlannerResponse, SubprocessFailure
from .decode import PlanDecodeError, parse_sas_plan

# exit codes meaning "ran fine but found nothing": success without plan,
# proven unsolvable, incomplete search, and resource limits
NO_SOLUTION_CODES = frozenset({0, 1, 2, 3, 10, 11, 12, 20, 21, 22, 23, 24, 25})
_PLAN_FILE = re.compile(r"^sas_plan(?:\.(\d+))?$")
_STDERR_TAIL = 2000


@dataclass(frozen=True)
class FdPlannerConfig:
    binary_path: str | None = None  # None: search with find_fast_downward()
    alias: str = "seq-sat-lama-2011"
    time_limit_seconds: int = 600
    work_dir: str | None = None
    display_name: str = "Fast Downward"
    keep_work_dirs: bool = False

    def __post_init__(self) -> None:
        if self.time_limit_seconds <= 0:
            raise ConfigError("time_limit_seconds must be > 0")
        if not self.alias:
            raise ConfigError("alias must be non-empty")

    @classmethod
    def from_dict(cls, data: dict) -> "FdPlannerConfig":
        data = {k: v for k, v in data.items() if k != "kind"}
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown Fast Downward config field(s): {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "FdPlannerConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls.from_dict(data)


def find_fast_downward() -> str | None:
    """Locate a Fast Downward driver: $FAST_DOWNWARD, PATH, then the up-fast-downward wheel."""
    env = os.environ.get("FAST_DOWNWARD")
    if env and Path(env).is_file():
        return env
    for name in ("fast-downward.py", "fast-downward"):
        found = shutil.which(name)
        if found:
            return found
    try:
        import importlib.util

        spec = importlib.util.find_spec("up_fast_downward")
    except (ImportError, ValueError):
        spec = None
    if spec is not None and spec.submodule_search_locations:
        for root in spec.submodule_search_locations:
            for candidate in (Path(root) / "downward" / "fast-downward.py", Path(root) / "fast-downward.py"):
                if candidate.is_file():
                    return str(candidate)
    return None


def _resolve_binary(path: str | None) -> Path:
    if path is None:
        found = find_fast_downward()
        if found is None:
            raise BinaryNotFound("Fast Downward not found; set FAST_DOWNWARD or pass a binary path")
        return Path(found)
    p = Path(path)
    if p.is_file():
        return p
    found = shutil.which(path)
    if found:
        return Path(found)
    raise BinaryNotFound(f"Fast Downward not found at {path!r}")


def select_plan_file(directory: Path) -> Path | None:
    """Pick the last plan written: highest ``sas_plan.N``, else plain ``sas_plan``."""
    best: tuple[int, Path] | None = None
    for entry in directory.iterdir():
        m = _PLAN_FILE.match(entry.name)
        if not m or not entry.is_file():
            continue
        rank = int(m.group(1)) if m.group(1) else -1
        if best is None or rank > best[0]:
            best = (rank, entry)
    return best[1] if best else None


def run_fast_downward(config: FdPlannerConfig, domain_file: Path, problem_file: Path) -> PlannerResponse:
    """Solve one problem; each call runs in its own scratch directory.

    A plan file, if any was written, is used regardless of the exit code
    (anytime configurations stop on the time limit after improving a plan).
    """
    binary = _resolve_binary(config.binary_path)
    cmd = [sys.executable, str(binary)] if binary.suffix == ".py" else [str(binary)]
    cmd += [
        "--alias", config.alias,
        "--overall-time-limit", f"{config.time_limit_seconds}s",
        str(Path(domain_file).resolve()), str(Path(problem_file).resolve()),
    ]
    if config.work_dir:
        Path(config.work_dir).mkdir(parents=True, exist_ok=True)
    work = Path(tempfile.mkdtemp(prefix="fd-", dir=config.work_dir))
    try:
        start = time.monotonic()
        timed_out = False
        try:
            proc = subprocess.run(
                cmd, cwd=work, capture_output=True, text=True,
                timeout=config.time_limit_seconds + 30,
            )
            code, stderr = proc.returncode, proc.stderr or proc.stdout or ""
        except subprocess.TimeoutExpired as exc:
            timed_out = True
            code = None
            stderr = exc.stderr.decode(errors="replace") if isinstance(exc.stderr, bytes) else (exc.stderr or "")
        except OSError as exc:
            raise BinaryNotFound(f"cannot execute {binary}: {exc}") from None
        latency = time.monotonic() - start

        plan_file = select_plan_file(work)
        if plan_file is not None:
            text = plan_file.read_text(encoding="utf-8")
            try:
                plan = dataclasses.replace(parse_sas_plan(text), gen_time_seconds=latency)
            except PlanDecodeError as exc:
                return PlannerResponse(text, None, str(exc), latency, decode_kind=exc.kind)
            return PlannerResponse(text, plan, None, latency)
        if timed_out or code in NO_SOLUTION_CODES:
            raise NoSolutionFound(f"no plan found (exit code {code})")
        raise SubprocessFailure(code, stderr[-_STDERR_TAIL:].strip())
    finally:
        if not config.keep_work_dirs:
            shutil.rmtree(work, ignore_errors=True)


class FdPlanner:
    concurrency_key = None

    def __init__(self, config: FdPlannerConfig, max_concurrency: int = 1):
        self.config = config
        self.name = config.display_name
        self.max_concurrency = max_concurrency

    def available(self) -> str | None:
        """None when runnable, otherwise why not."""
        try:
            _resolve_binary(self.config.binary_path)
        except BinaryNotFound as exc:
            return str(exc)
        return None

    def solve(self, domain_file: Path, problem_file: Path) -> PlannerResponse:
        return run_fast_downward(self.config, domain_file, problem_file)
