"""Acceptance criteria AC1-AC7.

Each test records one PASS/FAIL/SKIP line, printed in the "acceptance
criteria" section at the end of the pytest run, then asserts.
"""

import copy
import json
import os
import random
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest
from conftest import BENCH, FIXTURES, ROOT, TESTS, acceptance_line
from oracle_blocks import random_instance, random_plan, simulate_full, solve
from stub_llm import Reply, StubServer

from planbench.cli import main
from planbench.pddl import load_domain, load_problem, parse_domain_text, parse_problem_text, pretty_print
from planbench.plan import Plan, PlanStep
from planbench.planners import RESPONSE_TEMPLATE, Truncated, decode_plan_json, find_fast_downward
from planbench.runner import read_results
from planbench.validator import Outcome, validate_generated_plan, validate_plan, validate_plan_text
from planbench.world import build_type_index

pytestmark = pytest.mark.acceptance

REFERENCE_LOG = FIXTURES / "reference_results.jsonl"
DOMAINS = ("barman", "blocks", "elevator", "satellite", "tidybot")
FULL_COUNTS = {"barman": 14, "blocks": 20, "elevator": 20, "satellite": 20, "tidybot": 19}

# published MEAN columns (SR, PL, Ac)
MEANS = {
    "Fast Downward": (97.85, 39.56, 39.56),
    "Claude Sonnet 3.5": (41.94, 16.69, 11.34),
    "Claude Sonnet 3.7": (58.06, 37.26, 16.02),
    "Claude Sonnet 3.7 Thinking": (63.44, 38.98, 19.92),
    "Gemini 2 Flash": (23.66, 27.53, 6.28),
    "Gemini 2 Flash Thinking": (35.48, 39.08, 12.02),
    "Llama 405B Instruct": (5.38, 25.46, 3.55),
    "Llama DeepSeek R1": (51.61, 24.77, 13.86),
    "GPT-o3 mini": (58.06, 41.48, 18.53),
    "GPT-o1": (63.44, 26.18, 19.22),
}
# published execution fidelity percentages
FIDELITY = {
    "GPT-o1": 73.4,
    "Claude Sonnet 3.5": 67.9,
    "Llama DeepSeek R1": 55.9,
    "Claude Sonnet 3.7 Thinking": 51.1,
    "Gemini 2 Flash": 22.8,
    "Llama 405B Instruct": 13.9,
}


def verdict(criterion, ok, detail):
    acceptance_line(criterion, "PASS" if ok else "FAIL", detail)
    assert ok, f"{criterion}: {detail}"


def report_json(tmp_path, capsys):
    start = time.perf_counter()
    code = main(["--quiet", "--output", "json", "report", str(REFERENCE_LOG), "--out", str(tmp_path / "report")])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert code == 0
    return {p["planner"]: p for p in json.loads(out)["planners"]}, elapsed


def test_ac1_mean_columns(tmp_path, capsys):
    planners, elapsed = report_json(tmp_path, capsys)
    worst = 0.0
    misses = []
    for name, expected in MEANS.items():
        got = planners[name]
        for label, key, want in zip(("SR", "PL", "Ac"),
                                    ("success_rate_pct", "mean_plan_length", "mean_executed_actions"), expected):
            dev = abs(got[key] - want)
            worst = max(worst, dev)
            if dev > 0.05 + 1e-9:
                misses.append(f"{name} {label} {got[key]:.4f} vs {want}")
    # the fixture itself must reproduce every per-domain cell it was built from
    cell_misses = []
    for name, (cells, _) in reference_cells().items():
        for ds, expected in zip(planners[name]["domains"], cells):
            got = (ds["success_rate_pct"], ds["mean_plan_length"], ds["mean_executed_actions"])
            if any(abs(g - w) > 0.05 + 1e-9 for g, w in zip(got, expected)):
                cell_misses.append(f"{name}/{ds['domain']}")
    counts = {d["domain"]: d["problems_total"] for d in planners["GPT-o1"]["domains"]}
    ok = not misses and not cell_misses and counts == FULL_COUNTS and elapsed < 1.0
    verdict("AC1", ok, f"{len(MEANS) * 3} MEAN cells, max deviation {worst:.4f} (tol 0.05); "
                       f"{len(MEANS) * 15 - len(cell_misses)}/{len(MEANS) * 15} per-domain cells reproduced; "
                       f"report in {elapsed:.3f}s"
            + (f"; misses: {misses + cell_misses}" if misses or cell_misses else ""))


def reference_cells():
    sys.path.insert(0, str(FIXTURES))
    try:
        import make_reference_log
    finally:
        sys.path.remove(str(FIXTURES))
    return make_reference_log.CELLS


def test_ac2_fidelity(tmp_path, capsys):
    planners, elapsed = report_json(tmp_path, capsys)
    devs = {name: abs(planners[name]["execution_fidelity_pct"] - want) for name, want in FIDELITY.items()}
    worst = max(devs, key=devs.get)
    ok = all(d <= 0.1 + 1e-9 for d in devs.values()) and elapsed < 1.0
    fd = planners["Fast Downward"]["execution_fidelity_pct"]
    verdict("AC2", ok and fd == pytest.approx(100.0),
            f"max deviation {devs[worst]:.4f} pp ({worst}), tol 0.1; Fast Downward {fd:.2f}; "
            f"report in {elapsed:.3f}s")


def test_ac3_validator_matches_oracle():
    domain = load_domain(BENCH / "blocks" / "domain.pddl")
    rng = random.Random(20250101)
    start = time.perf_counter()
    mismatches = []
    kinds = {"success": 0, "failure": 0}
    steps_failed = 0
    for i in range(1000):
        inst = random_instance(rng, max_blocks=5)
        style = i % 3
        if style == 0:
            plan = random_plan(inst, rng, rng.randint(1, 10))
        else:
            plan = solve(inst)[:10] or random_plan(inst, rng, 1)
            if style == 2:
                j = rng.randrange(len(plan))
                plan[j] = random_plan(inst, rng, 1)[0] if rng.random() < 0.5 else (plan[j][0], plan[j][1][::-1])
        expected = simulate_full(inst, plan)
        problem = parse_problem_text(inst.to_pddl(f"i{i}"), domain)
        r = validate_plan(domain, problem, Plan(tuple(PlanStep(n, tuple(a)) for n, a in plan)))
        got = (r.outcome.value, r.plan_length, r.executed_actions, r.failure_step)
        kinds[expected[0]] += 1
        steps_failed += expected[3] is not None
        if got != expected:
            mismatches.append((i, got, expected))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 30 and min(kinds.values()) > 0 and steps_failed > 0
    verdict("AC3", ok, f"1000 instances, {len(mismatches)} disagreements "
                       f"({kinds['success']} successes, {kinds['failure']} failures, {steps_failed} illegal steps), "
                       f"{elapsed:.1f}s" + (f"; first: {mismatches[0]}" if mismatches else ""))


def test_ac4_fast_downward_ideal_line():
    binary = find_fast_downward()
    if binary is None:
        acceptance_line("AC4", "SKIP", "Fast Downward not installed; set FAST_DOWNWARD to enable")
        pytest.skip("Fast Downward not installed")
    from planbench.planners import FdPlannerConfig, run_fast_downward

    cfg = FdPlannerConfig(binary_path=binary, time_limit_seconds=60)
    start = time.perf_counter()
    bad = []
    n = 0
    for name in ("blocks", "elevator"):
        domain = load_domain(BENCH / name / "domain.pddl")
        for pf in sorted((BENCH / name).glob("p*.pddl")):
            n += 1
            response = run_fast_downward(cfg, BENCH / name / "domain.pddl", pf)
            r = validate_plan(domain, load_problem(pf, domain), response.plan) if response.plan else None
            if r is None or r.outcome is not Outcome.SUCCESS or r.executed_actions != r.plan_length:
                bad.append(f"{name}/{pf.stem}")
    elapsed = time.perf_counter() - start
    verdict("AC4", not bad and elapsed < 300,
            f"{n} problems, {n - len(bad)} with outcome success and Ac = PL, {elapsed:.1f}s")


def corpus_root() -> Path:
    return Path(os.environ.get("PLANBENCH_FULL_CORPUS", BENCH))


def test_ac5_parser_corpus():
    root = corpus_root()
    failures = []
    counts = {}
    for name in DOMAINS:
        d = load_domain(root / name / "domain.pddl")
        if parse_domain_text(pretty_print(d)) != d:
            failures.append(f"{name}/domain round-trip")
        problems = sorted((root / name).glob("p*.pddl"))
        counts[name] = len(problems)
        for pf in problems:
            p = load_problem(pf, d)
            if parse_problem_text(pretty_print(p), d) != p:
                failures.append(f"{name}/{pf.stem} round-trip")
            failures += [f"{name}/{pf.stem}: {e}" for e in type_errors(d, p)]
    enough = all(c >= 3 for c in counts.values())
    full = counts == FULL_COUNTS
    note = "full corpus counts match" if full else (
        f"full corpus not present (found {counts}); count check applies only to the full corpus")
    verdict("AC5", not failures and enough,
            f"{sum(counts.values())} problems over {len(DOMAINS)} domains parse, round-trip and type-check; {note}"
            + (f"; failures: {failures[:3]}" if failures else ""))


def type_errors(domain, problem) -> list[str]:
    """Every init and goal atom must fit its predicate's declared argument types."""
    idx = build_type_index(domain, problem)
    errors = []
    atoms = list(problem.init) + [lit for lit in problem.goal.parts if hasattr(lit, "predicate")]
    for atom in atoms:
        decl = domain.predicate(atom.predicate)
        if decl is None:
            errors.append(f"undeclared predicate {atom.predicate}")
            continue
        for arg, (_, typ) in zip(atom.args, decl.params):
            if arg not in idx.get(typ, ()):
                errors.append(f"({atom.predicate} ...) argument {arg} is not a {typ}")
    return errors


def instantiate_template(steps) -> str:
    obj = json.loads(RESPONSE_TEMPLATE)
    entry = obj["plan"][0]
    obj["plan"] = []
    for name, *args in steps:
        e = copy.deepcopy(entry)
        e["name"], e["parameters"] = name, list(args)
        obj["plan"].append(e)
    return json.dumps(obj, indent=2)


def test_ac6_protocol(tmp_path, capsys, monkeypatch):
    checks = {}
    domain = load_domain(BENCH / "blocks" / "domain.pddl")
    problem = load_problem(BENCH / "blocks" / "p01.pddl", domain)
    steps = [("pick-up", "b"), ("stack", "b", "a"), ("pick-up", "c"), ("stack", "c", "b"),
             ("pick-up", "d"), ("stack", "d", "c")]
    text = instantiate_template(steps)
    decoded = decode_plan_json(text)
    checks["round-trip"] = [(s.name, *s.parameters) for s in decoded.steps] == steps
    checks["template plan valid"] = validate_generated_plan(domain, problem, decoded).outcome is Outcome.SUCCESS
    fenced = validate_plan_text(domain, problem, f"Here you go:\n```json\n{text}\n```\n")
    checks["fenced -> plan"] = fenced.outcome is Outcome.SUCCESS
    try:
        decode_plan_json(text[: len(text) // 2])
        checks["truncated -> Truncated"] = False
    except Truncated:
        checks["truncated -> Truncated"] = True
    refusal = decode_plan_json('{"reasoning": ["No solution exists: the goal is unreachable."], "plan": []}')
    r = validate_generated_plan(domain, problem, refusal)
    checks["refusal -> noPlan"] = (r.outcome, r.reason) == (Outcome.NO_PLAN, "refusal")

    monkeypatch.setenv("PLANBENCH_AC6_KEY", "k")

    def cli(url, replies, default=None, **cfg):
        path = tmp_path / "p.json"
        path.write_text(json.dumps({"kind": "llm", "display_name": "Stub", "endpoint_url": url, "model_id": "m",
                                    "api_key_env_var": "PLANBENCH_AC6_KEY", "backoff_seconds": 0.01, **cfg}))
        stub.script = list(replies)
        if default:
            stub.default = default
        code = main(["--quiet", "solve-llm", str(BENCH / "blocks" / "domain.pddl"), str(BENCH / "blocks" / "p01.pddl"),
                     "--planner", str(path), "--raw-dir", str(tmp_path / "raw")])
        capsys.readouterr()
        return code

    with StubServer() as stub:
        checks["truncated reply -> exit 2"] = cli(
            stub.url, [Reply(200, content=text[:200], finish_reason="length")]) == 2
        checks["timeout -> exit 2"] = cli(
            stub.url, [Reply(200, content=text, delay=1.0)], request_timeout_seconds=0.2) == 2
        checks["retry exhaustion -> exit 4"] = cli(stub.url, [], Reply(503, body="busy"), max_retries=2) == 4
        checks["auth failure -> exit 4"] = cli(stub.url, [Reply(401, body="denied")]) == 4
    failed = [k for k, v in checks.items() if not v]
    verdict("AC6", not failed, f"{len(checks) - len(failed)}/{len(checks)} protocol checks"
            + (f"; failed: {failed}" if failed else ""))


def test_ac7_crash_safe_campaign(tmp_path):
    bench = tmp_path / "bench" / "blocks"
    bench.mkdir(parents=True)
    (bench / "domain.pddl").write_text((BENCH / "blocks" / "domain.pddl").read_text())
    subprocess.run([sys.executable, "-m", "planbench", "--quiet", "--seed", "3", "random-blocks", "--blocks", "5",
                    "--count", "12", "--out-dir", str(bench)], check=True, capture_output=True)
    env = {**os.environ, "PLANBENCH_AC7_KEY": "k", "PYTHONPATH": str(ROOT / "src")}
    stub = subprocess.Popen([sys.executable, str(TESTS / "stub_llm.py"), "--delay", "0.4"],
                            stdout=subprocess.PIPE, text=True, env=env)
    try:
        url = stub.stdout.readline().strip()
        cfg = tmp_path / "campaign.json"
        cfg.write_text(json.dumps({
            "planners": [{"kind": "llm", "display_name": "Stub", "endpoint_url": url, "model_id": "m",
                          "api_key_env_var": "PLANBENCH_AC7_KEY"}],
            "benchmark_root": "bench", "output_dir": "out", "parallelism": 2, "run_id": "crash",
        }))
        log = tmp_path / "out" / "results.jsonl"
        bench_cmd = [sys.executable, "-m", "planbench", "--quiet", "bench", str(cfg)]
        victim = subprocess.Popen(bench_cmd, env=env, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
        deadline = time.monotonic() + 30
        while time.monotonic() < deadline:
            if log.exists() and log.read_text().count("\n") >= 3:
                break
            time.sleep(0.05)
        victim.send_signal(signal.SIGKILL)
        victim.wait()

        raw = log.read_text()
        lines = raw.splitlines()
        try:
            well_formed = raw.endswith("\n") and all(isinstance(json.loads(line), dict) for line in lines)
        except ValueError:
            well_formed = False
        before = read_results(log)
        done_before = {r.problem for r in before}
        interrupted = 0 < len(before) < 12

        resumed = subprocess.run(bench_cmd + ["--resume", "--output", "json"], env=env, capture_output=True,
                                 text=True, timeout=120)
        after = read_results(log)
        keys = [r.key for r in after]
        new = after[len(before):]
        exact = ({r.problem for r in new} == {f"p{i:02d}" for i in range(1, 13)} - done_before
                 and json.loads(resumed.stdout)["new_episodes"] == 12 - len(before))
        ok = (well_formed and interrupted and resumed.returncode == 0 and len(keys) == len(set(keys)) == 12
              and exact and all(r.outcome == "success" for r in after))
        verdict("AC7", ok, f"killed after {len(before)}/12 episodes, all {len(lines)} lines well-formed: "
                           f"{well_formed}; resume added {len(new)}, total {len(keys)}, "
                           f"duplicates {len(keys) - len(set(keys))}")
    finally:
        stub.terminate()
        stub.wait(timeout=10)
