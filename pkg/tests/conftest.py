import json
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
ROOT = TESTS.parent
sys.path.insert(0, str(TESTS))

from planbench.pddl import parse_domain_text, parse_problem_text  # noqa: E402
from planbench.planners import find_fast_downward  # noqa: E402

BENCH = ROOT / "src" / "planbench" / "data" / "benchmarks"
FIXTURES = TESTS / "fixtures"

# typed 4-operator blocks world, same schemas as the bundled IPC file
TYPED_BLOCKS = """
(define (domain blocks)
  (:requirements :strips :typing)
  (:types block)
  (:predicates (on ?x - block ?y - block) (ontable ?x - block) (clear ?x - block)
               (handempty) (holding ?x - block))
  (:action pick-up :parameters (?x - block)
    :precondition (and (clear ?x) (ontable ?x) (handempty))
    :effect (and (not (ontable ?x)) (not (clear ?x)) (not (handempty)) (holding ?x)))
  (:action put-down :parameters (?x - block)
    :precondition (holding ?x)
    :effect (and (not (holding ?x)) (clear ?x) (handempty) (ontable ?x)))
  (:action stack :parameters (?x - block ?y - block)
    :precondition (and (holding ?x) (clear ?y))
    :effect (and (not (holding ?x)) (not (clear ?y)) (clear ?x) (handempty) (on ?x ?y)))
  (:action unstack :parameters (?x - block ?y - block)
    :precondition (and (on ?x ?y) (clear ?x) (handempty))
    :effect (and (holding ?x) (clear ?y) (not (clear ?x)) (not (handempty)) (not (on ?x ?y)))))
"""

TWO_BLOCKS = """
(define (problem two)
  (:domain blocks)
  (:objects a b - block)
  (:init (clear a) (clear b) (ontable a) (ontable b) (handempty))
  (:goal (and (on a b))))
"""


@pytest.fixture
def blocks_domain():
    return parse_domain_text(TYPED_BLOCKS)


@pytest.fixture
def two_blocks(blocks_domain):
    return parse_problem_text(TWO_BLOCKS, blocks_domain)


@pytest.fixture
def fd_binary():
    path = find_fast_downward()
    if path is None:
        pytest.skip("Fast Downward not installed (set FAST_DOWNWARD to enable)")
    return path


def plan_json(*steps) -> str:
    return json.dumps(
        {
            "reasoning": ["test plan"],
            "plan": [{"name": n, "parameters": list(a), "reason": "r", "confirm_reasoning": "c"} for n, *a in steps],
        }
    )


# one line per acceptance criterion, printed after the test session
ACCEPTANCE_LINES: list[str] = []


def acceptance_line(criterion: str, status: str, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{criterion} {status}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
