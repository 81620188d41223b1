"""Random blocks-world instances for the bundled 4-operator blocks domain."""

from __future__ import annotations

import random


def random_towers(blocks: list[str], rng: random.Random) -> list[list[str]]:
    """Split a shuffled block list into towers, bottom block first."""
    order = blocks[:]
    rng.shuffle(order)
    towers: list[list[str]] = []
    for b in order:
        if towers and rng.random() < 0.5:
            rng.choice(towers).append(b)
        else:
            towers.append([b])
    return towers


def tower_facts(towers: list[list[str]]) -> list[str]:
    facts = []
    for t in towers:
        facts.append(f"(ontable {t[0]})")
        facts += [f"(on {upper} {lower})" for lower, upper in zip(t, t[1:])]
        facts.append(f"(clear {t[-1]})")
    return facts


def random_blocks_problem(n_blocks: int, rng: random.Random, name: str = "random-blocks") -> str:
    if n_blocks < 1:
        raise ValueError("need at least one block")
    blocks = [f"b{i}" for i in range(1, n_blocks + 1)]
    init = tower_facts(random_towers(blocks, rng)) + ["(handempty)"]
    goal = [f for f in tower_facts(random_towers(blocks, rng)) if f.startswith("(on ")]
    if not goal:
        goal = [f"(ontable {blocks[0]})"]
    return (
        f"(define (problem {name})\n"
        "  (:domain blocks)\n"
        f"  (:objects {' '.join(blocks)})\n"
        f"  (:init {' '.join(sorted(init))})\n"
        f"  (:goal (and {' '.join(sorted(goal))})))\n"
    )
