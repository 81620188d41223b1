"""Independent reference simulator for the 4-operator blocks world.

It models the physical situation (what each block rests on, what the hand
holds) instead of a set of ground atoms, and shares no code with the
package. Tests compare the validator against it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

TABLE = "table"
HAND = "hand"


@dataclass(frozen=True)
class Instance:
    blocks: tuple[str, ...]
    init: dict  # block -> what it rests on: TABLE or another block
    goal: dict  # block -> required support (subset of blocks)

    def to_pddl(self, name: str = "oracle") -> str:
        facts = ["(handempty)"]
        for b, below in sorted(self.init.items()):
            facts.append(f"(ontable {b})" if below == TABLE else f"(on {b} {below})")
        for b in self.blocks:
            if b not in self.init.values():
                facts.append(f"(clear {b})")
        goal = [f"(ontable {b})" if s == TABLE else f"(on {b} {s})" for b, s in sorted(self.goal.items())]
        return (f"(define (problem {name}) (:domain blocks) (:objects {' '.join(self.blocks)})\n"
                f"  (:init {' '.join(facts)})\n  (:goal (and {' '.join(goal)})))\n")


def random_configuration(blocks, rng: random.Random) -> dict:
    support = {}
    tops = []
    for b in rng.sample(list(blocks), len(blocks)):
        if tops and rng.random() < 0.6:
            i = rng.randrange(len(tops))
            support[b] = tops[i]
            tops[i] = b
        else:
            support[b] = TABLE
            tops.append(b)
    return support


def random_instance(rng: random.Random, max_blocks: int = 5) -> Instance:
    blocks = tuple(f"b{i}" for i in range(1, rng.randint(1, max_blocks) + 1))
    init = random_configuration(blocks, rng)
    target = random_configuration(blocks, rng)
    goal = {b: s for b, s in target.items() if s != TABLE or rng.random() < 0.3}
    if not goal:
        goal = {blocks[0]: target[blocks[0]]}
    return Instance(blocks, init, goal)


class World:
    def __init__(self, inst: Instance):
        self.blocks = set(inst.blocks)
        self.support = dict(inst.init)

    def _clear(self, b) -> bool:
        return self.support.get(b) != HAND and b not in self.support.values()

    def _held(self):
        return next((b for b, s in self.support.items() if s == HAND), None)

    def step(self, name: str, args: tuple) -> bool:
        """Apply one action if legal; return whether it was."""
        if any(a not in self.blocks for a in args):
            return False
        if name == "pick-up" and len(args) == 1:
            (x,) = args
            if self._held() is None and self.support[x] == TABLE and self._clear(x):
                self.support[x] = HAND
                return True
        elif name == "put-down" and len(args) == 1:
            (x,) = args
            if self.support[x] == HAND:
                self.support[x] = TABLE
                return True
        elif name == "stack" and len(args) == 2:
            x, y = args
            if self.support[x] == HAND and x != y and self._clear(y):
                self.support[x] = y
                return True
        elif name == "unstack" and len(args) == 2:
            x, y = args
            if self._held() is None and self.support[x] == y and self._clear(x):
                self.support[x] = HAND
                return True
        return False

    def satisfies(self, goal: dict) -> bool:
        return all(self.support[b] == s for b, s in goal.items())


def simulate(inst: Instance, plan) -> tuple[str, int, int]:
    """(outcome, plan length, executed actions) for a non-empty plan."""
    return simulate_full(inst, plan)[:3]


def simulate_full(inst: Instance, plan) -> tuple[str, int, int, int | None]:
    """As ``simulate`` plus the index of the first illegal step, if any."""
    world = World(inst)
    for i, (name, args) in enumerate(plan):
        if not world.step(name, tuple(args)):
            return "failure", len(plan), i, i
    return ("success" if world.satisfies(inst.goal) else "failure"), len(plan), len(plan), None


def solve(inst: Instance) -> list:
    """Put every block on the table, then build the goal towers bottom-up."""
    world = World(inst)
    plan = []

    def do(name, *args):
        assert world.step(name, args)
        plan.append((name, args))

    while any(s not in (TABLE, HAND) for s in world.support.values()):
        b = next(b for b, s in sorted(world.support.items()) if s not in (TABLE, HAND) and world._clear(b))
        do("unstack", b, world.support[b])
        do("put-down", b)
    done = set()

    def place(b):
        if b in done:
            return
        s = inst.goal.get(b, TABLE)
        if s != TABLE:
            place(s)
            do("pick-up", b)
            do("stack", b, s)
        done.add(b)

    for b in sorted(inst.goal):
        place(b)
    return plan


def random_plan(inst: Instance, rng: random.Random, length: int) -> list:
    """Mostly legal moves, with occasional illegal or malformed ones."""
    world = World(inst)
    blocks = sorted(inst.blocks)
    plan = []
    for _ in range(length):
        roll = rng.random()
        if roll < 0.05:
            step = (rng.choice(["fly", "pick-up", "stack"]), (rng.choice(blocks + ["ghost"]),))
        elif roll < 0.2:
            name = rng.choice(["pick-up", "put-down", "stack", "unstack"])
            n = 1 if name in ("pick-up", "put-down") else 2
            step = (name, tuple(rng.choice(blocks) for _ in range(n)))
        else:
            legal = [(n, (x,)) for n in ("pick-up", "put-down") for x in blocks]
            legal += [(n, (x, y)) for n in ("stack", "unstack") for x in blocks for y in blocks]
            legal = [s for s in legal if _legal(world, s)]
            step = rng.choice(legal)
        plan.append(step)
        world.step(*step)
    return plan


def _legal(world: World, step) -> bool:
    trial = World.__new__(World)
    trial.blocks, trial.support = world.blocks, dict(world.support)
    return trial.step(*step)
