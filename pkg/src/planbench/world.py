"""STRIPS state-transition semantics over parsed domains.

Actions are ground on demand: only the actions a plan names are ever
instantiated. States are frozensets of ground atoms, so every operation
here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .pddl import OBJECT, ActionSchema, And, Atom, Domain, Eq, Formula, Literal, Not, NotEq, Problem, literals

GroundAtom = Atom
State = frozenset  # frozenset[GroundAtom]
TypeIndex = dict  # dict[str, frozenset[str]]


class GroundingError(Exception):
    """A plan step could not be turned into a ground action."""

    reason = "grounding_error"


class UnknownAction(GroundingError):
    reason = "unknown_action"

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown action {name!r}")


class ArityMismatch(GroundingError):
    reason = "arity_mismatch"

    def __init__(self, action: str, expected: int, got: int):
        self.action = action
        self.expected = expected
        self.got = got
        super().__init__(f"{action} expects {expected} argument(s), got {got}")


class TypeMismatch(GroundingError):
    reason = "type_mismatch"

    def __init__(self, action: str, param: str, required_type: str, obj: str):
        self.action = action
        self.param = param
        self.required_type = required_type
        self.obj = obj
        super().__init__(f"{action}: {obj!r} is not a {required_type} (parameter {param})")


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...]
    precondition: tuple[Literal, ...]
    adds: frozenset
    deletes: frozenset
    cost: int = 0

    @property
    def positive(self) -> frozenset:
        return frozenset(p for p in self.precondition if isinstance(p, Atom))

    @property
    def negative(self) -> frozenset:
        return frozenset(p.atom for p in self.precondition if isinstance(p, Not))

    def __str__(self) -> str:
        return f"({' '.join((self.name,) + self.args)})"


def build_type_index(domain: Domain, problem: Problem) -> TypeIndex:
    """Map every type to the objects having that type or one of its subtypes."""
    parents = domain.type_parents()
    members: dict[str, set[str]] = {OBJECT: set()}
    for t in parents:
        members[t] = set()
    for name, t in tuple(domain.constants) + tuple(problem.objects):
        while True:
            members.setdefault(t, set()).add(name)
            if t == OBJECT:
                break
            t = parents.get(t, OBJECT)
    return {t: frozenset(objs) for t, objs in members.items()}


def initial_state(problem: Problem) -> State:
    return frozenset(problem.init)


def _substitute(lit, binding: dict[str, str]):
    if isinstance(lit, Atom):
        return Atom(lit.predicate, tuple(binding.get(a, a) for a in lit.args))
    if isinstance(lit, Not):
        return Not(_substitute(lit.atom, binding))
    if isinstance(lit, Eq):
        return Eq(binding.get(lit.left, lit.left), binding.get(lit.right, lit.right))
    if isinstance(lit, NotEq):
        return NotEq(binding.get(lit.left, lit.left), binding.get(lit.right, lit.right))
    raise TypeError(f"not a literal: {lit!r}")


def ground_action(schema: ActionSchema, args: Iterable[str], index: TypeIndex) -> GroundAction:
    args = tuple(args)
    if len(args) != schema.arity:
        raise ArityMismatch(schema.name, schema.arity, len(args))
    for (var, ptype), obj in zip(schema.params, args):
        if obj not in index.get(ptype, ()):
            raise TypeMismatch(schema.name, var, ptype, obj)
    binding = {var: obj for (var, _), obj in zip(schema.params, args)}
    eff = schema.effect
    return GroundAction(
        name=schema.name,
        args=args,
        precondition=tuple(_substitute(p, binding) for p in literals(schema.precondition)),
        adds=frozenset(_substitute(a, binding) for a in eff.adds),
        deletes=frozenset(_substitute(d, binding) for d in eff.deletes),
        cost=eff.cost_increase or 0,
    )


def ground(domain: Domain, name: str, args: Iterable[str], index: TypeIndex) -> GroundAction:
    """Look up an action by name and ground it."""
    schema = domain.action(name)
    if schema is None:
        raise UnknownAction(name)
    return ground_action(schema, args, index)


def _holds(lit: Literal, state: State) -> bool:
    if isinstance(lit, Atom):
        return lit in state
    if isinstance(lit, Not):
        return lit.atom not in state
    if isinstance(lit, Eq):
        return lit.left == lit.right
    if isinstance(lit, NotEq):
        return lit.left != lit.right
    raise TypeError(f"not a literal: {lit!r}")


def _violation(lit: Literal) -> str:
    if isinstance(lit, Atom):
        return f"{lit} not in state"
    if isinstance(lit, Not):
        return f"{lit.atom} in state"
    if isinstance(lit, Eq):
        return f"{lit.left} differs from {lit.right}"
    return f"{lit.left} equals {lit.right}"


def check_applicable(state: State, action: GroundAction) -> str | None:
    """Return a description of the first unmet precondition, or None."""
    for lit in action.precondition:
        if not _holds(lit, state):
            return _violation(lit)
    return None


def is_applicable(state: State, action: GroundAction) -> tuple[bool, str | None]:
    problem = check_applicable(state, action)
    return problem is None, problem


def apply_action(state: State, action: GroundAction) -> State:
    # adds are unioned last, so an atom both added and deleted survives
    return (state - action.deletes) | action.adds


def goal_satisfied(state: State, goal: Formula) -> bool:
    if isinstance(goal, And):
        return all(_holds(p, state) for p in goal.parts)
    return _holds(goal, state)


def unsatisfied_goals(state: State, goal: Formula) -> list[Literal]:
    return [p for p in literals(goal) if not _holds(p, state)]
