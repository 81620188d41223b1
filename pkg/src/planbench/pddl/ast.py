"""Immutable syntax trees for the typed-STRIPS PDDL subset.

All nodes are frozen dataclasses built from tuples, so two trees compare
equal exactly when they describe the same domain or problem. Source line
numbers are deliberately not stored: a tree parsed from pretty-printed
output must equal the tree it was printed from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

OBJECT = "object"


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"


@dataclass(frozen=True)
class Not:
    atom: Atom

    def __str__(self) -> str:
        return f"(not {self.atom})"


@dataclass(frozen=True)
class Eq:
    left: str
    right: str

    def __str__(self) -> str:
        return f"(= {self.left} {self.right})"


@dataclass(frozen=True)
class NotEq:
    left: str
    right: str

    def __str__(self) -> str:
        return f"(not (= {self.left} {self.right}))"


Literal = Union[Atom, Not, Eq, NotEq]


@dataclass(frozen=True)
class And:
    parts: tuple[Literal, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("And requires at least one conjunct")

    def __str__(self) -> str:
        return "(and " + " ".join(str(p) for p in self.parts) + ")"


Formula = Union[And, Atom, Not, Eq, NotEq]


@dataclass(frozen=True)
class Effect:
    adds: tuple[Atom, ...] = ()
    deletes: tuple[Atom, ...] = ()
    cost_increase: int | None = None


@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[tuple[str, str], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    precondition: And | None
    effect: Effect

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class Domain:
    name: str
    requirements: frozenset[str]
    types: tuple[tuple[str, str], ...]
    constants: tuple[tuple[str, str], ...]
    predicates: tuple[PredicateDecl, ...]
    functions: tuple[str, ...]
    actions: tuple[ActionSchema, ...]

    def predicate(self, name: str) -> PredicateDecl | None:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def action(self, name: str) -> ActionSchema | None:
        for a in self.actions:
            if a.name == name:
                return a
        return None

    def type_parents(self) -> dict[str, str]:
        return dict(self.types)


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]
    init: tuple[Atom, ...]
    goal: And
    metric: bool = False


def literals(formula: Formula | None) -> tuple[Literal, ...]:
    """Flatten a formula into its conjuncts."""
    if formula is None:
        return ()
    if isinstance(formula, And):
        return formula.parts
    return (formula,)
