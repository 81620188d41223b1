"""Canonical PDDL output for parsed domains and problems."""

from __future__ import annotations

from .ast import OBJECT, ActionSchema, Domain, Problem, literals

_INDENT = "  "


def _typed(pairs, force_types: bool) -> str:
    """Render ``[(a, t), (b, t), (c, u)]`` as ``a b - t c - u``."""
    if not pairs:
        return ""
    if not force_types and all(t == OBJECT for _, t in pairs):
        return " ".join(n for n, _ in pairs)
    chunks: list[str] = []
    group: list[str] = []
    current = pairs[0][1]
    for name, t in pairs:
        if t != current:
            chunks.append(" ".join(group) + f" - {current}")
            group = []
            current = t
        group.append(name)
    chunks.append(" ".join(group) + f" - {current}")
    return " ".join(chunks)


def _action(action: ActionSchema, typed: bool) -> str:
    lines = [f"{_INDENT}(:action {action.name}"]
    lines.append(f"{_INDENT * 2}:parameters ({_typed(action.params, typed)})")
    if action.precondition is not None:
        lines.append(f"{_INDENT * 2}:precondition {action.precondition}")
    eff = action.effect
    parts = [str(a) for a in eff.adds] + [f"(not {d})" for d in eff.deletes]
    if eff.cost_increase is not None:
        parts.append(f"(increase (total-cost) {eff.cost_increase})")
    if parts:
        lines.append(f"{_INDENT * 2}:effect (and {' '.join(parts)})")
    return "\n".join(lines) + ")"


def print_domain(domain: Domain) -> str:
    typed = bool(domain.types) or ":typing" in domain.requirements
    out = [f"(define (domain {domain.name})"]
    if domain.requirements:
        out.append(f"{_INDENT}(:requirements {' '.join(sorted(domain.requirements))})")
    if domain.types:
        out.append(f"{_INDENT}(:types {_typed(domain.types, True)})")
    if domain.constants:
        out.append(f"{_INDENT}(:constants {_typed(domain.constants, typed)})")
    if domain.predicates:
        decls = []
        for p in domain.predicates:
            params = _typed(p.params, typed)
            decls.append(f"({p.name}{' ' + params if params else ''})")
        out.append(f"{_INDENT}(:predicates\n{_INDENT * 2}" + f"\n{_INDENT * 2}".join(decls) + ")")
    if domain.functions:
        out.append(f"{_INDENT}(:functions " + " ".join(f"({f})" for f in domain.functions) + " - number)")
    for action in domain.actions:
        out.append(_action(action, typed))
    return "\n".join(out) + ")\n"


def print_problem(problem: Problem) -> str:
    typed = any(t != OBJECT for _, t in problem.objects)
    out = [f"(define (problem {problem.name})", f"{_INDENT}(:domain {problem.domain_name})"]
    out.append(f"{_INDENT}(:objects {_typed(problem.objects, typed)})")
    init = [str(a) for a in problem.init]
    if problem.metric:
        init.insert(0, "(= (total-cost) 0)")
    out.append(f"{_INDENT}(:init\n{_INDENT * 2}" + f"\n{_INDENT * 2}".join(init) + ")")
    goal = " ".join(str(lit) for lit in literals(problem.goal))
    out.append(f"{_INDENT}(:goal (and {goal}))")
    if problem.metric:
        out.append(f"{_INDENT}(:metric minimize (total-cost))")
    return "\n".join(out) + ")\n"


def pretty_print(node: Domain | Problem) -> str:
    if isinstance(node, Domain):
        return print_domain(node)
    if isinstance(node, Problem):
        return print_problem(node)
    raise TypeError(f"cannot print {type(node).__name__}")
