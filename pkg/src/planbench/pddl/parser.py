"""Recursive-descent parser for PDDL domains and problems.

Token streams are first grouped into nested lists (s-expressions), which
are then interpreted into the trees of :mod:`planbench.pddl.ast`. Anything
outside typed STRIPS with negative preconditions, equality and
``total-cost`` action costs raises :class:`UnsupportedConstruct`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

from .ast import (
    OBJECT,
    ActionSchema,
    And,
    Atom,
    Domain,
    Effect,
    Eq,
    Literal,
    Not,
    NotEq,
    PredicateDecl,
    Problem,
)
from .errors import (
    ArityMismatch,
    DomainMismatch,
    DuplicateName,
    PddlSyntaxError,
    UndeclaredVariable,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
    UnsupportedConstruct,
)
from .lexer import Token, TokenKind, tokenize

SUPPORTED_REQUIREMENTS = frozenset(
    {":strips", ":typing", ":negative-preconditions", ":equality", ":action-costs"}
)
TOTAL_COST = "total-cost"

# Heads that are valid PDDL but fall outside the supported subset.
_UNSUPPORTED_CONDITION_HEADS = frozenset(
    {"or", "imply", "exists", "forall", "when", "<", ">", "<=", ">=", "preference"}
)
_UNSUPPORTED_EFFECT_HEADS = frozenset(
    {"forall", "when", "decrease", "assign", "scale-up", "scale-down", "oneof", "probabilistic"}
)
_UNSUPPORTED_SECTIONS = frozenset(
    {":derived", ":durative-action", ":constraints", ":process", ":event", ":timed-initial-literals"}
)


@dataclass
class SList:
    """A parenthesised list together with the position of its opening paren."""

    items: list["SExpr"]
    line: int
    col: int

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Token):
            return self.items[0].text
        return None

    def __len__(self) -> int:
        return len(self.items)


SExpr = Union[Token, SList]


def _describe(node: SExpr | None) -> str:
    if node is None:
        return "end of input"
    if isinstance(node, Token):
        return repr(node.text)
    return "'(" + (node.head() or "") + " ...)'"


def _line(node: SExpr | None) -> int | None:
    return None if node is None else node.line


def read_sexprs(tokens: list[Token]) -> list[SExpr]:
    """Group a token stream into nested lists."""
    stack: list[SList] = []
    top: list[SExpr] = []
    for tok in tokens:
        if tok.kind is TokenKind.LPAREN:
            stack.append(SList([], tok.line, tok.col))
        elif tok.kind is TokenKind.RPAREN:
            if not stack:
                raise PddlSyntaxError("expression", "')'", tok.line, tok.col)
            done = stack.pop()
            (stack[-1].items if stack else top).append(done)
        else:
            (stack[-1].items if stack else top).append(tok)
    if stack:
        raise PddlSyntaxError("')'", "end of input", stack[-1].line, stack[-1].col)
    return top


def _expect_list(node: SExpr | None, what: str) -> SList:
    if not isinstance(node, SList):
        raise PddlSyntaxError(what, _describe(node), _line(node))
    return node


def _expect_name(node: SExpr | None, what: str = "name") -> str:
    if not isinstance(node, Token) or node.kind is not TokenKind.SYMBOL:
        raise PddlSyntaxError(what, _describe(node), _line(node))
    return node.text


def _expect_keyword(node: SExpr | None, keyword: str) -> None:
    if not isinstance(node, Token) or node.text != keyword:
        raise PddlSyntaxError(repr(keyword), _describe(node), _line(node))


def _single_define(tokens: list[Token], kind: str) -> tuple[str, list[SExpr]]:
    exprs = read_sexprs(tokens)
    if not exprs:
        raise PddlSyntaxError("'(define'", "end of input", None)
    if len(exprs) > 1:
        raise PddlSyntaxError("end of input", _describe(exprs[1]), _line(exprs[1]))
    root = _expect_list(exprs[0], "'(define'")
    if root.head() != "define":
        raise PddlSyntaxError("'define'", _describe(root.items[0] if root.items else None), root.line)
    if len(root) < 2:
        raise PddlSyntaxError(f"'({kind} <name>)'", "end of input", root.line)
    header = _expect_list(root.items[1], f"'({kind} <name>)'")
    if header.head() != kind or len(header) != 2:
        raise PddlSyntaxError(f"'({kind} <name>)'", _describe(header), header.line)
    return _expect_name(header.items[1], f"{kind} name"), root.items[2:]


def parse_typed_list(items: list[SExpr], variables: bool, line: int | None) -> list[tuple[str, str]]:
    """Parse ``a b - t1 c - t2 d`` into ``[(a, t1), (b, t1), (c, t2), (d, object)]``."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        node = items[i]
        if isinstance(node, Token) and node.text == "-":
            if i + 1 >= len(items):
                raise PddlSyntaxError("type name after '-'", "end of list", node.line, node.col)
            type_node = items[i + 1]
            if isinstance(type_node, SList):
                if type_node.head() == "either":
                    raise UnsupportedConstruct("either", type_node.line)
                raise PddlSyntaxError("type name", _describe(type_node), type_node.line)
            if not pending:
                raise PddlSyntaxError("name before '-'", "'-'", node.line, node.col)
            type_name = _expect_name(type_node, "type name")
            out.extend((name, type_name) for name in pending)
            pending = []
            i += 2
            continue
        if not isinstance(node, Token):
            raise PddlSyntaxError("name", _describe(node), node.line)
        if variables and node.kind is not TokenKind.VARIABLE:
            raise PddlSyntaxError("variable", repr(node.text), node.line, node.col)
        if not variables and node.kind is not TokenKind.SYMBOL:
            raise PddlSyntaxError("name", repr(node.text), node.line, node.col)
        pending.append(node.text)
        i += 1
    out.extend((name, OBJECT) for name in pending)
    return out


class _Scope:
    """Names an expression may refer to while it is being checked."""

    def __init__(
        self,
        predicates: dict[str, PredicateDecl],
        constants: set[str],
        variables: set[str] | None,
    ):
        self.predicates = predicates
        self.constants = constants
        self.variables = variables  # None: ground context, variables forbidden

    def term(self, node: SExpr) -> str:
        if isinstance(node, SList):
            head = node.head()
            if head is not None and head not in self.predicates:
                # a function term such as (total-cost) used as an argument
                raise UnsupportedConstruct(f"function term ({head})", node.line)
            raise PddlSyntaxError("term", _describe(node), node.line)
        if node.kind is TokenKind.VARIABLE:
            if self.variables is None:
                raise PddlSyntaxError("object name", repr(node.text), node.line, node.col)
            if node.text not in self.variables:
                raise UndeclaredVariable(node.text, node.line)
            return node.text
        if node.kind is not TokenKind.SYMBOL:
            raise PddlSyntaxError("term", repr(node.text), node.line, node.col)
        if node.text not in self.constants:
            raise UnknownObject(node.text, node.line)
        return node.text

    def atom(self, node: SList) -> Atom:
        name = node.head()
        if name is None:
            raise PddlSyntaxError("predicate name", _describe(node.items[0] if node.items else None), node.line)
        decl = self.predicates.get(name)
        if decl is None:
            raise UnknownPredicate(name, node.line)
        args = tuple(self.term(a) for a in node.items[1:])
        if len(args) != decl.arity:
            raise ArityMismatch(name, decl.arity, len(args), node.line)
        return Atom(name, args)


def _parse_condition(node: SExpr, scope: _Scope) -> list[Literal]:
    """Parse a precondition or goal into a flat list of literals."""
    lst = _expect_list(node, "condition")
    head = lst.head()
    if head is None:
        if not lst.items:
            return []
        raise PddlSyntaxError("condition", _describe(lst.items[0]), lst.line)
    if head == "and":
        out: list[Literal] = []
        for part in lst.items[1:]:
            out.extend(_parse_condition(part, scope))
        return out
    if head == "not":
        if len(lst) != 2:
            raise PddlSyntaxError("one argument to 'not'", f"{len(lst) - 1}", lst.line)
        inner = _expect_list(lst.items[1], "atom under 'not'")
        inner_head = inner.head()
        if inner_head == "=":
            eq = _parse_equality(inner, scope)
            return [NotEq(eq.left, eq.right)]
        if inner_head in _UNSUPPORTED_CONDITION_HEADS or inner_head in {"and", "not"}:
            raise UnsupportedConstruct(f"not over {inner_head}", inner.line)
        return [Not(scope.atom(inner))]
    if head == "=":
        return [_parse_equality(lst, scope)]
    if head in _UNSUPPORTED_CONDITION_HEADS:
        raise UnsupportedConstruct(head, lst.line)
    return [scope.atom(lst)]


def _parse_equality(lst: SList, scope: _Scope) -> Eq:
    if len(lst) != 3:
        raise PddlSyntaxError("two arguments to '='", f"{len(lst) - 1}", lst.line)
    return Eq(scope.term(lst.items[1]), scope.term(lst.items[2]))


def _parse_effect(node: SExpr, scope: _Scope, acc: dict) -> None:
    lst = _expect_list(node, "effect")
    head = lst.head()
    if head is None:
        if not lst.items:
            return
        raise PddlSyntaxError("effect", _describe(lst.items[0]), lst.line)
    if head == "and":
        for part in lst.items[1:]:
            _parse_effect(part, scope, acc)
    elif head == "not":
        if len(lst) != 2:
            raise PddlSyntaxError("one argument to 'not'", f"{len(lst) - 1}", lst.line)
        inner = _expect_list(lst.items[1], "atom under 'not'")
        if inner.head() in _UNSUPPORTED_EFFECT_HEADS:
            raise UnsupportedConstruct(inner.head(), inner.line)
        acc["deletes"].append(scope.atom(inner))
    elif head == "increase":
        if len(lst) != 3:
            raise PddlSyntaxError("'(increase (total-cost) <n>)'", _describe(lst), lst.line)
        fluent = _expect_list(lst.items[1], "'(total-cost)'")
        if fluent.head() != TOTAL_COST or len(fluent) != 1:
            raise UnsupportedConstruct(f"numeric fluent {_describe(fluent)}", fluent.line)
        amount = lst.items[2]
        if isinstance(amount, SList):
            raise UnsupportedConstruct("non-constant cost increase", amount.line)
        try:
            value = int(amount.text)
        except ValueError:
            raise PddlSyntaxError("integer cost", repr(amount.text), amount.line, amount.col) from None
        if value < 0:
            raise PddlSyntaxError("non-negative cost", repr(amount.text), amount.line, amount.col)
        acc["cost"] = (acc["cost"] or 0) + value
    elif head in _UNSUPPORTED_EFFECT_HEADS:
        raise UnsupportedConstruct(head, lst.line)
    else:
        acc["adds"].append(scope.atom(lst))


def _check_unique(pairs: list[tuple[str, str]], kind: str, line: int | None) -> None:
    seen: set[str] = set()
    for name, _ in pairs:
        if name in seen:
            raise DuplicateName(kind, name, line)
        seen.add(name)


def _check_type_forest(types: list[tuple[str, str]], line: int | None) -> None:
    parents = dict(types)
    for name, parent in types:
        if parent != OBJECT and parent not in parents:
            raise UnknownType(parent, line)
    for start in parents:
        seen = {start}
        t = parents[start]
        while t != OBJECT:
            if t in seen:
                raise PddlSyntaxError("acyclic type hierarchy", f"cycle through {t!r}", line)
            seen.add(t)
            t = parents[t]


def parse_domain(tokens: list[Token]) -> Domain:
    name, sections = _single_define(tokens, "domain")
    requirements: set[str] = set()
    types: list[tuple[str, str]] = []
    constants: list[tuple[str, str]] = []
    predicates: list[PredicateDecl] = []
    functions: list[str] = []
    raw_actions: list[SList] = []
    seen_sections: set[str] = set()

    for node in sections:
        sec = _expect_list(node, "domain section")
        key = sec.head()
        if key in _UNSUPPORTED_SECTIONS:
            raise UnsupportedConstruct(key, sec.line)
        if key != ":action":
            if key in seen_sections:
                raise DuplicateName("section", key or "", sec.line)
            seen_sections.add(key or "")
        body = sec.items[1:]
        if key == ":requirements":
            for tok in body:
                if not isinstance(tok, Token) or tok.kind is not TokenKind.KEYWORD:
                    raise PddlSyntaxError("requirement flag", _describe(tok), _line(tok))
                if tok.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedConstruct(tok.text, tok.line)
                requirements.add(tok.text)
        elif key == ":types":
            for tname, parent in parse_typed_list(body, variables=False, line=sec.line):
                if tname == OBJECT:
                    if parent != OBJECT:
                        raise PddlSyntaxError("'object' as root type", f"object - {parent}", sec.line)
                    continue
                if tname in dict(types):
                    raise DuplicateName("type", tname, sec.line)
                types.append((tname, parent))
        elif key == ":constants":
            constants = parse_typed_list(body, variables=False, line=sec.line)
            _check_unique(constants, "constant", sec.line)
        elif key == ":predicates":
            for decl_node in body:
                decl = _expect_list(decl_node, "predicate declaration")
                pname = _expect_name(decl.items[0] if decl.items else None, "predicate name")
                params = parse_typed_list(decl.items[1:], variables=True, line=decl.line)
                _check_unique(params, "parameter", decl.line)
                if any(p.name == pname for p in predicates):
                    raise DuplicateName("predicate", pname, decl.line)
                predicates.append(PredicateDecl(pname, tuple(params)))
        elif key == ":functions":
            i = 0
            while i < len(body):
                item = body[i]
                if isinstance(item, Token) and item.text == "-":
                    type_node = body[i + 1] if i + 1 < len(body) else None
                    if not isinstance(type_node, Token) or type_node.text != "number":
                        raise UnsupportedConstruct(f"function type {_describe(type_node)}", sec.line)
                    i += 2
                    continue
                fn = _expect_list(item, "function declaration")
                if fn.head() != TOTAL_COST or len(fn) != 1:
                    raise UnsupportedConstruct(f"numeric fluent {_describe(fn)}", fn.line)
                functions.append(TOTAL_COST)
                i += 1
        elif key == ":action":
            raw_actions.append(sec)
        else:
            raise PddlSyntaxError("domain section keyword", _describe(sec), sec.line)

    _check_type_forest(types, None)
    known_types = {OBJECT} | {t for t, _ in types}
    for cname, ctype in constants:
        if ctype not in known_types:
            raise UnknownType(ctype, None)
    pred_map = {p.name: p for p in predicates}
    for p in predicates:
        for _, ptype in p.params:
            if ptype not in known_types:
                raise UnknownType(ptype, None)

    actions: list[ActionSchema] = []
    for sec in raw_actions:
        action = _parse_action(sec, pred_map, {c for c, _ in constants}, known_types)
        if any(a.name == action.name for a in actions):
            raise DuplicateName("action", action.name, sec.line)
        actions.append(action)

    return Domain(
        name=name,
        requirements=frozenset(requirements),
        types=tuple(types),
        constants=tuple(constants),
        predicates=tuple(predicates),
        functions=tuple(functions),
        actions=tuple(actions),
    )


def _parse_action(
    sec: SList,
    predicates: dict[str, PredicateDecl],
    constants: set[str],
    known_types: set[str],
) -> ActionSchema:
    items = sec.items[1:]
    name = _expect_name(items[0] if items else None, "action name")
    fields: dict[str, SExpr] = {}
    i = 1
    while i < len(items):
        key = items[i]
        if not isinstance(key, Token) or key.kind is not TokenKind.KEYWORD:
            raise PddlSyntaxError("action field keyword", _describe(key), _line(key))
        if key.text not in (":parameters", ":precondition", ":effect"):
            raise UnsupportedConstruct(key.text, key.line)
        if key.text in fields:
            raise DuplicateName("action field", key.text, key.line)
        if i + 1 >= len(items):
            raise PddlSyntaxError(f"value for {key.text}", "end of action", key.line)
        fields[key.text] = items[i + 1]
        i += 2

    params: list[tuple[str, str]] = []
    if ":parameters" in fields:
        plist = _expect_list(fields[":parameters"], "parameter list")
        params = parse_typed_list(plist.items, variables=True, line=plist.line)
        _check_unique(params, "parameter", plist.line)
        for _, ptype in params:
            if ptype not in known_types:
                raise UnknownType(ptype, plist.line)

    scope = _Scope(predicates, constants, {v for v, _ in params})
    precondition = None
    if ":precondition" in fields:
        lits = _parse_condition(fields[":precondition"], scope)
        precondition = And(tuple(lits)) if lits else None

    acc: dict = {"adds": [], "deletes": [], "cost": None}
    if ":effect" in fields:
        _parse_effect(fields[":effect"], scope, acc)
    effect = Effect(tuple(acc["adds"]), tuple(acc["deletes"]), acc["cost"])
    return ActionSchema(name, tuple(params), precondition, effect)


def parse_problem(tokens: list[Token], domain: Domain) -> Problem:
    name, sections = _single_define(tokens, "problem")
    domain_name: str | None = None
    objects: list[tuple[str, str]] = []
    init: list[Atom] = []
    goal: And | None = None
    metric = False
    known_types = {OBJECT} | {t for t, _ in domain.types}
    pred_map = {p.name: p for p in domain.predicates}
    seen_sections: set[str] = set()
    scope: _Scope | None = None

    def ground_scope() -> _Scope:
        return _Scope(pred_map, {c for c, _ in domain.constants} | {o for o, _ in objects}, None)

    for node in sections:
        sec = _expect_list(node, "problem section")
        key = sec.head()
        if key in seen_sections:
            raise DuplicateName("section", key or "", sec.line)
        seen_sections.add(key or "")
        body = sec.items[1:]
        if key == ":domain":
            domain_name = _expect_name(body[0] if body else None, "domain name")
            if domain_name != domain.name:
                raise DomainMismatch(domain.name, domain_name, sec.line)
        elif key == ":requirements":
            for tok in body:
                if not isinstance(tok, Token) or tok.kind is not TokenKind.KEYWORD:
                    raise PddlSyntaxError("requirement flag", _describe(tok), _line(tok))
                if tok.text not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedConstruct(tok.text, tok.line)
        elif key == ":objects":
            if scope is not None:
                raise PddlSyntaxError("':objects' before ':init'/':goal'", ":objects", sec.line)
            objects = parse_typed_list(body, variables=False, line=sec.line)
            _check_unique(objects + list(domain.constants), "object", sec.line)
            for _, otype in objects:
                if otype not in known_types:
                    raise UnknownType(otype, sec.line)
        elif key == ":init":
            scope = scope or ground_scope()
            for item in body:
                fact = _expect_list(item, "initial fact")
                if fact.head() == "=":
                    _check_cost_init(fact)
                    continue
                if fact.head() == "not":
                    raise UnsupportedConstruct("negative initial fact", fact.line)
                init.append(scope.atom(fact))
        elif key == ":goal":
            scope = scope or ground_scope()
            if len(body) != 1:
                raise PddlSyntaxError("one goal formula", f"{len(body)} expressions", sec.line)
            lits = _parse_condition(body[0], scope)
            if not lits:
                raise PddlSyntaxError("non-empty goal", "empty conjunction", sec.line)
            goal = And(tuple(lits))
        elif key == ":metric":
            if (
                len(body) != 2
                or not isinstance(body[0], Token)
                or body[0].text != "minimize"
                or not isinstance(body[1], SList)
                or body[1].head() != TOTAL_COST
                or len(body[1]) != 1
            ):
                raise UnsupportedConstruct("metric other than (minimize (total-cost))", sec.line)
            metric = True
        elif key == ":constraints":
            raise UnsupportedConstruct(key, sec.line)
        else:
            raise PddlSyntaxError("problem section keyword", _describe(sec), sec.line)

    if domain_name is None:
        raise PddlSyntaxError("'(:domain <name>)'", "nothing", None)
    if goal is None:
        raise PddlSyntaxError("'(:goal ...)'", "nothing", None)
    return Problem(name, domain_name, tuple(objects), tuple(init), goal, metric)


def _check_cost_init(fact: SList) -> None:
    if len(fact) == 3 and isinstance(fact.items[1], SList) and fact.items[1].head() == TOTAL_COST:
        value = fact.items[2]
        if isinstance(value, Token) and value.text in ("0", "0.0"):
            return
    raise UnsupportedConstruct("numeric initial value other than (= (total-cost) 0)", fact.line)


def parse_domain_text(text: str) -> Domain:
    return parse_domain(tokenize(text))


def parse_problem_text(text: str, domain: Domain) -> Problem:
    return parse_problem(tokenize(text), domain)


def load_domain(path: str | Path) -> Domain:
    return parse_domain_text(Path(path).read_text(encoding="utf-8"))


def load_problem(path: str | Path, domain: Domain) -> Problem:
    return parse_problem_text(Path(path).read_text(encoding="utf-8"), domain)
