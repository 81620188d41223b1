"""Reading, checking and printing typed-STRIPS PDDL."""

from .ast import (
    OBJECT,
    ActionSchema,
    And,
    Atom,
    Domain,
    Effect,
    Eq,
    Formula,
    Literal,
    Not,
    NotEq,
    PredicateDecl,
    Problem,
    literals,
)
from .errors import (
    ArityMismatch,
    DomainMismatch,
    DuplicateName,
    IllegalCharacter,
    PddlError,
    PddlSyntaxError,
    UndeclaredVariable,
    UnknownObject,
    UnknownPredicate,
    UnknownType,
    UnsupportedConstruct,
)
from .lexer import Token, TokenKind, tokenize
from .parser import (
    SUPPORTED_REQUIREMENTS,
    load_domain,
    load_problem,
    parse_domain,
    parse_domain_text,
    parse_problem,
    parse_problem_text,
)
from .printer import pretty_print, print_domain, print_problem

__all__ = [
    "OBJECT",
    "ActionSchema",
    "And",
    "ArityMismatch",
    "Atom",
    "Domain",
    "DomainMismatch",
    "DuplicateName",
    "Effect",
    "Eq",
    "Formula",
    "IllegalCharacter",
    "Literal",
    "Not",
    "NotEq",
    "PddlError",
    "PddlSyntaxError",
    "PredicateDecl",
    "Problem",
    "SUPPORTED_REQUIREMENTS",
    "Token",
    "TokenKind",
    "UndeclaredVariable",
    "UnknownObject",
    "UnknownPredicate",
    "UnknownType",
    "UnsupportedConstruct",
    "literals",
    "load_domain",
    "load_problem",
    "parse_domain",
    "parse_domain_text",
    "parse_problem",
    "parse_problem_text",
    "pretty_print",
    "print_domain",
    "print_problem",
    "tokenize",
]
