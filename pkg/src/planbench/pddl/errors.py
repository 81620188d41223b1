"""Exceptions raised while reading PDDL."""

from __future__ import annotations


class PddlError(Exception):
    """Base class for every PDDL lexing, parsing or validation error."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = ""
        if line is not None:
            where = f"line {line}" + (f", col {col}" if col is not None else "") + ": "
        super().__init__(where + message)


class IllegalCharacter(PddlError):
    def __init__(self, char: str, line: int, col: int):
        self.char = char
        super().__init__(f"illegal character {char!r}", line, col)


class PddlSyntaxError(PddlError):
    def __init__(self, expected: str, found: str, line: int | None, col: int | None = None):
        self.expected = expected
        self.found = found
        super().__init__(f"expected {expected}, found {found}", line, col)


class UnsupportedConstruct(PddlError):
    """The input uses PDDL outside the typed-STRIPS subset this package executes."""

    def __init__(self, construct: str, line: int | None):
        self.construct = construct
        super().__init__(f"unsupported construct {construct!r}", line)


class DuplicateName(PddlError):
    def __init__(self, kind: str, name: str, line: int | None = None):
        self.kind = kind
        self.name = name
        super().__init__(f"duplicate {kind} {name!r}", line)


class UnknownPredicate(PddlError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"unknown predicate {name!r}", line)


class UnknownType(PddlError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"unknown type {name!r}", line)


class UnknownObject(PddlError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"unknown object {name!r}", line)


class UndeclaredVariable(PddlError):
    def __init__(self, name: str, line: int | None = None):
        self.name = name
        super().__init__(f"variable {name} is not a declared parameter", line)


class ArityMismatch(PddlError):
    def __init__(self, name: str, expected: int, got: int, line: int | None = None):
        self.name = name
        self.expected = expected
        self.got = got
        super().__init__(f"{name!r} expects {expected} argument(s), got {got}", line)


class DomainMismatch(PddlError):
    def __init__(self, expected: str, got: str, line: int | None = None):
        self.expected = expected
        self.got = got
        super().__init__(f"problem is for domain {got!r}, not {expected!r}", line)
