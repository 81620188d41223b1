"""Tokenizer for PDDL source text."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import IllegalCharacter

# Characters allowed inside a name. Digits and '.' cover numeric literals
# such as action costs; '=', '<', '>' etc. are operator names.
_NAME_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789"
    "-_.=<>+*/!?:"
)
_WHITESPACE = frozenset(" \t\r\n\f\v")


class TokenKind(enum.Enum):
    LPAREN = "lparen"
    RPAREN = "rparen"
    SYMBOL = "symbol"
    KEYWORD = "keyword"
    VARIABLE = "variable"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.text


def tokenize(source: str) -> list[Token]:
    """Split PDDL text into tokens.

    Comments run from ``;`` to end of line. Names are case-folded to lower
    case. Line and column numbers are 1-based.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    line_start = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            i += 1
            line_start = i
        elif c in _WHITESPACE:
            i += 1
        elif c == ";":
            while i < n and source[i] != "\n":
                i += 1
        elif c == "(":
            tokens.append(Token(TokenKind.LPAREN, "(", line, i - line_start + 1))
            i += 1
        elif c == ")":
            tokens.append(Token(TokenKind.RPAREN, ")", line, i - line_start + 1))
            i += 1
        elif c in _NAME_CHARS:
            start = i
            while i < n and source[i] in _NAME_CHARS:
                i += 1
            text = source[start:i].lower()
            if text.startswith("?"):
                kind = TokenKind.VARIABLE
            elif text.startswith(":"):
                kind = TokenKind.KEYWORD
            else:
                kind = TokenKind.SYMBOL
            tokens.append(Token(kind, text, line, start - line_start + 1))
        else:
            raise IllegalCharacter(c, line, i - line_start + 1)
    return tokens
