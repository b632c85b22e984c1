"""Operator table shared by the lexer, parser, and pretty-printer.

Every operator has one canonical name; all surface spellings (Unicode,
ASCII, words) normalize to it at lex time. Precedence: higher binds
tighter; `+` is anchored at level 7, left associative.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class OpInfo:
    canon: str
    prec: int
    assoc: str  # 'left' | 'right' | 'none'
    show: str   # spelling used when pretty-printing


BINOPS = {
    "==>": OpInfo("==>", 1, "right", "==>"),
    "\\/": OpInfo("\\/", 2, "left", "\\/"),
    "/\\": OpInfo("/\\", 3, "left", "/\\"),
    "==": OpInfo("==", 5, "none", "=="),
    "/=": OpInfo("/=", 5, "none", "/="),
    "<": OpInfo("<", 5, "none", "<"),
    "<=": OpInfo("<=", 5, "none", "<="),
    ">": OpInfo(">", 5, "none", ">"),
    ">=": OpInfo(">=", 5, "none", ">="),
    "divides": OpInfo("divides", 5, "none", "divides"),
    "+": OpInfo("+", 7, "left", "+"),
    "-": OpInfo("-", 7, "left", "-"),
    "union": OpInfo("union", 7, "left", "union"),
    "\\\\": OpInfo("\\\\", 7, "left", "\\\\"),
    "*": OpInfo("*", 8, "left", "*"),
    "/": OpInfo("/", 8, "left", "/"),
    "mod": OpInfo("mod", 8, "left", "mod"),
    "intersect": OpInfo("intersect", 8, "left", "intersect"),
    "^": OpInfo("^", 10, "right", "^"),
}

PREC_NOT = 4
PREC_NEG = 9
PREC_APP = 11

#: Surface spelling -> canonical operator name (binary operators).
BINOP_SPELLINGS = {
    "==>": "==>", "implies": "==>", "⇒": "==>", "⟹": "==>",
    "\\/": "\\/", "||": "\\/", "or": "\\/", "∨": "\\/",
    "/\\": "/\\", "&&": "/\\", "and": "/\\", "∧": "/\\",
    "==": "==",
    "/=": "/=", "!=": "/=", "≠": "/=",
    "<": "<", "<=": "<=", "≤": "<=",
    ">": ">", ">=": ">=", "≥": ">=",
    "divides": "divides",
    "+": "+", "-": "-",
    "union": "union", "∪": "union",
    "\\\\": "\\\\", "∖": "\\\\",
    "*": "*", "×": "*",
    "/": "/",
    "mod": "mod", "%": "mod",
    "intersect": "intersect", "∩": "intersect",
    "^": "^",
}

#: Word spellings that lex as operators rather than identifiers.
WORD_OPS = {"and", "or", "not", "implies", "divides", "mod", "union", "intersect"}

#: Multi-character symbolic operator/delimiter spellings, longest first.
SYMBOLS = [
    "==>", "{?", "?}", "..", "->", "==", "/=", "!=", "<=", ">=",
    "&&", "||", "/\\", "\\/", "\\\\",
]

SINGLE_SYMBOLS = "+-*/^<>%(),[]{}|:=\\.~_"

#: Single Unicode characters that normalize to named tokens.
UNICODE_MAP = {
    "∧": ("op", "/\\"),
    "∨": ("op", "\\/"),
    "¬": ("op", "not"),
    "≠": ("op", "/="),
    "≤": ("op", "<="),
    "≥": ("op", ">="),
    "⇒": ("op", "==>"),
    "⟹": ("op", "==>"),
    "×": ("op", "*"),
    "→": ("op", "->"),
    "∪": ("op", "union"),
    "∩": ("op", "intersect"),
    "∖": ("op", "\\\\"),
    "λ": ("delim", "\\"),
    "∀": ("keyword", "forall"),
    "∃": ("keyword", "exists"),
    "ℕ": ("ident", "ℕ"),
    "ℤ": ("ident", "ℤ"),
    "𝔽": ("ident", "𝔽"),
    "ℚ": ("ident", "ℚ"),
}

KEYWORDS = {
    "if", "is", "otherwise", "in", "let", "type", "import",
    "forall", "exists", "true", "false", "unit",
}

#: Type-name spellings -> base type constructor name.
BASE_TYPE_SPELLINGS = {
    "N": "N", "Nat": "N", "Natural": "N", "ℕ": "N",
    "Z": "Z", "Int": "Z", "Integer": "Z", "ℤ": "Z",
    "F": "F", "Frac": "F", "Fractional": "F", "𝔽": "F",
    "Q": "Q", "Rational": "Q", "ℚ": "Q",
    "Bool": "Bool", "B": "Bool",
    "Char": "Char",
    "Unit": "Unit",
    "Prop": "Prop",
}
