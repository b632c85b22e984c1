"""Lexer for Disco source and REPL input.

All synonym spellings normalize at this stage: `&&`, `and`, and U+2227 all
come out as the canonical `/\\` operator token, so the parser never sees
spelling differences. `--` comments vanish; `|||` doc lines and `!!!` test
lines become dedicated tokens carrying their text.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LexError
from .ops import BINOP_SPELLINGS, KEYWORDS, SINGLE_SYMBOLS, SYMBOLS, UNICODE_MAP, WORD_OPS


@dataclass(frozen=True)
class Token:
    kind: str  # 'nat' 'ident' 'char' 'string' 'op' 'keyword' 'delim' 'doc' 'test'
    text: str
    span: tuple[int, int]  # (line, column), 1-based


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"', "0": "\0"}


def _is_ident_start(c: str) -> bool:
    return c.isalpha() and c.isascii() or c == "_"


def _is_ident_char(c: str) -> bool:
    return (c.isalnum() and c.isascii()) or c in ("_", "'")


class _Lexer:
    def __init__(self, source: str, first_line: int = 1):
        self.lines = source.split("\n")
        self.tokens: list[Token] = []
        self.first_line = first_line

    def run(self) -> list[Token]:
        for offset, line in enumerate(self.lines):
            self.lex_line(line, self.first_line + offset)
        return self.tokens

    def emit(self, kind: str, text: str, line: int, col: int) -> None:
        self.tokens.append(Token(kind, text, (line, col)))

    def lex_line(self, line: str, lineno: int) -> None:
        stripped = line.lstrip()
        indent = len(line) - len(stripped)
        if stripped.startswith("|||"):
            self.emit("doc", stripped[3:].strip(), lineno, indent + 1)
            return
        if stripped.startswith("!!!"):
            self.emit("test", stripped[3:].strip(), lineno, indent + 1)
            return
        i = 0
        n = len(line)
        while i < n:
            c = line[i]
            col = i + 1
            if c in " \t":
                i += 1
                continue
            if c == "-" and line.startswith("--", i):
                return  # comment to end of line
            if c in UNICODE_MAP:
                kind, text = UNICODE_MAP[c]
                self.emit(kind, text, lineno, col)
                i += 1
                continue
            if c.isdigit():
                j = i
                while j < n and line[j].isdigit():
                    j += 1
                self.emit("nat", line[i:j], lineno, col)
                i = j
                continue
            if _is_ident_start(c):
                j = i
                while j < n and _is_ident_char(line[j]):
                    j += 1
                word = line[i:j]
                if word in WORD_OPS:
                    self.emit("op", BINOP_SPELLINGS.get(word, word), lineno, col)
                elif word in KEYWORDS:
                    self.emit("keyword", word, lineno, col)
                else:
                    self.emit("ident", word, lineno, col)
                i = j
                continue
            if c == "'":
                i = self.lex_char(line, i, lineno)
                continue
            if c == '"':
                i = self.lex_string(line, i, lineno)
                continue
            if c == "~":
                i = self.lex_section(line, i, lineno)
                continue
            matched = False
            for sym in SYMBOLS:
                if line.startswith(sym, i):
                    if sym in ("{?", "?}", ".."):
                        self.emit("delim", sym, lineno, col)
                    else:
                        self.emit("op", BINOP_SPELLINGS.get(sym, sym), lineno, col)
                    i += len(sym)
                    matched = True
                    break
            if matched:
                continue
            if c in SINGLE_SYMBOLS:
                if c in "+-*/^<>%":
                    self.emit("op", BINOP_SPELLINGS.get(c, c), lineno, col)
                else:
                    self.emit("delim", c, lineno, col)
                i += 1
                continue
            raise LexError(f"unexpected character {c!r}.", (lineno, col))

    def lex_char(self, line: str, i: int, lineno: int) -> int:
        col = i + 1
        j = i + 1
        if j >= len(line):
            raise LexError("unterminated character literal.", (lineno, col))
        if line[j] == "\\":
            if j + 1 >= len(line) or line[j + 1] not in _ESCAPES:
                raise LexError("bad escape in character literal.", (lineno, col))
            value = _ESCAPES[line[j + 1]]
            j += 2
        else:
            value = line[j]
            j += 1
        if j >= len(line) or line[j] != "'":
            raise LexError("unterminated character literal.", (lineno, col))
        self.emit("char", value, lineno, col)
        return j + 1

    def lex_string(self, line: str, i: int, lineno: int) -> int:
        col = i + 1
        j = i + 1
        buf = []
        while j < len(line):
            c = line[j]
            if c == '"':
                self.emit("string", "".join(buf), lineno, col)
                return j + 1
            if c == "\\":
                if j + 1 >= len(line) or line[j + 1] not in _ESCAPES:
                    raise LexError("bad escape in string literal.", (lineno, col))
                buf.append(_ESCAPES[line[j + 1]])
                j += 2
            else:
                buf.append(c)
                j += 1
        raise LexError("unterminated string literal.", (lineno, col))

    def lex_section(self, line: str, i: int, lineno: int) -> int:
        col = i + 1
        j = line.find("~", i + 1)
        if j < 0:
            raise LexError("unterminated operator section.", (lineno, col))
        spelling = line[i + 1 : j].strip()
        canon = BINOP_SPELLINGS.get(spelling)
        if canon is None and spelling in UNICODE_MAP:
            canon = UNICODE_MAP[spelling][1]
            canon = BINOP_SPELLINGS.get(canon, canon)
        if canon is None:
            raise LexError(f"unknown operator in section: {spelling!r}.", (lineno, col))
        self.emit("section", canon, lineno, col)
        return j + 1


def tokenize(source: str, first_line: int = 1) -> list[Token]:
    """Tokenize Disco source. Comments are dropped; doc and test lines
    produce one token each."""
    return _Lexer(source, first_line).run()
