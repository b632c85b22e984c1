"""Parser for Disco modules, expressions, types, and REPL input.

Expressions use precedence climbing over the shared operator table.
Juxtaposition follows a syntax-directed rule: a numeric literal or a
parenthesized operator expression on the left means multiplication,
anything else means function application.

Modules are line-oriented: a declaration starts at column 1 and owns all
following indented lines, which is enough for multi-line case expressions
without full indentation sensitivity.
"""

from __future__ import annotations

from fractions import Fraction

from . import ast
from .ast import (
    AbsOrCard, App, BinOp, BoolLit, Case, CaseBranch, CharLit, Command,
    Comprehension, ContainerLit, DefClause, DocLines, EllipsisLit, Exists,
    Filter, Forall, GBool, Generator, GOtherwise, GPat, Import, Lambda, Let,
    LetQual, NatLit, PArith, PBool, PChar, PInj, PNat, PTuple, PUnit, PVar,
    PWild, Section, StrLit, SurfaceModule, TestProp, Tuple, TypeSig,
    TypeSynonym, UnitLit, UnOp, Var,
)
from .errors import ParseError
from .lexer import Token, tokenize
from .ops import BASE_TYPE_SPELLINGS, BINOPS, PREC_APP, PREC_NEG, PREC_NOT
from .types import TArrow, TBag, TList, TProd, TSet, TSum, TSyn, TVar, Type

_JUXT_START_DELIMS = {"(", "["}
_JUXT_START_KINDS = {"nat", "ident", "char", "string"}
_JUXT_START_KEYWORDS = {"true", "false", "unit"}


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input.")
        self.pos += 1
        return tok

    def at(self, kind: str, text: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == kind and (text is None or tok.text == text)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok is None:
            what = text or kind
            raise ParseError(f"expected {what!r} but input ended.")
        if tok.kind != kind or (text is not None and tok.text != text):
            what = text or kind
            raise ParseError(f"expected {what!r} but found {tok.text!r}.", tok.span)
        return self.next()

    def done(self) -> bool:
        return self.pos >= len(self.tokens)


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

def resolve_juxtaposition(lhs: ast.Expr, lhs_parenthesized: bool, rhs: ast.Expr) -> ast.Expr:
    """Multiplication iff lhs is a bare numeric literal or a parenthesized
    expression whose top node is an operator; otherwise application."""
    if isinstance(lhs, NatLit) and not lhs_parenthesized:
        return BinOp("*", lhs, rhs)
    if lhs_parenthesized and isinstance(lhs, (BinOp, UnOp)):
        return BinOp("*", lhs, rhs)
    return App(lhs, rhs)


def _starts_primary(tok: Token | None) -> bool:
    if tok is None:
        return False
    if tok.kind in _JUXT_START_KINDS:
        return True
    if tok.kind == "keyword" and tok.text in _JUXT_START_KEYWORDS:
        return True
    if tok.kind == "delim" and tok.text in _JUXT_START_DELIMS:
        return True
    return False


class ExprParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts

    # -- entry points -------------------------------------------------------

    def expression(self, min_prec: int = 0) -> ast.Expr:
        expr, _ = self._expression_tracked(min_prec)
        return expr

    def _expression_tracked(self, min_prec: int) -> tuple[ast.Expr, bool]:
        left, parenthesized = self.primary()
        while True:
            tok = self.ts.peek()
            if tok is None:
                break
            if tok.kind == "op" and tok.text in BINOPS:
                info = BINOPS[tok.text]
                if info.prec < min_prec:
                    break
                self.ts.next()
                next_min = info.prec + 1 if info.assoc in ("left", "none") else info.prec
                right = self.expression(next_min)
                left = BinOp(info.canon, left, right)
                parenthesized = False
                if info.assoc == "none" and self.ts.at("op"):
                    follow = self.ts.peek()
                    if follow.text in BINOPS and BINOPS[follow.text].prec == info.prec:
                        raise ParseError(
                            f"operator {follow.text!r} is non-associative and cannot be chained.",
                            follow.span,
                        )
                continue
            if _starts_primary(tok) and PREC_APP >= min_prec:
                right = self.expression(PREC_APP + 1)
                left = resolve_juxtaposition(left, parenthesized, right)
                parenthesized = False
                continue
            break
        return left, parenthesized

    # -- primaries ----------------------------------------------------------

    def primary(self) -> tuple[ast.Expr, bool]:
        tok = self.ts.peek()
        if tok is None:
            raise ParseError("unexpected end of input.")
        if tok.kind == "nat":
            self.ts.next()
            return NatLit(int(tok.text)), False
        if tok.kind == "char":
            self.ts.next()
            return CharLit(tok.text), False
        if tok.kind == "string":
            self.ts.next()
            return StrLit(tok.text), False
        if tok.kind == "section":
            self.ts.next()
            return Section(tok.text), False
        if tok.kind == "ident":
            self.ts.next()
            return Var(tok.text), False
        if tok.kind == "keyword":
            return self.keyword_primary(tok)
        if tok.kind == "op" and tok.text in ("union", "intersect"):
            # prefix position: the named form of the set operation
            self.ts.next()
            return Var(tok.text), False
        if tok.kind == "op" and tok.text == "-":
            self.ts.next()
            operand = self.expression(PREC_NEG)
            return UnOp("neg", operand), False
        if tok.kind == "op" and tok.text == "not":
            self.ts.next()
            operand = self.expression(PREC_NOT)
            return UnOp("not", operand), False
        if tok.kind == "delim":
            return self.delim_primary(tok)
        raise ParseError(f"unexpected token {tok.text!r}.", tok.span)

    def keyword_primary(self, tok: Token) -> tuple[ast.Expr, bool]:
        if tok.text == "true":
            self.ts.next()
            return BoolLit(True), False
        if tok.text == "false":
            self.ts.next()
            return BoolLit(False), False
        if tok.text == "unit":
            self.ts.next()
            return UnitLit(), False
        if tok.text == "let":
            return self.let_expr(), False
        if tok.text in ("forall", "exists"):
            return self.quantifier(tok.text), False
        raise ParseError(f"unexpected keyword {tok.text!r}.", tok.span)

    def delim_primary(self, tok: Token) -> tuple[ast.Expr, bool]:
        if tok.text == "(":
            self.ts.next()
            items = [self.expression()]
            while self.ts.at("delim", ","):
                self.ts.next()
                items.append(self.expression())
            self.ts.expect("delim", ")")
            if len(items) == 1:
                return items[0], True
            return Tuple(items), True
        if tok.text == "[":
            return self.container("list", "[", "]"), False
        if tok.text == "{":
            return self.container("set", "{", "}"), False
        if tok.text == "{?":
            return self.case_expr(), False
        if tok.text == "|":
            self.ts.next()
            operand = self.expression()
            self.ts.expect("delim", "|")
            return AbsOrCard(operand), False
        if tok.text == "\\":
            self.ts.next()
            name = self.ts.expect("ident").text
            self.ts.expect("delim", ".")
            body = self.expression()
            return Lambda(name, body), False
        raise ParseError(f"unexpected token {tok.text!r}.", tok.span)

    def let_expr(self) -> ast.Expr:
        self.ts.expect("keyword", "let")
        bindings = [self.let_binding()]
        while self.ts.at("delim", ","):
            self.ts.next()
            bindings.append(self.let_binding())
        self.ts.expect("keyword", "in")
        body = self.expression()
        return Let(bindings, body)

    def let_binding(self) -> tuple[str, ast.Expr]:
        name = self.ts.expect("ident").text
        self.ts.expect("delim", "=")
        return name, self.expression()

    def quantifier(self, which: str) -> ast.Expr:
        self.ts.expect("keyword", which)
        binders = [self.binder()]
        while self.ts.at("delim", ","):
            self.ts.next()
            binders.append(self.binder())
        self.ts.expect("delim", ".")
        body = self.expression()
        cls = Forall if which == "forall" else Exists
        return cls(binders, body)

    def binder(self) -> tuple[str, Type]:
        name = self.ts.expect("ident").text
        self.ts.expect("delim", ":")
        ty = TypeParser(self.ts).type_expr()
        return name, ty

    def container(self, kind: str, open_d: str, close_d: str) -> ast.Expr:
        self.ts.expect("delim", open_d)
        if self.ts.at("delim", close_d):
            self.ts.next()
            return ContainerLit(kind, [])
        first = self.expression()
        if self.ts.at("delim", "|"):
            self.ts.next()
            quals = [self.comp_qual()]
            while self.ts.at("delim", ","):
                self.ts.next()
                quals.append(self.comp_qual())
            self.ts.expect("delim", close_d)
            return Comprehension(kind, first, quals)
        items = [first]
        while self.ts.at("delim", ","):
            self.ts.next()
            items.append(self.expression())
        if self.ts.at("delim", ".."):
            self.ts.next()
            last = self.expression()
            self.ts.expect("delim", close_d)
            if len(items) == 1:
                return EllipsisLit(kind, items[0], None, last)
            if len(items) == 2:
                return EllipsisLit(kind, items[0], items[1], last)
            raise ParseError("ellipsis notation takes one or two leading elements.")
        self.ts.expect("delim", close_d)
        return ContainerLit(kind, items)

    def comp_qual(self) -> ast.Qualifier:
        if self.ts.at("keyword", "let"):
            self.ts.next()
            name = self.ts.expect("ident").text
            self.ts.expect("delim", "=")
            return LetQual(name, self.expression())
        expr = self.expression()
        if self.ts.at("keyword", "in"):
            self.ts.next()
            if not isinstance(expr, Var):
                raise ParseError("a comprehension generator binds a single variable.")
            return Generator(expr.name, self.expression())
        return Filter(expr)

    def case_expr(self) -> ast.Expr:
        self.ts.expect("delim", "{?")
        branches = [self.case_branch()]
        while self.ts.at("delim", ","):
            self.ts.next()
            branches.append(self.case_branch())
        self.ts.expect("delim", "?}")
        return Case(branches)

    def case_branch(self) -> CaseBranch:
        body = self.expression()
        guards: list[ast.Guard] = []
        while True:
            if self.ts.at("keyword", "if"):
                self.ts.next()
                cond = self.expression()
                if self.ts.at("keyword", "is"):
                    self.ts.next()
                    pat_expr = self.expression(BINOPS["=="].prec + 1)
                    guards.append(GPat(cond, expr_to_pattern(pat_expr)))
                else:
                    guards.append(GBool(cond))
                continue
            if self.ts.at("keyword", "otherwise"):
                self.ts.next()
                guards.append(GOtherwise())
                continue
            break
        return CaseBranch(body, guards)


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

def expr_to_pattern(e: ast.Expr) -> ast.Pattern:
    """Reinterpret a parsed expression as a pattern."""
    if isinstance(e, Var):
        return PWild() if e.name == "_" else PVar(e.name)
    if isinstance(e, NatLit):
        return PNat(e.value)
    if isinstance(e, CharLit):
        return PChar(e.value)
    if isinstance(e, BoolLit):
        return PBool(e.value)
    if isinstance(e, UnitLit):
        return PUnit()
    if isinstance(e, Tuple):
        return PTuple([expr_to_pattern(item) for item in e.items])
    if isinstance(e, App) and isinstance(e.fn, Var) and e.fn.name in ("left", "right"):
        return PInj(e.fn.name, expr_to_pattern(e.arg))
    if isinstance(e, (BinOp, UnOp)):
        return _arith_pattern(e)
    raise ParseError("this expression cannot be used as a pattern.")


def _arith_pattern(e: ast.Expr) -> ast.Pattern:
    var, coeff, offset = _linear(e)
    if var is None:
        if coeff == 0 and offset.denominator == 1 and offset >= 0:
            return PNat(int(offset))
        raise ParseError("a constant pattern must be a natural number.")
    if coeff == 0:
        raise ParseError(f"pattern does not determine {var}: its coefficient is zero.")
    if coeff == 1 and offset == 0:
        return PVar(var)
    return PArith(var, coeff, offset, e)


def _linear(e: ast.Expr) -> tuple[str | None, Fraction, Fraction]:
    """Decompose a one-variable linear pattern expression into
    coeff * var + offset."""
    if isinstance(e, NatLit):
        return None, Fraction(0), Fraction(e.value)
    if isinstance(e, Var):
        return e.name, Fraction(1), Fraction(0)
    if isinstance(e, UnOp) and e.op == "neg":
        var, a, b = _linear(e.operand)
        return var, -a, -b
    if isinstance(e, BinOp) and e.op in ("+", "-"):
        lv, la, lb = _linear(e.left)
        rv, ra, rb = _linear(e.right)
        if lv is not None and rv is not None and lv != rv:
            raise ParseError("an arithmetic pattern contains exactly one variable.")
        var = lv if lv is not None else rv
        sign = 1 if e.op == "+" else -1
        return var, la + sign * ra, lb + sign * rb
    if isinstance(e, BinOp) and e.op == "*":
        lv, la, lb = _linear(e.left)
        rv, ra, rb = _linear(e.right)
        if lv is None:
            return rv, lb * ra, lb * rb
        if rv is None:
            return lv, la * rb, lb * rb
        raise ParseError("arithmetic patterns must be linear.")
    if isinstance(e, BinOp) and e.op == "/":
        lv, la, lb = _linear(e.left)
        rv, ra, rb = _linear(e.right)
        if rv is not None:
            raise ParseError("arithmetic patterns may only divide by a constant.")
        if rb == 0:
            raise ParseError("arithmetic patterns cannot divide by zero.")
        return lv, la / rb, lb / rb
    raise ParseError("arithmetic patterns use only +, -, *, and / with one variable.")


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

_CONTAINER_TYPES = {"List": TList, "Bag": TBag, "Set": TSet}


class TypeParser:
    def __init__(self, ts: TokenStream):
        self.ts = ts

    def type_expr(self) -> Type:
        return self.arrow_type()

    def arrow_type(self) -> Type:
        left = self.sum_type()
        if self.ts.at("op", "->"):
            self.ts.next()
            return TArrow(left, self.arrow_type())
        return left

    def sum_type(self) -> Type:
        left = self.prod_type()
        if self.ts.at("op", "+"):
            self.ts.next()
            return TSum(left, self.sum_type())
        return left

    def prod_type(self) -> Type:
        left = self.atom_type()
        if self.ts.at("op", "*"):
            self.ts.next()
            return TProd(left, self.prod_type())
        return left

    def atom_type(self) -> Type:
        tok = self.ts.peek()
        if tok is None:
            raise ParseError("expected a type but input ended.")
        if tok.kind == "delim" and tok.text == "(":
            self.ts.next()
            inner = self.type_expr()
            self.ts.expect("delim", ")")
            return inner
        if tok.kind == "ident":
            self.ts.next()
            name = tok.text
            if name in _CONTAINER_TYPES:
                self.ts.expect("delim", "(")
                elem = self.type_expr()
                self.ts.expect("delim", ")")
                return _CONTAINER_TYPES[name](elem)
            if name in BASE_TYPE_SPELLINGS:
                from .types import TCon
                return TCon(BASE_TYPE_SPELLINGS[name])
            if name[0].isupper():
                return TSyn(name)
            return TVar(name)
        raise ParseError(f"expected a type but found {tok.text!r}.", tok.span)


# ---------------------------------------------------------------------------
# Declarations and modules
# ---------------------------------------------------------------------------

def parse_module(source: str) -> SurfaceModule:
    """Parse a whole module and attach doc/test lines to the following
    signature-or-definition group. Every definition must have exactly one
    signature somewhere in the module."""
    tokens = tokenize(source)
    blocks = _blockize(tokens)
    decls: list[ast.Decl] = []
    pending_docs: list[str] = []
    pending_tests: list[ast.Expr] = []

    def flush_pending(name: str):
        if pending_docs:
            decls.append(DocLines(name, list(pending_docs)))
            pending_docs.clear()
        for expr in pending_tests:
            decls.append(TestProp(name, expr))
        pending_tests.clear()

    for block in blocks:
        first = block[0]
        if first.kind == "doc":
            pending_docs.append(first.text)
            continue
        if first.kind == "test":
            pending_tests.append(parse_expr_text(first.text))
            continue
        decl = _parse_decl_block(block)
        if isinstance(decl, (TypeSig, DefClause)):
            flush_pending(decl.name)
        elif pending_docs or pending_tests:
            raise ParseError("doc comments and tests must precede a definition.", first.span)
        decls.append(decl)

    if pending_docs or pending_tests:
        raise ParseError("doc comments and tests must precede a definition.")

    _validate_module(decls)
    return SurfaceModule(decls)


def _blockize(tokens: list[Token]) -> list[list[Token]]:
    blocks: list[list[Token]] = []
    current: list[Token] | None = None
    for tok in tokens:
        if tok.kind in ("doc", "test"):
            blocks.append([tok])
            current = None
            continue
        if tok.span[1] == 1:
            current = [tok]
            blocks.append(current)
        else:
            if current is None:
                raise ParseError("unexpected indentation at start of file.", tok.span)
            current.append(tok)
    return blocks


def _parse_decl_block(block: list[Token]) -> ast.Decl:
    ts = TokenStream(block)
    first = ts.peek()
    if first.kind == "keyword" and first.text == "type":
        ts.next()
        name_tok = ts.expect("ident")
        if not name_tok.text[0].isupper():
            raise ParseError("type synonym names begin with an uppercase letter.", name_tok.span)
        ts.expect("delim", "=")
        body = TypeParser(ts).type_expr()
        _expect_block_end(ts)
        return TypeSynonym(name_tok.text, body)
    if first.kind == "keyword" and first.text == "import":
        ts.next()
        name_tok = ts.expect("ident")
        _expect_block_end(ts)
        return Import(name_tok.text)
    if first.kind != "ident":
        raise ParseError(f"expected a declaration but found {first.text!r}.", first.span)
    name = ts.next().text
    if ts.at("delim", ":"):
        ts.next()
        ty = TypeParser(ts).type_expr()
        _expect_block_end(ts)
        return TypeSig(name, ty)
    patterns: list[ast.Pattern] = []
    while ts.at("delim", "("):
        ts.next()
        items = [ExprParser(ts).expression()]
        while ts.at("delim", ","):
            ts.next()
            items.append(ExprParser(ts).expression())
        ts.expect("delim", ")")
        arg_expr = items[0] if len(items) == 1 else Tuple(items)
        patterns.append(expr_to_pattern(arg_expr))
    ts.expect("delim", "=")
    body = ExprParser(ts).expression()
    _expect_block_end(ts)
    return DefClause(name, patterns, body)


def _expect_block_end(ts: TokenStream) -> None:
    tok = ts.peek()
    if tok is not None:
        raise ParseError(f"unexpected token {tok.text!r} after declaration.", tok.span)


def _validate_module(decls: list[ast.Decl]) -> None:
    sigs: dict[str, int] = {}
    for d in decls:
        if isinstance(d, TypeSig):
            sigs[d.name] = sigs.get(d.name, 0) + 1
            if sigs[d.name] > 1:
                raise ParseError(f"{d.name} has more than one type signature.")
    arities: dict[str, int] = {}
    for d in decls:
        if isinstance(d, DefClause):
            if d.name not in sigs:
                raise ParseError(f"missing type signature for {d.name}.")
            if d.name in arities and arities[d.name] != len(d.patterns):
                raise ParseError(f"the clauses of {d.name} have different numbers of arguments.")
            arities[d.name] = len(d.patterns)
    defined = set(arities)
    for name in sigs:
        if name not in defined:
            raise ParseError(f"{name} has a type signature but no definition.")


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def parse_expr_text(text: str) -> ast.Expr:
    ts = TokenStream(tokenize(text))
    expr = ExprParser(ts).expression()
    tok = ts.peek()
    if tok is not None:
        raise ParseError(f"unexpected token {tok.text!r}.", tok.span)
    return expr


def parse_type_text(text: str) -> Type:
    ts = TokenStream(tokenize(text))
    ty = TypeParser(ts).type_expr()
    tok = ts.peek()
    if tok is not None:
        raise ParseError(f"unexpected token {tok.text!r}.", tok.span)
    return ty


_COMMANDS = {"type", "doc", "test", "load", "help", "names", "quit"}


def parse_repl_input(line: str) -> ast.ReplInput:
    """Parse one REPL line: `:command args`, or an expression. Definitions
    are rejected with guidance to use :load."""
    stripped = line.strip()
    if stripped.startswith(":"):
        parts = stripped[1:].split(None, 1)
        if not parts:
            raise ParseError("expected a command after ':'.")
        cmd, rest = parts[0], parts[1] if len(parts) > 1 else ""
        if cmd not in _COMMANDS:
            raise ParseError(f"unknown command :{cmd}.")
        if cmd in ("type", "test"):
            if not rest.strip():
                raise ParseError(f"usage: :{cmd} <expression>.")
            return Command(cmd, parse_expr_text(rest))
        if cmd in ("doc", "load"):
            if not rest.strip():
                raise ParseError(f"usage: :{cmd} <name>.")
            return Command(cmd, rest.strip())
        return Command(cmd, None)
    tokens = tokenize(stripped)
    if (
        len(tokens) >= 2
        and tokens[0].kind == "ident"
        and tokens[1].kind == "delim"
        and tokens[1].text in ("=", ":")
        and not (len(tokens) >= 3 and tokens[1].text == "=" and tokens[2].kind == "delim" and tokens[2].text == "=")
    ):
        raise ParseError("definitions live in files; save this in a .disco file and use :load.")
    ts = TokenStream(tokens)
    expr = ExprParser(ts).expression()
    tok = ts.peek()
    if tok is not None:
        raise ParseError(f"unexpected token {tok.text!r}.", tok.span)
    return expr
