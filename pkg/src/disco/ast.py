"""Surface and core syntax trees.

Multi-clause definitions, guards, comprehensions, and arithmetic patterns
all live here; desugaring rewrites clauses into lambdas over a single case
expression but reuses these same node types, so there is no separate core
tree. Fields marked compare=False are annotations filled in by the type
checker and never affect structural equality (which the parse/pretty
round-trip tests rely on).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union


class Expr:
    pass


class Pattern:
    pass


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass(eq=True)
class Var(Expr):
    name: str


@dataclass(eq=True)
class NatLit(Expr):
    value: int


@dataclass(eq=True)
class CharLit(Expr):
    value: str


@dataclass(eq=True)
class StrLit(Expr):
    value: str


@dataclass(eq=True)
class UnitLit(Expr):
    pass


@dataclass(eq=True)
class BoolLit(Expr):
    value: bool


@dataclass(eq=True)
class Lambda(Expr):
    var: str
    body: Expr


@dataclass(eq=True)
class App(Expr):
    fn: Expr
    arg: Expr


@dataclass(eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(eq=True)
class UnOp(Expr):
    op: str  # 'neg' | 'not'
    operand: Expr


@dataclass(eq=True)
class Tuple(Expr):
    items: list[Expr]


@dataclass(eq=True)
class Let(Expr):
    bindings: list[tuple[str, Expr]]
    body: Expr


class Guard:
    pass


@dataclass(eq=True)
class GBool(Guard):
    cond: Expr


@dataclass(eq=True)
class GPat(Guard):
    scrutinee: Expr
    pattern: Pattern


@dataclass(eq=True)
class GOtherwise(Guard):
    pass


@dataclass(eq=True)
class CaseBranch:
    body: Expr
    guards: list[Guard]


@dataclass(eq=True)
class Case(Expr):
    branches: list[CaseBranch]


class Qualifier:
    pass


@dataclass(eq=True)
class Generator(Qualifier):
    var: str
    source: Expr


@dataclass(eq=True)
class Filter(Qualifier):
    cond: Expr


@dataclass(eq=True)
class LetQual(Qualifier):
    var: str
    expr: Expr


@dataclass(eq=True)
class Comprehension(Expr):
    kind: str  # 'list' | 'bag' | 'set'
    head: Expr
    quals: list[Qualifier]


@dataclass(eq=True)
class EllipsisLit(Expr):
    kind: str
    first: Expr
    second: Optional[Expr]
    last: Expr


@dataclass(eq=True)
class ContainerLit(Expr):
    kind: str
    items: list[Expr]


@dataclass(eq=True)
class AbsOrCard(Expr):
    operand: Expr
    # 'abs' or 'card', decided during type checking; drives the echo.
    resolved: Optional[str] = field(default=None, compare=False)


@dataclass(eq=True)
class Forall(Expr):
    binders: list[tuple[str, object]]  # (name, TypeRep)
    body: Expr


@dataclass(eq=True)
class Exists(Expr):
    binders: list[tuple[str, object]]
    body: Expr


@dataclass(eq=True)
class Section(Expr):
    op: str


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

@dataclass(eq=True)
class PVar(Pattern):
    name: str


@dataclass(eq=True)
class PWild(Pattern):
    pass


@dataclass(eq=True)
class PUnit(Pattern):
    pass


@dataclass(eq=True)
class PBool(Pattern):
    value: bool


@dataclass(eq=True)
class PNat(Pattern):
    value: int


@dataclass(eq=True)
class PChar(Pattern):
    value: str


@dataclass(eq=True)
class PTuple(Pattern):
    items: list[Pattern]


@dataclass(eq=True)
class PInj(Pattern):
    side: str  # 'left' | 'right'
    pattern: Pattern


@dataclass(eq=True)
class PArith(Pattern):
    """Linear arithmetic pattern: matches v when (v - offset) / coeff
    inhabits the variable's type."""

    var: str
    coeff: Fraction
    offset: Fraction
    src: Expr  # the expression as written, for display
    var_type: object = field(default=None, compare=False)  # filled by the checker


# ---------------------------------------------------------------------------
# Declarations and modules
# ---------------------------------------------------------------------------

class Decl:
    pass


@dataclass(eq=True)
class TypeSig(Decl):
    name: str
    type: object  # TypeRep


@dataclass(eq=True)
class DefClause(Decl):
    name: str
    patterns: list[Pattern]  # one per argument group; empty for plain values
    body: Expr


@dataclass(eq=True)
class TypeSynonym(Decl):
    name: str
    type: object


@dataclass(eq=True)
class Import(Decl):
    name: str


@dataclass(eq=True)
class DocLines(Decl):
    name: str
    lines: list[str]


@dataclass(eq=True)
class TestProp(Decl):
    name: str
    expr: Expr


@dataclass(eq=True)
class SurfaceModule:
    decls: list[Decl]


ReplInput = Union["Command", Expr]


@dataclass(eq=True)
class Command:
    name: str
    arg: object  # Expr, str, or None depending on the command
