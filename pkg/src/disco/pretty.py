"""Pretty-printing of expressions, types, patterns, and runtime values.

Unicode spellings by default (ℕ, →, ×, λ, ∀); ASCII mode swaps them out.
Logical connectives print in their ASCII forms (/\\, \\/, ==>) in both
modes. Expression output reparses to an equal tree.
"""

from __future__ import annotations

import sys
from fractions import Fraction

from . import ast
from .ast import (
    AbsOrCard, App, BinOp, BoolLit, Case, CharLit, Comprehension,
    ContainerLit, EllipsisLit, Exists, Filter, Forall, GBool, Generator,
    GOtherwise, GPat, Lambda, Let, LetQual, NatLit, PArith, PBool, PChar,
    PInj, PNat, PTuple, PUnit, PVar, PWild, Section, StrLit, Tuple, UnitLit,
    UnOp, Var,
)
from .ops import BINOPS, PREC_APP, PREC_NEG, PREC_NOT
from .types import (
    TArrow, TBag, TCon, TList, TProd, TSet, TSkolem, TSum, TSyn, TVar, Type,
)
from .values import BuiltinV, ClosureV, CollV, InjV, PropV, _Unit

_UNI_BASE = {"N": "ℕ", "Z": "ℤ", "F": "𝔽", "Q": "ℚ", "Bool": "Bool",
             "Char": "Char", "Unit": "Unit", "Prop": "Prop"}
_ASCII_BASE = {"N": "N", "Z": "Z", "F": "F", "Q": "Q", "Bool": "Bool",
               "Char": "Char", "Unit": "Unit", "Prop": "Prop"}

_CHAR_ESCAPES = {"\n": "\\n", "\t": "\\t", "\r": "\\r", "\\": "\\\\", "\0": "\\0"}

# Rendering a multi-thousand-digit integer is quadratic in CPython and
# also trips the interpreter's int->str digit limit; beyond this many
# digits the display abbreviates (the value itself stays exact).
_MAX_DIGITS = 20_000

if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(max(sys.get_int_max_str_digits(), _MAX_DIGITS + 2))


def _int_str(n: int) -> str:
    digits = int(n.bit_length() * 0.30103) + 1
    if digits > _MAX_DIGITS:
        sign = "-" if n < 0 else ""
        return f"<{sign}integer with about {digits} digits>"
    try:
        return str(n)
    except ValueError:  # int_max_str_digits guard, if configured lower
        sign = "-" if n < 0 else ""
        return f"<{sign}integer with about {digits} digits>"


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def pretty_type(t: Type, unicode: bool = True) -> str:
    return _ty(t, 0, unicode)


def _ty(t: Type, prec: int, uni: bool) -> str:
    if isinstance(t, TCon):
        return (_UNI_BASE if uni else _ASCII_BASE)[t.name]
    if isinstance(t, (TVar, TSkolem)):
        return t.name
    if isinstance(t, TSyn):
        return t.name
    if isinstance(t, TArrow):
        arrow = " → " if uni else " -> "
        s = _ty(t.dom, 2, uni) + arrow + _ty(t.cod, 1, uni)
        return f"({s})" if prec > 1 else s
    if isinstance(t, TSum):
        s = _ty(t.left, 3, uni) + " + " + _ty(t.right, 2, uni)
        return f"({s})" if prec > 2 else s
    if isinstance(t, TProd):
        times = " × " if uni else " * "
        s = _ty(t.left, 4, uni) + times + _ty(t.right, 3, uni)
        return f"({s})" if prec > 3 else s
    if isinstance(t, TList):
        return f"List({_ty(t.elem, 0, uni)})"
    if isinstance(t, TBag):
        return f"Bag({_ty(t.elem, 0, uni)})"
    if isinstance(t, TSet):
        return f"Set({_ty(t.elem, 0, uni)})"
    raise TypeError(f"unprintable type {t!r}")


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

def pretty_expr(e: ast.Expr, unicode: bool = True) -> str:
    return _ex(e, 0, unicode)


def _char_lit(c: str) -> str:
    if c in _CHAR_ESCAPES:
        return f"'{_CHAR_ESCAPES[c]}'"
    if c == "'":
        return "'\\''"
    return f"'{c}'"


def _str_lit(s: str) -> str:
    out = []
    for c in s:
        if c in _CHAR_ESCAPES:
            out.append(_CHAR_ESCAPES[c])
        elif c == '"':
            out.append('\\"')
        else:
            out.append(c)
    return '"' + "".join(out) + '"'


def _ex(e: ast.Expr, prec: int, uni: bool) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, NatLit):
        return str(e.value)
    if isinstance(e, BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, UnitLit):
        return "unit"
    if isinstance(e, CharLit):
        return _char_lit(e.value)
    if isinstance(e, StrLit):
        return _str_lit(e.value)
    if isinstance(e, Section):
        return f"~{BINOPS[e.op].show}~"
    if isinstance(e, BinOp):
        info = BINOPS[e.op]
        lp = info.prec if info.assoc == "left" else info.prec + 1
        rp = info.prec + 1 if info.assoc in ("left", "none") else info.prec
        joint = info.show if e.op == "^" else f" {info.show} "
        s = _ex(e.left, lp, uni) + joint + _ex(e.right, rp, uni)
        return f"({s})" if info.prec < prec else s
    if isinstance(e, UnOp):
        if e.op == "neg":
            inner = _ex(e.operand, PREC_NEG, uni)
            if inner.startswith("-"):
                inner = f"({inner})"  # avoid '--', which reads as a comment
            s = "-" + inner
            return f"({s})" if PREC_NEG < prec else s
        s = "not " + _ex(e.operand, PREC_NOT, uni)
        return f"({s})" if PREC_NOT < prec else s
    if isinstance(e, App):
        fn = _ex(e.fn, PREC_APP, uni)
        if not isinstance(e.fn, (Var, App)):
            fn = f"({_ex(e.fn, 0, uni)})"
        if isinstance(e.arg, Tuple):
            arg = ", ".join(_ex(item, 0, uni) for item in e.arg.items)
        else:
            arg = _ex(e.arg, 0, uni)
        return f"{fn}({arg})"
    if isinstance(e, Tuple):
        return "(" + ", ".join(_ex(item, 0, uni) for item in e.items) + ")"
    if isinstance(e, Lambda):
        lam = "λ" if uni else "\\"
        s = f"{lam}{e.var}. {_ex(e.body, 0, uni)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, Let):
        binds = ", ".join(f"{n} = {_ex(v, 0, uni)}" for n, v in e.bindings)
        s = f"let {binds} in {_ex(e.body, 0, uni)}"
        return f"({s})" if prec > 0 else s
    if isinstance(e, Case):
        branches = ", ".join(_branch(b, uni) for b in e.branches)
        return "{? " + branches + " ?}"
    if isinstance(e, Comprehension):
        op, cl = ("[", "]") if e.kind == "list" else ("{", "}")
        quals = ", ".join(_qual(q, uni) for q in e.quals)
        body = f"{_ex(e.head, 0, uni)} | {quals}"
        if e.kind == "bag":
            return f"bag([{body}])"
        return f"{op}{body}{cl}"
    if isinstance(e, EllipsisLit):
        op, cl = ("[", "]") if e.kind == "list" else ("{", "}")
        head = _ex(e.first, 0, uni)
        if e.second is not None:
            head += f", {_ex(e.second, 0, uni)}"
        return f"{op}{head} .. {_ex(e.last, 0, uni)}{cl}"
    if isinstance(e, ContainerLit):
        items = ", ".join(_ex(item, 0, uni) for item in e.items)
        if e.kind == "list":
            return f"[{items}]"
        if e.kind == "set":
            return "{" + items + "}"
        return f"bag([{items}])"
    if isinstance(e, AbsOrCard):
        if e.resolved == "abs":
            return f"abs({_ex(e.operand, 0, uni)})"
        return f"|{_ex(e.operand, 0, uni)}|"
    if isinstance(e, (Forall, Exists)):
        sym = ("∀" if uni else "forall ") if isinstance(e, Forall) else ("∃" if uni else "exists ")
        binds = ", ".join(f"{n} : {pretty_type(t, uni)}" for n, t in e.binders)
        s = f"{sym}{binds}. {_ex(e.body, 0, uni)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f"unprintable expression {e!r}")


def _branch(b: ast.CaseBranch, uni: bool) -> str:
    parts = [_ex(b.body, 0, uni)]
    for g in b.guards:
        if isinstance(g, GBool):
            parts.append(f"if {_ex(g.cond, 0, uni)}")
        elif isinstance(g, GPat):
            parts.append(f"if {_ex(g.scrutinee, 0, uni)} is {pretty_pattern(g.pattern, uni)}")
        elif isinstance(g, GOtherwise):
            parts.append("otherwise")
    return " ".join(parts)


def _qual(q: ast.Qualifier, uni: bool) -> str:
    if isinstance(q, Generator):
        return f"{q.var} in {_ex(q.source, 0, uni)}"
    if isinstance(q, Filter):
        return _ex(q.cond, 0, uni)
    if isinstance(q, LetQual):
        return f"let {q.var} = {_ex(q.expr, 0, uni)}"
    raise TypeError(f"unprintable qualifier {q!r}")


def pretty_pattern(p: ast.Pattern, unicode: bool = True) -> str:
    if isinstance(p, PVar):
        return p.name
    if isinstance(p, PWild):
        return "_"
    if isinstance(p, PUnit):
        return "unit"
    if isinstance(p, PBool):
        return "true" if p.value else "false"
    if isinstance(p, PNat):
        return str(p.value)
    if isinstance(p, PChar):
        return _char_lit(p.value)
    if isinstance(p, PTuple):
        return "(" + ", ".join(pretty_pattern(item, unicode) for item in p.items) + ")"
    if isinstance(p, PInj):
        inner = p.pattern
        if isinstance(inner, PTuple):
            body = ", ".join(pretty_pattern(item, unicode) for item in inner.items)
        else:
            body = pretty_pattern(inner, unicode)
        return f"{p.side}({body})"
    if isinstance(p, PArith):
        return pretty_expr(p.src, unicode)
    raise TypeError(f"unprintable pattern {p!r}")


def quantifier_echo(kind: str, binder_names: list[str], body: ast.Expr, unicode: bool = True) -> str:
    """Test-report echo of a quantified property; binder types elided."""
    sym = ("∀" if unicode else "forall ") if kind == "forall" else ("∃" if unicode else "exists ")
    return f"{sym}{', '.join(binder_names)}. {pretty_expr(body, unicode)}"


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------

def render_value(v, ty: Type | None = None, synenv=None, unicode: bool = True) -> str:
    """Render a runtime value, using the type (when known) to print
    List(Char) values as string literals."""

    def expand(t):
        if t is None or synenv is None:
            return t
        try:
            return synenv.expand_head(t)
        except Exception:
            return t

    def go(v, t):
        t = expand(t)
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, Fraction):
            if v.denominator == 1:
                return _int_str(v.numerator)
            return f"{_int_str(v.numerator)}/{_int_str(v.denominator)}"
        if isinstance(v, str):
            return _char_lit(v)
        if isinstance(v, _Unit):
            return "unit"
        if isinstance(v, tuple):
            parts, t2, spine = [], t, v
            while isinstance(spine, tuple):
                lt = t2.left if isinstance(t2, TProd) else None
                parts.append(go(spine[0], lt))
                t2 = expand(t2.right) if isinstance(t2, TProd) else None
                spine = spine[1]
            parts.append(go(spine, t2))
            return "(" + ", ".join(parts) + ")"
        if isinstance(v, InjV):
            side_ty = None
            if isinstance(t, TSum):
                side_ty = t.left if v.side == "left" else t.right
            payload = v.value
            if isinstance(payload, tuple):
                inner = go(payload, side_ty)
                return f"{v.side}{inner}"
            return f"{v.side}({go(payload, side_ty)})"
        if isinstance(v, CollV):
            elem_ty = t.elem if isinstance(t, (TList, TBag, TSet)) else None
            if v.kind == "list" and _is_string(v, elem_ty, expand):
                return _str_lit("".join(v.expanded()))
            if v.kind == "list":
                return "[" + ", ".join(go(x, elem_ty) for x in v.expanded()) + "]"
            if v.kind == "set":
                return "{" + ", ".join(go(x, elem_ty) for x, _ in v.items) + "}"
            parts = []
            for x, n in v.items:
                s = go(x, elem_ty)
                parts.append(s if n == 1 else f"{s} # {n}")
            if unicode:
                return "⟅" + ", ".join(parts) + "⟆"
            return "bag([" + ", ".join(parts) + "])"
        if isinstance(v, (ClosureV, BuiltinV)):
            return "<function>"
        if isinstance(v, PropV):
            return "<prop>"
        raise TypeError(f"unprintable value {v!r}")

    return go(v, ty)


def _is_string(v: CollV, elem_ty, expand) -> bool:
    t = expand(elem_ty)
    if t is not None:
        return isinstance(t, TCon) and t.name == "Char"
    return bool(v.items) and all(isinstance(x, str) for x, _ in v.items)
