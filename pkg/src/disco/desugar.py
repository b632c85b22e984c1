"""Desugaring: multi-clause definitions become one lambda per argument
group over a single case expression; operator sections become curried
lambdas; ellipsis notation expands to concrete elements.

Clause order is preserved, and each clause contributes one branch whose
guard chain matches every argument pattern in turn.
"""

from __future__ import annotations

from fractions import Fraction

from .ast import (
    AbsOrCard, App, BinOp, Case, CaseBranch, Comprehension, ContainerLit,
    DefClause, EllipsisLit, Exists, Expr, Filter, Forall, GBool, Generator,
    GPat, Lambda, Let, LetQual, PVar, Tuple, UnOp, Var,
)
from .errors import ArityMismatch, ZeroStride


def desugar_definition(name: str, clauses: list[DefClause]) -> Expr:
    """Build the clause-free body for a definition.

    Multiple clauses (or refutable patterns) produce fresh argument
    variables and a case expression; a single clause over plain variables
    elides the pattern guards entirely.
    """
    arities = {len(c.patterns) for c in clauses}
    if len(arities) != 1:
        raise ArityMismatch(f"the clauses of {name} have different numbers of arguments.")
    arity = arities.pop()
    if arity == 0:
        if len(clauses) != 1:
            raise ArityMismatch(f"{name} has multiple clauses but no arguments to match on.")
        return clauses[0].body

    only = clauses[0]
    if len(clauses) == 1 and all(isinstance(p, PVar) for p in only.patterns):
        body = only.body
        for p in reversed(only.patterns):
            body = Lambda(p.name, body)
        return body

    used = set()
    for c in clauses:
        _collect_names(c.body, used)
        for p in c.patterns:
            _collect_pattern_names(p, used)
    params = _fresh_params(arity, used)

    branches = []
    for c in clauses:
        guards = [GPat(Var(param), pat) for param, pat in zip(params, c.patterns)]
        branches.append(CaseBranch(c.body, guards))
    body: Expr = Case(branches)
    for param in reversed(params):
        body = Lambda(param, body)
    return body


def _fresh_params(arity: int, used: set[str]) -> list[str]:
    names = []
    for i in range(arity):
        base = "p" if arity == 1 else f"p{i + 1}"
        candidate = base
        while candidate in used or candidate in names:
            candidate += "'"
        names.append(candidate)
    return names


def desugar_section(op: str, used: set[str] | None = None) -> Lambda:
    """`~op~` is the curried standalone function of a binary operator."""
    used = used or set()
    x, y = "x", "y"
    while x in used:
        x += "'"
    while y in used or y == x:
        y += "'"
    return Lambda(x, Lambda(y, BinOp(op, Var(x), Var(y))))


def expand_ellipsis(first: Fraction, second: Fraction | None, last: Fraction) -> list[Fraction]:
    """Elements first, first+d, ... up to (not passing) last.

    The stride is second - first when given, else 1, or -1 for a
    descending range written without a second element.
    """
    if second is not None:
        stride = second - first
    elif last < first:
        stride = Fraction(-1)
    else:
        stride = Fraction(1)
    if stride == 0:
        if first == last:
            return [first]
        raise ZeroStride("ellipsis stride is zero but the endpoints differ.")
    out = []
    x = first
    if stride > 0:
        while x <= last:
            out.append(x)
            x += stride
    else:
        while x >= last:
            out.append(x)
            x += stride
    return out


# ---------------------------------------------------------------------------
# Name collection (for fresh-variable hygiene)
# ---------------------------------------------------------------------------

def _collect_names(e, out: set[str]) -> None:
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Lambda):
        out.add(e.var)
        _collect_names(e.body, out)
    elif isinstance(e, App):
        _collect_names(e.fn, out)
        _collect_names(e.arg, out)
    elif isinstance(e, BinOp):
        _collect_names(e.left, out)
        _collect_names(e.right, out)
    elif isinstance(e, UnOp):
        _collect_names(e.operand, out)
    elif isinstance(e, Tuple):
        for item in e.items:
            _collect_names(item, out)
    elif isinstance(e, Let):
        for n, v in e.bindings:
            out.add(n)
            _collect_names(v, out)
        _collect_names(e.body, out)
    elif isinstance(e, Case):
        for b in e.branches:
            _collect_names(b.body, out)
            for g in b.guards:
                if isinstance(g, GBool):
                    _collect_names(g.cond, out)
                elif isinstance(g, GPat):
                    _collect_names(g.scrutinee, out)
                    _collect_pattern_names(g.pattern, out)
    elif isinstance(e, Comprehension):
        _collect_names(e.head, out)
        for q in e.quals:
            if isinstance(q, Generator):
                out.add(q.var)
                _collect_names(q.source, out)
            elif isinstance(q, Filter):
                _collect_names(q.cond, out)
            elif isinstance(q, LetQual):
                out.add(q.var)
                _collect_names(q.expr, out)
    elif isinstance(e, EllipsisLit):
        _collect_names(e.first, out)
        if e.second is not None:
            _collect_names(e.second, out)
        _collect_names(e.last, out)
    elif isinstance(e, ContainerLit):
        for item in e.items:
            _collect_names(item, out)
    elif isinstance(e, AbsOrCard):
        _collect_names(e.operand, out)
    elif isinstance(e, (Forall, Exists)):
        for n, _ in e.binders:
            out.add(n)
        _collect_names(e.body, out)


def _collect_pattern_names(p, out: set[str]) -> None:
    from .ast import PArith, PInj, PTuple

    if isinstance(p, PVar):
        out.add(p.name)
    elif isinstance(p, PTuple):
        for item in p.items:
            _collect_pattern_names(item, out)
    elif isinstance(p, PInj):
        _collect_pattern_names(p.pattern, out)
    elif isinstance(p, PArith):
        out.add(p.var)
