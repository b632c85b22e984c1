"""Strict, pure evaluator over desugared core terms.

Call-by-value; case branches try top to bottom with guard chains left to
right; arithmetic is exact; collections canonicalize on construction.
Module globals are immutable after load, so recursion is plain name
lookup; zero-argument definitions are memoized thunks.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .ast import (
    AbsOrCard, App, BinOp, BoolLit, Case, CharLit, Comprehension,
    ContainerLit, EllipsisLit, Exists, Filter, Forall, GBool, Generator,
    GOtherwise, Lambda, Let, LetQual, NatLit, PArith, PBool, PChar,
    PInj, PNat, PTuple, PUnit, PVar, PWild, Section, StrLit, Tuple, UnitLit,
    UnOp, Var,
)
from .desugar import desugar_section, expand_ellipsis
from .errors import (
    DivisionByZero, EvalTimeout, NonExhaustiveMatch, RecursionLimit,
    ResourceLimit, UnboundVariable,
)

#: Caps keeping single operations within classroom scale; the wall-clock
#: deadline cannot interrupt one giant arithmetic step, so these refuse it.
_MAX_RANGE_ELEMENTS = 1_000_000
_MAX_EXPONENT = 10_000_000


def _guard_range_size(first, second, last) -> None:
    stride = (second - first) if second is not None else (Fraction(-1) if last < first else Fraction(1))
    if stride == 0:
        return  # expand_ellipsis reports zero strides itself
    count = (last - first) / stride
    if count >= _MAX_RANGE_ELEMENTS:
        raise ResourceLimit(
            f"this range would contain more than {_MAX_RANGE_ELEMENTS} elements."
        )
from .values import (
    UNIT, BuiltinV, ClosureV, CollV, InjV, PropV, canonical_compare,
    make_coll, make_list,
)


class Env:
    """Lexical frames over immutable module globals."""

    __slots__ = ("frame", "parent")

    def __init__(self, frame: dict[str, Any], parent: Optional["Env"] = None):
        self.frame = frame
        self.parent = parent

    def child(self, frame: dict[str, Any]) -> "Env":
        return Env(frame, self)

    def lookup(self, name: str):
        env = self
        while env is not None:
            if name in env.frame:
                return env.frame[name]
            env = env.parent
        return _MISSING


_MISSING = object()


@dataclass
class Thunk:
    expr: Any
    forcing: bool = False
    value: Any = _MISSING


@dataclass
class EvalServices:
    recursion_limit: int = 100_000
    deadline: float | None = None
    warn: Callable[[str], None] | None = None


class Interpreter:
    def __init__(self, globals_: dict[str, Any], services: EvalServices | None = None):
        self.globals = globals_
        self.services = services or EvalServices()
        self.depth = 0
        self._steps = 0

    # -- entry ----------------------------------------------------------------

    def run(self, e, env: Env | None = None):
        try:
            return self.eval(env or Env({}), e)
        except RecursionError:
            raise RecursionLimit(
                f"recursion depth limit ({self.services.recursion_limit}) exceeded."
            ) from None

    # -- evaluation -------------------------------------------------------------

    def check_deadline(self) -> None:
        """Long-running builtins poll this so the wall-clock budget holds
        even without intervening eval steps."""
        self._steps += 1
        if self._steps % 1024 == 0 and self.services.deadline is not None:
            if time.monotonic() > self.services.deadline:
                raise EvalTimeout("evaluation took too long and was stopped.")

    def eval(self, env: Env, e):
        self.check_deadline()
        if isinstance(e, Var):
            v = env.lookup(e.name)
            if v is _MISSING:
                v = self.globals.get(e.name, _MISSING)
            if v is _MISSING:
                raise UnboundVariable(e.name)
            if isinstance(v, Thunk):
                return self.force(v, e.name)
            return v
        if isinstance(e, NatLit):
            return Fraction(e.value)
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, CharLit):
            return e.value
        if isinstance(e, StrLit):
            return make_list(list(e.value))
        if isinstance(e, UnitLit):
            return UNIT
        if isinstance(e, Lambda):
            return ClosureV(e.var, e.body, env)
        if isinstance(e, Section):
            return self.eval(env, desugar_section(e.op))
        if isinstance(e, App):
            fn = self.eval(env, e.fn)
            arg = self.eval(env, e.arg)
            return self.apply(fn, arg)
        if isinstance(e, BinOp):
            return self.eval_binop(env, e)
        if isinstance(e, UnOp):
            if e.op == "neg":
                return -self.eval(env, e.operand)
            return not self.eval(env, e.operand)
        if isinstance(e, Tuple):
            vals = [self.eval(env, item) for item in e.items]
            out = vals[-1]
            for v in reversed(vals[:-1]):
                out = (v, out)
            return out
        if isinstance(e, Let):
            frame: dict[str, Any] = {}
            inner = env.child(frame)
            for name, rhs in e.bindings:
                frame[name] = self.eval(inner, rhs)
            return self.eval(inner, e.body)
        if isinstance(e, Case):
            return self.eval_case(env, e)
        if isinstance(e, Comprehension):
            out: list = []
            self._comp(env, e.quals, e.head, out)
            return make_coll(e.kind, out)
        if isinstance(e, EllipsisLit):
            first = self.eval(env, e.first)
            second = self.eval(env, e.second) if e.second is not None else None
            last = self.eval(env, e.last)
            _guard_range_size(first, second, last)
            return make_coll(e.kind, expand_ellipsis(first, second, last))
        if isinstance(e, ContainerLit):
            return make_coll(e.kind, [self.eval(env, item) for item in e.items])
        if isinstance(e, AbsOrCard):
            v = self.eval(env, e.operand)
            if e.resolved == "card" or (e.resolved is None and isinstance(v, CollV)):
                return Fraction(v.size())
            return abs(v)
        if isinstance(e, Forall):
            return PropV("forall", e.binders, e.body, env)
        if isinstance(e, Exists):
            return PropV("exists", e.binders, e.body, env)
        raise TypeError(f"cannot evaluate {e!r}")

    def force(self, thunk: Thunk, name: str):
        if thunk.value is not _MISSING:
            return thunk.value
        if thunk.forcing:
            raise RecursionLimit(f"the definition of {name} refers to itself while being evaluated.")
        thunk.forcing = True
        try:
            thunk.value = self.eval(Env({}), thunk.expr)
        finally:
            thunk.forcing = False
        return thunk.value

    def apply(self, fn, arg):
        if self.depth >= self.services.recursion_limit:
            raise RecursionLimit(
                f"recursion depth limit ({self.services.recursion_limit}) exceeded."
            )
        self.depth += 1
        try:
            if isinstance(fn, ClosureV):
                return self.eval(fn.env.child({fn.param: arg}), fn.body)
            if isinstance(fn, BuiltinV):
                return fn.fn(self, arg)
        finally:
            self.depth -= 1
        raise TypeError(f"cannot apply {fn!r}")

    def eval_binop(self, env: Env, e: BinOp):
        op = e.op
        if op == "/\\":
            return self.eval(env, e.left) and self.eval(env, e.right)
        if op == "\\/":
            return self.eval(env, e.left) or self.eval(env, e.right)
        if op == "==>":
            return (not self.eval(env, e.left)) or self.eval(env, e.right)
        l = self.eval(env, e.left)
        r = self.eval(env, e.right)
        if op == "+":
            return l + r
        if op == "-":
            return l - r
        if op == "*":
            return l * r
        if op == "/":
            if r == 0:
                raise DivisionByZero()
            return l / r
        if op == "mod":
            if r == 0:
                raise DivisionByZero("mod by zero.")
            return l - r * math.floor(l / r)
        if op == "^":
            e_int = int(r)
            if e_int > _MAX_EXPONENT and abs(l) not in (0, 1):
                raise ResourceLimit(
                    f"an exponent of {e_int} would produce an enormous number."
                )
            return l ** e_int
        if op == "==":
            return canonical_compare(l, r) == 0
        if op == "/=":
            return canonical_compare(l, r) != 0
        if op == "<":
            return canonical_compare(l, r) < 0
        if op == "<=":
            return canonical_compare(l, r) <= 0
        if op == ">":
            return canonical_compare(l, r) > 0
        if op == ">=":
            return canonical_compare(l, r) >= 0
        if op == "divides":
            if l == 0:
                return r == 0
            return (r / l).denominator == 1
        if op in ("union", "intersect", "\\\\"):
            from .builtins import IMPLS

            name = {"union": "union", "intersect": "intersect", "\\\\": "difference"}[op]
            return IMPLS[name](self, (l, r))
        raise TypeError(f"unknown operator {op!r}")

    def eval_case(self, env: Env, e: Case):
        for branch in e.branches:
            frame: dict[str, Any] = {}
            inner = env.child(frame)
            ok = True
            for g in branch.guards:
                if isinstance(g, GOtherwise):
                    continue
                if isinstance(g, GBool):
                    if not self.eval(inner, g.cond):
                        ok = False
                        break
                    continue
                scrutinee = self.eval(inner, g.scrutinee)
                bound = match_pattern(g.pattern, scrutinee)
                if bound is None:
                    ok = False
                    break
                frame.update(bound)
            if ok:
                return self.eval(inner, branch.body)
        raise NonExhaustiveMatch()

    def _comp(self, env: Env, quals, head, out: list) -> None:
        if not quals:
            out.append(self.eval(env, head))
            return
        q = quals[0]
        rest = quals[1:]
        if isinstance(q, Generator):
            src = self.eval(env, q.source)
            for v in src.expanded():
                self._comp(env.child({q.var: v}), rest, head, out)
        elif isinstance(q, Filter):
            if self.eval(env, q.cond):
                self._comp(env, rest, head, out)
        elif isinstance(q, LetQual):
            self._comp(env.child({q.var: self.eval(env, q.expr)}), rest, head, out)


# ---------------------------------------------------------------------------
# Pattern matching
# ---------------------------------------------------------------------------

def match_pattern(p, v) -> dict[str, Any] | None:
    """Match a value; None means no match. Arithmetic patterns solve the
    linear equation and check the candidate inhabits the variable's type."""
    if isinstance(p, PVar):
        return {p.name: v}
    if isinstance(p, PWild):
        return {}
    if isinstance(p, PUnit):
        return {} if v is UNIT else None
    if isinstance(p, PBool):
        return {} if isinstance(v, bool) and v == p.value else None
    if isinstance(p, PChar):
        return {} if v == p.value else None
    if isinstance(p, PNat):
        return {} if isinstance(v, Fraction) and v == p.value else None
    if isinstance(p, PTuple):
        out: dict[str, Any] = {}
        rest = v
        for item in p.items[:-1]:
            if not isinstance(rest, tuple):
                return None
            bound = match_pattern(item, rest[0])
            if bound is None:
                return None
            out.update(bound)
            rest = rest[1]
        bound = match_pattern(p.items[-1], rest)
        if bound is None:
            return None
        out.update(bound)
        return out
    if isinstance(p, PInj):
        if not isinstance(v, InjV) or v.side != p.side:
            return None
        return match_pattern(p.pattern, v.value)
    if isinstance(p, PArith):
        if not isinstance(v, Fraction):
            return None
        candidate = (v - p.offset) / p.coeff
        ty_name = getattr(p.var_type, "name", "Q")
        if ty_name in ("N", "Z") and candidate.denominator != 1:
            return None
        if ty_name in ("N", "F") and candidate < 0:
            return None
        return {p.var: candidate}
    raise TypeError(f"unknown pattern {p!r}")
