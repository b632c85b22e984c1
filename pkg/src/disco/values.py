"""Runtime values.

Numbers are exact rationals (`fractions.Fraction`, always normalized with
positive denominator), booleans are Python bools, characters are 1-length
strings, pairs are right-nested 2-tuples. Collections carry a canonical
(value, multiplicity) list: sets strictly increasing with multiplicity 1,
bags strictly increasing with multiplicities >= 1, lists in source order.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .errors import ComparisonOfFunctions


class _Unit:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "unit"

    def __eq__(self, other):
        return isinstance(other, _Unit)

    def __hash__(self):
        return hash(_Unit)


UNIT = _Unit()


@dataclass(eq=True)
class InjV:
    side: str  # 'left' | 'right'
    value: Any


@dataclass(eq=True)
class CollV:
    kind: str  # 'list' | 'bag' | 'set'
    items: list[tuple[Any, int]]

    def expanded(self):
        """Canonical element sequence with multiplicities expanded."""
        for v, n in self.items:
            for _ in range(n):
                yield v

    def size(self) -> int:
        return sum(n for _, n in self.items)


@dataclass(eq=False)
class ClosureV:
    param: str
    body: Any  # Expr
    env: Any   # Env


@dataclass(eq=False)
class BuiltinV:
    name: str
    fn: Callable  # called as fn(interp, arg_value)


@dataclass(eq=False)
class PropV:
    kind: str  # 'forall' | 'exists'
    binders: list[tuple[str, Any]]  # (name, TypeRep)
    body: Any  # Expr
    env: Any


def is_function(v: Any) -> bool:
    return isinstance(v, (ClosureV, BuiltinV))


def canonical_compare(a: Any, b: Any) -> int:
    """Total order on first-order values of one type; -1, 0, or 1.

    Reaching a closure raises: functions have no decidable order.
    """
    if is_function(a) or is_function(b) or isinstance(a, PropV) or isinstance(b, PropV):
        raise ComparisonOfFunctions()
    if isinstance(a, bool) and isinstance(b, bool):
        return (a > b) - (a < b)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return (a > b) - (a < b)
    if isinstance(a, str) and isinstance(b, str):
        return (a > b) - (a < b)
    if isinstance(a, _Unit) and isinstance(b, _Unit):
        return 0
    if isinstance(a, tuple) and isinstance(b, tuple):
        c = canonical_compare(a[0], b[0])
        if c != 0:
            return c
        return canonical_compare(a[1], b[1])
    if isinstance(a, InjV) and isinstance(b, InjV):
        if a.side != b.side:
            return -1 if a.side == "left" else 1
        return canonical_compare(a.value, b.value)
    if isinstance(a, CollV) and isinstance(b, CollV):
        for (va, na), (vb, nb) in zip(a.items, b.items):
            c = canonical_compare(va, vb)
            if c != 0:
                return c
            if na != nb:
                return -1 if na < nb else 1
        la, lb = len(a.items), len(b.items)
        return (la > lb) - (la < lb)
    raise TypeError(f"cannot compare {type(a).__name__} with {type(b).__name__}")


_sort_key = functools.cmp_to_key(canonical_compare)


def make_list(values: list[Any]) -> CollV:
    return CollV("list", [(v, 1) for v in values])


def make_set(values: list[Any]) -> CollV:
    """Canonicalize: sort under canonical_compare and drop duplicates."""
    out: list[tuple[Any, int]] = []
    for v in sorted(values, key=_sort_key):
        if out and canonical_compare(out[-1][0], v) == 0:
            continue
        out.append((v, 1))
    return CollV("set", out)


def make_bag(values: list[Any]) -> CollV:
    out: list[tuple[Any, int]] = []
    for v in sorted(values, key=_sort_key):
        if out and canonical_compare(out[-1][0], v) == 0:
            out[-1] = (out[-1][0], out[-1][1] + 1)
        else:
            out.append((v, 1))
    return CollV("bag", out)


def make_coll(kind: str, values: list[Any]) -> CollV:
    if kind == "list":
        return make_list(values)
    if kind == "set":
        return make_set(values)
    return make_bag(values)
