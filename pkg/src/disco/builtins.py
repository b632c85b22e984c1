"""Built-in functions: typed schemes, runtime implementations, and the doc
entries served by :doc.

Shape-overloaded builtins (abs, floor, ceiling, each, reduce, and the
container conversions) have no scheme here; the inferencer resolves them
at application sites.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .infer import OVERLOADED, QualC, TypeScheme
from .types import BOOL, N, TArrow, TProd, TSet, TSum, TVar
from .values import (
    BuiltinV, CollV, InjV, canonical_compare, make_bag, make_coll, make_list,
    make_set,
)


def _scheme(vars_, constraints, body):
    return TypeScheme(vars_, constraints, body)


_a, _b = TVar("a"), TVar("b")

SCHEMES: dict[str, TypeScheme] = {
    "left": _scheme(["a", "b"], [], TArrow(_a, TSum(_a, _b))),
    "right": _scheme(["a", "b"], [], TArrow(_b, TSum(_a, _b))),
    "min": _scheme(["a"], [QualC("cmp", _a)], TArrow(TProd(_a, _a), _a)),
    "max": _scheme(["a"], [QualC("cmp", _a)], TArrow(TProd(_a, _a), _a)),
    "power": _scheme(["a"], [QualC("cmp", _a)], TArrow(TSet(_a), TSet(TSet(_a)))),
    "union": _scheme(["a"], [QualC("cmp", _a)],
                     TArrow(TProd(TSet(_a), TSet(_a)), TSet(_a))),
    "intersect": _scheme(["a"], [QualC("cmp", _a)],
                         TArrow(TProd(TSet(_a), TSet(_a)), TSet(_a))),
    "difference": _scheme(["a"], [QualC("cmp", _a)],
                          TArrow(TProd(TSet(_a), TSet(_a)), TSet(_a))),
    "isPrime": _scheme([], [], TArrow(N, BOOL)),
}


# ---------------------------------------------------------------------------
# Primality
# ---------------------------------------------------------------------------

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61, 67, 71, 73, 79, 83, 89, 97]

#: Below this bound the first 13 prime bases are a deterministic test.
_MR_DETERMINISTIC_BOUND = 3_317_044_064_679_887_385_961_981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime_int(n: int) -> bool:
    """Trial division by small primes, then strong-probable-prime rounds;
    deterministic for n below 3.3e24."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _MR_BASES if n < _MR_DETERMINISTIC_BOUND else _MR_BASES + (53, 59, 61, 67, 71)
    for a in bases:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


# ---------------------------------------------------------------------------
# Runtime implementations
# ---------------------------------------------------------------------------

def _pair_args(v, n: int) -> list:
    out = []
    for _ in range(n - 1):
        out.append(v[0])
        v = v[1]
    out.append(v)
    return out


def _bi_left(interp, v):
    return InjV("left", v)


def _bi_right(interp, v):
    return InjV("right", v)


def _bi_min(interp, v):
    x, y = _pair_args(v, 2)
    return x if canonical_compare(x, y) <= 0 else y


def _bi_max(interp, v):
    x, y = _pair_args(v, 2)
    return x if canonical_compare(x, y) >= 0 else y


def _bi_power(interp, v: CollV):
    elems = [x for x, _ in v.items]
    subsets = []
    for mask in range(1 << len(elems)):
        interp.check_deadline()
        subset = [elems[i] for i in range(len(elems)) if mask >> i & 1]
        subsets.append(make_set(subset))
    return make_set(subsets)


def _bi_union(interp, v):
    s, t = _pair_args(v, 2)
    return make_set([x for x, _ in s.items] + [x for x, _ in t.items])


def _bi_intersect(interp, v):
    s, t = _pair_args(v, 2)
    tset = [x for x, _ in t.items]
    out = []
    for x, _ in s.items:
        interp.check_deadline()
        if any(canonical_compare(x, y) == 0 for y in tset):
            out.append(x)
    return make_set(out)


def _bi_difference(interp, v):
    s, t = _pair_args(v, 2)
    tset = [x for x, _ in t.items]
    out = []
    for x, _ in s.items:
        interp.check_deadline()
        if not any(canonical_compare(x, y) == 0 for y in tset):
            out.append(x)
    return make_set(out)


def _bi_is_prime(interp, v: Fraction):
    return is_prime_int(int(v))


def _bi_abs(interp, v: Fraction):
    return abs(v)


def _bi_floor(interp, v: Fraction):
    return Fraction(math.floor(v))


def _bi_ceiling(interp, v: Fraction):
    return Fraction(math.ceil(v))


def _bi_each(interp, v):
    f, coll = _pair_args(v, 2)
    mapped = [interp.apply(f, x) for x in coll.expanded()]
    return make_coll(coll.kind, mapped)


def _bi_reduce(interp, v):
    f, z, coll = _pair_args(v, 3)
    acc = z
    for x in reversed(list(coll.expanded())):
        acc = interp.apply(interp.apply(f, x), acc)
    return acc


def _bi_list(interp, v: CollV):
    return make_list(list(v.expanded()))


def _bi_bag(interp, v: CollV):
    return make_bag(list(v.expanded()))


def _bi_set(interp, v: CollV):
    return make_set(list(v.expanded()))


IMPLS = {
    "left": _bi_left,
    "right": _bi_right,
    "min": _bi_min,
    "max": _bi_max,
    "power": _bi_power,
    "union": _bi_union,
    "intersect": _bi_intersect,
    "difference": _bi_difference,
    "isPrime": _bi_is_prime,
    "abs": _bi_abs,
    "floor": _bi_floor,
    "ceiling": _bi_ceiling,
    "each": _bi_each,
    "reduce": _bi_reduce,
    "list": _bi_list,
    "bag": _bi_bag,
    "set": _bi_set,
}


def builtin_values() -> dict[str, BuiltinV]:
    return {name: BuiltinV(name, fn) for name, fn in IMPLS.items()}


# ---------------------------------------------------------------------------
# Documentation entries
# ---------------------------------------------------------------------------

#: canonical operator -> (display name, type text, doc text, reference slug)
OPERATOR_DOCS: dict[str, tuple[str, str, str, str]] = {
    "+": ("~+~", "ℕ × ℕ → ℕ", "The sum of two numbers, types, or graphs.", "addition"),
    "-": ("~-~", "ℤ × ℤ → ℤ", "The difference of two numbers.", "subtraction"),
    "*": ("~*~", "ℕ × ℕ → ℕ", "The product of two numbers, types, or graphs.", "multiplication"),
    "/": ("~/~", "𝔽 × 𝔽 → 𝔽", "The quotient of two numbers.", "division"),
    "^": ("~^~", "ℕ × ℕ → ℕ", "One number raised to the power of another.", "exponentiation"),
    "mod": ("~mod~", "ℕ × ℕ → ℕ", "The remainder of one number divided by another.", "mod"),
    "divides": ("~divides~", "ℕ × ℕ → Bool", "Whether one number evenly divides another.", "divides"),
    "==": ("~==~", "a × a → Bool", "Whether two values are equal.", "compare"),
    "/=": ("~/=~", "a × a → Bool", "Whether two values are unequal.", "compare"),
    "<": ("~<~", "a × a → Bool", "Whether one value is less than another.", "compare"),
    "<=": ("~<=~", "a × a → Bool", "Whether one value is at most another.", "compare"),
    ">": ("~>~", "a × a → Bool", "Whether one value is greater than another.", "compare"),
    ">=": ("~>=~", "a × a → Bool", "Whether one value is at least another.", "compare"),
    "/\\": ("~/\\~", "Bool × Bool → Bool", "Logical conjunction.", "logic-ops"),
    "\\/": ("~\\/~", "Bool × Bool → Bool", "Logical disjunction.", "logic-ops"),
    "==>": ("~==>~", "Bool × Bool → Bool", "Logical implication.", "logic-ops"),
    "not": ("~not~", "Bool → Bool", "Logical negation.", "logic-ops"),
    "union": ("~union~", "Set(a) × Set(a) → Set(a)", "The union of two sets.", "set-ops"),
    "intersect": ("~intersect~", "Set(a) × Set(a) → Set(a)", "The intersection of two sets.", "set-ops"),
    "\\\\": ("~\\\\~", "Set(a) × Set(a) → Set(a)", "The difference of two sets.", "set-ops"),
}

BUILTIN_DOCS: dict[str, tuple[str, str]] = {
    "abs": ("The absolute value of a number, or the size of a collection.", "abs"),
    "floor": ("The greatest integer less than or equal to a number.", "round"),
    "ceiling": ("The least integer greater than or equal to a number.", "round"),
    "min": ("The smaller of two values.", "min"),
    "max": ("The larger of two values.", "max"),
    "each": ("Apply a function to each element of a collection.", "each"),
    "reduce": ("Fold a collection with a binary function and an initial value.", "reduce"),
    "power": ("The set of all subsets of a set.", "power"),
    "union": ("The union of two sets.", "set-ops"),
    "intersect": ("The intersection of two sets.", "set-ops"),
    "difference": ("The difference of two sets.", "set-ops"),
    "list": ("Convert a collection to a list.", "collections"),
    "bag": ("Convert a collection to a bag.", "collections"),
    "set": ("Convert a collection to a set.", "collections"),
    "isPrime": ("Whether a natural number is prime.", "isprime"),
    "left": ("Inject a value into the left side of a sum type.", "sum-types"),
    "right": ("Inject a value into the right side of a sum type.", "sum-types"),
}

#: The display type used by :doc for shape-overloaded builtins.
OVERLOAD_DOC_TYPES = {
    "abs": "ℤ → ℕ",
    "floor": "ℚ → ℤ",
    "ceiling": "ℚ → ℤ",
    "each": "(a → b) × List(a) → List(b)",
    "reduce": "(a → b → b) × b × List(a) → b",
    "list": "List(a) → List(a)",
    "bag": "List(a) → Bag(a)",
    "set": "List(a) → Set(a)",
}

assert OVERLOADED <= (set(OVERLOAD_DOC_TYPES) | {"bag", "list", "set"})
