"""Fair enumeration of values by type, for property testing.

Every countable type gets an ordering in which each value appears at a
size-bounded index: naturals count up, integers zig-zag, the nonnegative
rationals follow the Calkin-Wilf tree (so every reduced fraction appears
exactly once), products take Cantor diagonals, sums alternate arms, and
collections enumerate by combined weight. Streams are memoized, which
lets recursive synonym types feed off their own earlier elements.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor

from .errors import CannotEnumerate
from .types import (
    SynonymEnv, TArrow, TBag, TCon, TList, TProd, TSet, TSum, TSyn, TVar,
    Type,
)
from .values import UNIT, InjV, make_coll

_CHAR_CARD = 0x110000 - 0x800  # Unicode scalar values (surrogates excluded)


def inhabited_synonyms(synenv: SynonymEnv) -> set[str]:
    """Least fixpoint: which synonyms have any (finite) values at all.

    In a strict language `type W = Unit * W` has no values; quantifying
    over it is vacuous."""
    known: set[str] = set()

    def body_inhabited(t: Type) -> bool:
        if isinstance(t, TSyn):
            return t.name in known
        if isinstance(t, TSum):
            return body_inhabited(t.left) or body_inhabited(t.right)
        if isinstance(t, TProd):
            return body_inhabited(t.left) and body_inhabited(t.right)
        return True  # bases, arrows, collections (empty one exists)

    changed = True
    while changed:
        changed = False
        for name, body in synenv.defs.items():
            if name not in known and body_inhabited(body):
                known.add(name)
                changed = True
    return known


def is_inhabited(t: Type, synenv: SynonymEnv) -> bool:
    known = inhabited_synonyms(synenv)

    def go(t: Type) -> bool:
        if isinstance(t, TSyn):
            return t.name in known
        if isinstance(t, TSum):
            return go(t.left) or go(t.right)
        if isinstance(t, TProd):
            return go(t.left) and go(t.right)
        return True

    return go(t)


def cardinality(t: Type, synenv: SynonymEnv, _active: frozenset = frozenset()):
    """Exact number of values, or None when infinite."""
    if not is_inhabited(t, synenv):
        return 0
    if isinstance(t, TSyn):
        if t.name in _active:
            return None  # guarded, inhabited cycle: infinitely many values
        return cardinality(synenv.expand_head(t), synenv, _active | {t.name})
    if isinstance(t, TCon):
        if t.name in ("N", "Z", "F", "Q"):
            return None
        if t.name == "Bool":
            return 2
        if t.name == "Unit":
            return 1
        if t.name == "Char":
            return _CHAR_CARD
        raise CannotEnumerate(f"cannot enumerate values of type {t.name}.")
    if isinstance(t, TVar):
        raise CannotEnumerate("cannot enumerate values of a type variable.")
    if isinstance(t, TArrow):
        raise CannotEnumerate("cannot enumerate function values.")
    if isinstance(t, TSum):
        l = cardinality(t.left, synenv, _active)
        r = cardinality(t.right, synenv, _active)
        if l is None or r is None:
            return None
        return l + r
    if isinstance(t, TProd):
        l = cardinality(t.left, synenv, _active)
        r = cardinality(t.right, synenv, _active)
        if l == 0 or r == 0:
            return 0
        if l is None or r is None:
            return None
        return l * r
    if isinstance(t, (TList, TBag)):
        e = cardinality(t.elem, synenv, _active)
        if e == 0:
            return 1  # only the empty collection
        return None
    if isinstance(t, TSet):
        e = cardinality(t.elem, synenv, _active)
        if e is None:
            return None
        return 2 ** e
    raise CannotEnumerate(f"cannot enumerate values of type {t!r}.")


class Enum:
    """A memoized stream with known cardinality (None = infinite)."""

    def __init__(self, gen, card):
        self._gen = gen
        self.card = card
        self.cache: list = []

    def get(self, i: int):
        if self.card is not None and i >= self.card:
            raise IndexError(i)
        while len(self.cache) <= i:
            try:
                self.cache.append(next(self._gen))
            except StopIteration:
                raise IndexError(i) from None
            except ValueError:
                # Re-entrant pull: the stream needs its own not-yet-produced
                # elements, so this arm is unproductive.
                raise CannotEnumerate(
                    "this recursive type has no enumerable values."
                ) from None
        return self.cache[i]


class Enumerator:
    """Builds and caches enumeration streams per type."""

    def __init__(self, synenv: SynonymEnv):
        self.synenv = synenv
        self._streams: dict = {}

    def stream(self, t: Type) -> Enum:
        key = t
        if key in self._streams:
            return self._streams[key]
        card = cardinality(t, self.synenv)
        enum = Enum(self._generator(t), card)
        self._streams[key] = enum
        return enum

    def _generator(self, t: Type):
        if isinstance(t, TSyn):
            return self._defer(t)
        if isinstance(t, TCon):
            return _BASE_GENS[t.name]()
        if isinstance(t, TSum):
            return self._sum_gen(t)
        if isinstance(t, TProd):
            return self._prod_gen(t)
        if isinstance(t, (TList, TBag, TSet)):
            return self._coll_gen(t)
        if isinstance(t, TArrow):
            raise CannotEnumerate("cannot enumerate function values.")
        raise CannotEnumerate(f"cannot enumerate values of type {t!r}.")

    def _defer(self, t: TSyn):
        inner = self.stream(self.synenv.expand_head(t))
        i = 0
        while True:
            try:
                yield inner.get(i)
            except IndexError:
                return
            i += 1

    def _sum_gen(self, t: TSum):
        left = self.stream(t.left)
        right = self.stream(t.right)
        li = ri = 0
        left_done = right_done = False
        while not (left_done and right_done):
            if not left_done:
                try:
                    yield InjV("left", left.get(li))
                    li += 1
                except (IndexError, CannotEnumerate):
                    left_done = True
            if not right_done:
                try:
                    yield InjV("right", right.get(ri))
                    ri += 1
                except (IndexError, CannotEnumerate):
                    right_done = True

    def _prod_gen(self, t: TProd):
        left = self.stream(t.left)
        right = self.stream(t.right)
        n = 0
        while True:
            produced = False
            hi = n if left.card is None else min(n, left.card - 1)
            lo = 0 if right.card is None else max(0, n - (right.card - 1))
            if left.card == 0 or right.card == 0:
                return
            for i in range(lo, hi + 1):
                try:
                    a = left.get(i)
                    b = right.get(n - i)
                except (IndexError, CannotEnumerate):
                    continue
                produced = True
                yield (a, b)
            if not produced and left.card is not None and right.card is not None:
                if n > (left.card - 1) + (right.card - 1):
                    return
            n += 1

    def _coll_gen(self, t):
        elem = self.stream(t.elem)
        kind = {TList: "list", TBag: "bag", TSet: "set"}[type(t)]
        strictly = kind == "set"
        nondecreasing = kind == "bag"
        max_w = None
        if strictly and elem.card is not None:
            m = elem.card
            max_w = m + m * (m - 1) // 2  # largest set uses every index once
        w = 0
        while True:
            if max_w is not None and w > max_w:
                return
            for length in range(0, w + 1):
                target = w - length
                for indices in _index_tuples(length, target, elem.card, strictly, nondecreasing):
                    try:
                        values = [elem.get(i) for i in indices]
                    except (IndexError, CannotEnumerate):
                        continue
                    yield make_coll(kind, values)
            w += 1


def _index_tuples(length: int, target: int, card, strictly: bool, nondecreasing: bool):
    """Index tuples of the given length summing to target, lexicographic.
    Sets need strictly increasing tuples, bags nondecreasing."""
    if length == 0:
        if target == 0:
            yield ()
        return

    def rec(k: int, remaining: int, minimum: int):
        if k == 1:
            if remaining >= minimum and (card is None or remaining < card):
                yield (remaining,)
            return
        upper = remaining if card is None else min(remaining, card - 1)
        for i in range(minimum, upper + 1):
            nxt = i + 1 if strictly else (i if nondecreasing else 0)
            for rest in rec(k - 1, remaining - i, nxt):
                yield (i,) + rest

    yield from rec(length, target, 0)


def _nat_gen():
    i = 0
    while True:
        yield Fraction(i)
        i += 1


def _int_gen():
    yield Fraction(0)
    i = 1
    while True:
        yield Fraction(i)
        yield Fraction(-i)
        i += 1


def _frac_gen():
    # 0, then the Calkin-Wilf sequence: x -> 1 / (2*floor(x) - x + 1)
    yield Fraction(0)
    x = Fraction(1)
    while True:
        yield x
        x = 1 / (2 * floor(x) - x + 1)


def _rat_gen():
    for x in _frac_gen():
        yield x
        if x != 0:
            yield -x


def _bool_gen():
    yield False
    yield True


def _unit_gen():
    yield UNIT


def _char_gen():
    for cp in range(0x20, 0x7F):
        yield chr(cp)
    for cp in range(0x00, 0x20):
        yield chr(cp)
    yield chr(0x7F)
    for cp in range(0x80, 0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        yield chr(cp)


_BASE_GENS = {
    "N": _nat_gen,
    "Z": _int_gen,
    "F": _frac_gen,
    "Q": _rat_gen,
    "Bool": _bool_gen,
    "Unit": _unit_gen,
    "Char": _char_gen,
}


def enumerate_type(t: Type, synenv: SynonymEnv) -> Enum:
    """The fair stream for a closed type together with its cardinality."""
    return Enumerator(synenv).stream(t)
