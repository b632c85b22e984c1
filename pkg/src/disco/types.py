"""Type representation, the numeric lattice, qualifiers, and coinductive
equality/subtyping over equirecursive synonyms.

The four numeric base types form a diamond: N below Z and F, both below Q.
Recursive type synonyms are equal to their unfoldings; equality and
subtyping carry an assumption set of visited pairs so checks terminate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidSynonym, UnboundSynonym


class Type:
    pass


@dataclass(frozen=True)
class TCon(Type):
    name: str  # 'N' 'Z' 'F' 'Q' 'Bool' 'Char' 'Unit' 'Prop'


@dataclass(frozen=True)
class TVar(Type):
    name: str


@dataclass(frozen=True)
class TSkolem(Type):
    name: str


@dataclass(frozen=True)
class TSum(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class TProd(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class TArrow(Type):
    dom: Type
    cod: Type


@dataclass(frozen=True)
class TList(Type):
    elem: Type


@dataclass(frozen=True)
class TBag(Type):
    elem: Type


@dataclass(frozen=True)
class TSet(Type):
    elem: Type


@dataclass(frozen=True)
class TSyn(Type):
    name: str


N = TCon("N")
Z = TCon("Z")
F = TCon("F")
Q = TCon("Q")
BOOL = TCon("Bool")
CHAR = TCon("Char")
UNIT = TCon("Unit")
PROP = TCon("Prop")

NUMERIC = {"N", "Z", "F", "Q"}

_CONTAINERS = (TList, TBag, TSet)


def is_numeric(t: Type) -> bool:
    return isinstance(t, TCon) and t.name in NUMERIC


# ---------------------------------------------------------------------------
# The numeric lattice
# ---------------------------------------------------------------------------

_LEQ = {
    ("N", "N"), ("N", "Z"), ("N", "F"), ("N", "Q"),
    ("Z", "Z"), ("Z", "Q"),
    ("F", "F"), ("F", "Q"),
    ("Q", "Q"),
}


def lattice_leq(a: TCon, b: TCon) -> bool:
    """Reflexive-transitive order on the numeric diamond; Z and F are
    incomparable."""
    return (a.name, b.name) in _LEQ


def lattice_join(a: TCon, b: TCon) -> TCon:
    if lattice_leq(a, b):
        return b
    if lattice_leq(b, a):
        return a
    return Q  # the incomparable pair {Z, F}


def lattice_meet(a: TCon, b: TCon) -> TCon:
    if lattice_leq(a, b):
        return a
    if lattice_leq(b, a):
        return b
    return N


#: Ascending-by-height order used when searching for least bases.
LATTICE_ORDER = [N, Z, F, Q]

_QUAL_TABLE = {
    "num": {"N", "Z", "F", "Q"},
    "sub": {"Z", "Q"},
    "div": {"F", "Q"},
    "cmp": {"N", "Z", "F", "Q", "Bool", "Char", "Unit"},
}

QUALIFIERS = tuple(_QUAL_TABLE)


def qual_holds(qual: str, base: TCon) -> bool:
    return base.name in _QUAL_TABLE[qual]


def least_base_satisfying(lower: TCon | None, quals: set[str]) -> TCon | None:
    """Least base type >= lower satisfying every qualifier, or None.

    For numeric lowers this searches the diamond bottom-up; each qualifier's
    satisfying set is a filter, so the least element is unique when it
    exists.
    """
    if lower is not None and not is_numeric(lower):
        if all(qual_holds(q, lower) for q in quals):
            return lower
        return None
    candidates = [b for b in LATTICE_ORDER if all(qual_holds(q, b) for q in quals)]
    if lower is not None:
        candidates = [b for b in candidates if lattice_leq(lower, b)]
    best = None
    for b in candidates:
        if best is None or lattice_leq(b, best):
            best = b
    return best


# ---------------------------------------------------------------------------
# Synonym environments
# ---------------------------------------------------------------------------

class SynonymEnv:
    """Immutable-after-load mapping from synonym names to their bodies.

    Declaring a synonym checks contractiveness: chasing synonym references
    from the head must reach a constructor before looping, so every cycle
    is guarded and coinduction is meaningful.
    """

    def __init__(self, defs: dict[str, Type] | None = None):
        self.defs: dict[str, Type] = dict(defs) if defs else {}

    def copy(self) -> "SynonymEnv":
        return SynonymEnv(self.defs)

    def declare(self, name: str, body: Type) -> None:
        self.defs[name] = body

    def validate(self) -> None:
        """Check every declared synonym is bound and contractive."""
        for name in self.defs:
            self._check_head_guarded(name)
            self._check_bound(self.defs[name])

    def _check_head_guarded(self, name: str) -> None:
        seen = set()
        t = TSyn(name)
        while isinstance(t, TSyn):
            if t.name in seen:
                raise InvalidSynonym(f"type {name} refers to itself without an intervening constructor.")
            seen.add(t.name)
            if t.name not in self.defs:
                raise UnboundSynonym(f"there is no type named {t.name}.")
            t = self.defs[t.name]

    def _check_bound(self, t: Type) -> None:
        if isinstance(t, TSyn):
            if t.name not in self.defs:
                raise UnboundSynonym(f"there is no type named {t.name}.")
        elif isinstance(t, (TSum, TProd)):
            self._check_bound(t.left)
            self._check_bound(t.right)
        elif isinstance(t, TArrow):
            self._check_bound(t.dom)
            self._check_bound(t.cod)
        elif isinstance(t, _CONTAINERS):
            self._check_bound(t.elem)

    def expand_head(self, t: Type) -> Type:
        """Chase synonym references until a constructor appears."""
        seen = set()
        while isinstance(t, TSyn):
            if t.name in seen:
                raise InvalidSynonym(f"type {t.name} refers to itself without an intervening constructor.")
            seen.add(t.name)
            if t.name not in self.defs:
                raise UnboundSynonym(f"there is no type named {t.name}.")
            t = self.defs[t.name]
        return t


EMPTY_SYNONYMS = SynonymEnv()


# ---------------------------------------------------------------------------
# Coinductive equality and subtyping
# ---------------------------------------------------------------------------

def type_eq(env: SynonymEnv, t1: Type, t2: Type, stats: dict | None = None) -> bool:
    """Bisimilarity of closed types: synonym unfoldings are equal types."""
    assumed: set[tuple[Type, Type]] = set()

    def go(a: Type, b: Type) -> bool:
        if a == b:
            return True
        key = (a, b)
        if key in assumed:
            return True
        assumed.add(key)
        a = env.expand_head(a)
        b = env.expand_head(b)
        if isinstance(a, TCon) and isinstance(b, TCon):
            return a.name == b.name
        if isinstance(a, (TVar, TSkolem)) or isinstance(b, (TVar, TSkolem)):
            return a == b
        if type(a) is not type(b):
            return False
        if isinstance(a, (TSum, TProd)):
            return go(a.left, b.left) and go(a.right, b.right)
        if isinstance(a, TArrow):
            return go(a.dom, b.dom) and go(a.cod, b.cod)
        if isinstance(a, _CONTAINERS):
            return go(a.elem, b.elem)
        return a == b

    result = go(t1, t2)
    if stats is not None:
        stats["assumptions"] = len(assumed)
    return result


def is_subtype(env: SynonymEnv, t1: Type, t2: Type, stats: dict | None = None) -> bool:
    """Coinductive structural subtyping.

    Sums, products, and collections are covariant; arrows contravariant in
    the domain; numeric bases follow the lattice; other bases only
    reflexively.
    """
    assumed: set[tuple[Type, Type]] = set()

    def go(a: Type, b: Type) -> bool:
        if a == b:
            return True
        key = (a, b)
        if key in assumed:
            return True
        assumed.add(key)
        a = env.expand_head(a)
        b = env.expand_head(b)
        if isinstance(a, TCon) and isinstance(b, TCon):
            if a.name in NUMERIC and b.name in NUMERIC:
                return lattice_leq(a, b)
            return a.name == b.name
        if isinstance(a, (TVar, TSkolem)) or isinstance(b, (TVar, TSkolem)):
            return a == b
        if type(a) is not type(b):
            return False
        if isinstance(a, (TSum, TProd)):
            return go(a.left, b.left) and go(a.right, b.right)
        if isinstance(a, TArrow):
            return go(b.dom, a.dom) and go(a.cod, b.cod)
        if isinstance(a, _CONTAINERS):
            return go(a.elem, b.elem)
        return a == b

    result = go(t1, t2)
    if stats is not None:
        stats["assumptions"] = len(assumed)
    return result


def join_types(env: SynonymEnv, a: Type, b: Type) -> Type | None:
    """Least upper bound of two closed types, or None when none exists.

    Distinct recursive synonyms join only when bisimilar; synthesizing a
    fresh recursive join is out of scope.
    """
    return _bound(env, a, b, up=True)


def meet_types(env: SynonymEnv, a: Type, b: Type) -> Type | None:
    return _bound(env, a, b, up=False)


def _bound(env: SynonymEnv, a: Type, b: Type, up: bool, depth: int = 0) -> Type | None:
    if type_eq(env, a, b):
        return a
    if depth > 200:
        return None
    ea, eb = env.expand_head(a), env.expand_head(b)
    if isinstance(ea, TCon) and isinstance(eb, TCon):
        if ea.name in NUMERIC and eb.name in NUMERIC:
            return lattice_join(ea, eb) if up else lattice_meet(ea, eb)
        return None
    if type(ea) is not type(eb):
        return None
    if isinstance(ea, (TSum, TProd)):
        l = _bound(env, ea.left, eb.left, up, depth + 1)
        r = _bound(env, ea.right, eb.right, up, depth + 1)
        if l is None or r is None:
            return None
        return type(ea)(l, r)
    if isinstance(ea, TArrow):
        d = _bound(env, ea.dom, eb.dom, not up, depth + 1)
        c = _bound(env, ea.cod, eb.cod, up, depth + 1)
        if d is None or c is None:
            return None
        return TArrow(d, c)
    if isinstance(ea, _CONTAINERS):
        e = _bound(env, ea.elem, eb.elem, up, depth + 1)
        if e is None:
            return None
        return type(ea)(e)
    return None


def free_vars(t: Type) -> set[str]:
    if isinstance(t, TVar):
        return {t.name}
    if isinstance(t, (TSum, TProd)):
        return free_vars(t.left) | free_vars(t.right)
    if isinstance(t, TArrow):
        return free_vars(t.dom) | free_vars(t.cod)
    if isinstance(t, _CONTAINERS):
        return free_vars(t.elem)
    return set()


def substitute(t: Type, subst: dict[str, Type]) -> Type:
    """Apply a unification-variable substitution, chasing chains."""
    if isinstance(t, TVar):
        seen = set()
        while isinstance(t, TVar) and t.name in subst:
            if t.name in seen:
                break
            seen.add(t.name)
            t = subst[t.name]
        if isinstance(t, TVar):
            return t
        return substitute(t, subst)
    if isinstance(t, (TSum, TProd)):
        return type(t)(substitute(t.left, subst), substitute(t.right, subst))
    if isinstance(t, TArrow):
        return TArrow(substitute(t.dom, subst), substitute(t.cod, subst))
    if isinstance(t, _CONTAINERS):
        return type(t)(substitute(t.elem, subst))
    return t
