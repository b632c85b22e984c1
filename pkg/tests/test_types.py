import itertools
import random

import pytest

from disco.errors import InvalidSynonym, UnboundSynonym
from disco.types import (
    BOOL, CHAR, F, N, PROP, Q, UNIT, Z,
    SynonymEnv, TArrow, TBag, TCon, TList, TProd, TSet, TSum, TSyn,
    is_numeric, is_subtype, lattice_join, lattice_leq, lattice_meet,
    qual_holds, type_eq,
)

BASES = [N, Z, F, Q]


# ---------------------------------------------------------------------------
# Oracle: bounded unrolling to a fixed depth, then plain structural checks.
# Independent of the coinductive implementation.
# ---------------------------------------------------------------------------

_TRUNC = TCon("?truncated")


def unroll(env: SynonymEnv, t, depth: int):
    if depth <= 0:
        return _TRUNC
    if isinstance(t, TSyn):
        # expansion is free: an equirecursive synonym IS its unfolding
        return unroll(env, env.defs[t.name], depth)
    if isinstance(t, (TSum, TProd)):
        return type(t)(unroll(env, t.left, depth - 1), unroll(env, t.right, depth - 1))
    if isinstance(t, TArrow):
        return TArrow(unroll(env, t.dom, depth - 1), unroll(env, t.cod, depth - 1))
    if isinstance(t, (TList, TBag, TSet)):
        return type(t)(unroll(env, t.elem, depth - 1))
    return t


def oracle_eq(env, t1, t2, depth=10):
    return unroll(env, t1, depth) == unroll(env, t2, depth)


def oracle_subtype(env, t1, t2, depth=10):
    a, b = unroll(env, t1, depth), unroll(env, t2, depth)

    def go(x, y):
        if x == _TRUNC or y == _TRUNC:
            return True  # optimistic at the truncation horizon
        if isinstance(x, TCon) and isinstance(y, TCon):
            if is_numeric(x) and is_numeric(y):
                return lattice_leq(x, y)
            return x == y
        if type(x) is not type(y):
            return False
        if isinstance(x, (TSum, TProd)):
            return go(x.left, y.left) and go(x.right, y.right)
        if isinstance(x, TArrow):
            return go(y.dom, x.dom) and go(x.cod, y.cod)
        if isinstance(x, (TList, TBag, TSet)):
            return go(x.elem, y.elem)
        return x == y

    return go(a, b)


# ---------------------------------------------------------------------------
# Lattice
# ---------------------------------------------------------------------------

def test_lattice_order_examples():
    assert lattice_leq(N, Z)
    assert lattice_leq(N, F)
    assert not lattice_leq(Z, F)
    assert not lattice_leq(F, Z)
    assert lattice_join(Z, F) == Q
    assert lattice_meet(Z, F) == N


def test_lattice_is_a_partial_order():
    for a in BASES:
        assert lattice_leq(a, a)
    for a, b in itertools.product(BASES, repeat=2):
        if lattice_leq(a, b) and lattice_leq(b, a):
            assert a == b
    for a, b, c in itertools.product(BASES, repeat=3):
        if lattice_leq(a, b) and lattice_leq(b, c):
            assert lattice_leq(a, c)


def test_join_meet_algebraic_laws():
    for a, b in itertools.product(BASES, repeat=2):
        assert lattice_join(a, b) == lattice_join(b, a)
        assert lattice_meet(a, b) == lattice_meet(b, a)
        assert lattice_join(a, a) == a and lattice_meet(a, a) == a
        assert lattice_join(a, lattice_meet(a, b)) == a  # absorption
        assert lattice_meet(a, lattice_join(a, b)) == a
        # join/meet really are least upper / greatest lower bounds
        j = lattice_join(a, b)
        assert lattice_leq(a, j) and lattice_leq(b, j)
        m = lattice_meet(a, b)
        assert lattice_leq(m, a) and lattice_leq(m, b)
    for a, b, c in itertools.product(BASES, repeat=3):
        assert lattice_join(a, lattice_join(b, c)) == lattice_join(lattice_join(a, b), c)
        assert lattice_meet(a, lattice_meet(b, c)) == lattice_meet(lattice_meet(a, b), c)
        if lattice_leq(a, b):
            assert lattice_leq(lattice_join(a, c), lattice_join(b, c))  # monotone
            assert lattice_leq(lattice_meet(a, c), lattice_meet(b, c))


def test_qualifier_table():
    assert not qual_holds("sub", N)
    assert qual_holds("div", F)
    assert qual_holds("sub", Q) and qual_holds("div", Q)
    assert qual_holds("num", N) and qual_holds("num", Q)
    assert not qual_holds("div", Z)
    for b in (BOOL, CHAR, UNIT):
        assert qual_holds("cmp", b)
        assert not qual_holds("num", b)
    assert not qual_holds("cmp", PROP)


# ---------------------------------------------------------------------------
# Equirecursive equality and subtyping
# ---------------------------------------------------------------------------

@pytest.fixture
def bt_env():
    env = SynonymEnv()
    env.declare("BT", TSum(UNIT, TProd(TSyn("BT"), TSyn("BT"))))
    env.validate()
    return env


def test_type_eq_unfolding(bt_env):
    bt = TSyn("BT")
    unfolded = TSum(UNIT, TProd(bt, bt))
    assert type_eq(bt_env, bt, unfolded)
    assert oracle_eq(bt_env, bt, unfolded)


def test_type_eq_double_unfolding(bt_env):
    bt = TSyn("BT")
    double = TSum(UNIT, TProd(TSum(UNIT, TProd(bt, bt)), bt))
    assert oracle_eq(bt_env, bt, double)  # the independent check first
    assert type_eq(bt_env, bt, double)


def test_type_eq_distinguishes_leaves():
    env = SynonymEnv()
    assert not type_eq(env, TList(N), TList(Z))


def test_subtype_variance():
    env = SynonymEnv()
    assert is_subtype(env, TArrow(TProd(N, N), N), TArrow(TProd(N, N), Q))
    assert is_subtype(env, TArrow(Z, N), TArrow(N, N))
    assert not is_subtype(env, TArrow(N, N), TArrow(Z, N))
    assert is_subtype(env, TSet(N), TSet(Z))  # collections covariant
    assert is_subtype(env, TSum(N, BOOL), TSum(Q, BOOL))


def test_recursive_subtype_example():
    env = SynonymEnv()
    env.declare("E", TSum(UNIT, TProd(TSyn("E"), N)))
    env.declare("E2", TSum(UNIT, TProd(TSyn("E2"), Z)))
    env.validate()
    assert oracle_subtype(env, TSyn("E"), TSyn("E2"))
    assert is_subtype(env, TSyn("E"), TSyn("E2"))
    assert not is_subtype(env, TSyn("E2"), TSyn("E"))


def test_contractiveness_rejected():
    env = SynonymEnv()
    env.declare("X", TSyn("X"))
    with pytest.raises(InvalidSynonym):
        env.validate()
    env2 = SynonymEnv()
    env2.declare("A", TSyn("B"))
    env2.declare("B", TSyn("A"))
    with pytest.raises(InvalidSynonym):
        env2.validate()


def test_unbound_synonym_rejected():
    env = SynonymEnv()
    env.declare("A", TList(TSyn("Nowhere")))
    with pytest.raises(UnboundSynonym):
        env.validate()


# ---------------------------------------------------------------------------
# Generated corpus: random guarded synonym environments
# ---------------------------------------------------------------------------

def random_env(rng: random.Random, n_syns=2) -> SynonymEnv:
    names = [f"S{i}" for i in range(n_syns)]

    def leaf():
        pool = BASES + [BOOL, UNIT] + [TSyn(n) for n in names]
        return rng.choice(pool)

    def guarded(depth):
        kind = rng.choice(["sum", "prod", "list", "set", "arrow"])
        sub = (lambda: guarded(depth - 1)) if depth > 1 and rng.random() < 0.4 else leaf
        if kind == "sum":
            return TSum(sub(), sub())
        if kind == "prod":
            return TProd(sub(), sub())
        if kind == "list":
            return TList(sub())
        if kind == "set":
            return TSet(sub())
        return TArrow(sub(), sub())

    env = SynonymEnv()
    for name in names:
        env.declare(name, guarded(2))
    env.validate()
    return env


def subterm_count(env: SynonymEnv) -> int:
    seen = set()

    def walk(t):
        if t in seen:
            return
        seen.add(t)
        if isinstance(t, (TSum, TProd)):
            walk(t.left), walk(t.right)
        elif isinstance(t, TArrow):
            walk(t.dom), walk(t.cod)
        elif isinstance(t, (TList, TBag, TSet)):
            walk(t.elem)
        elif isinstance(t, TSyn):
            walk(env.defs[t.name])

    for name in env.defs:
        walk(TSyn(name))
    return len(seen)


def test_corpus_agreement_and_termination():
    rng = random.Random(12)
    for trial in range(60):
        env = random_env(rng)
        candidates = [TSyn(n) for n in env.defs] + [env.defs[n] for n in env.defs]
        bound = (subterm_count(env) + 4) ** 2
        for t1, t2 in itertools.product(candidates, repeat=2):
            stats = {}
            got = type_eq(env, t1, t2, stats=stats)
            assert got == oracle_eq(env, t1, t2), (env.defs, t1, t2)
            assert stats["assumptions"] <= bound
            stats = {}
            got = is_subtype(env, t1, t2, stats=stats)
            assert got == oracle_subtype(env, t1, t2), (env.defs, t1, t2)
            assert stats["assumptions"] <= bound


def test_type_eq_is_an_equivalence_and_subtype_a_preorder():
    rng = random.Random(7)
    for trial in range(20):
        env = random_env(rng)
        candidates = [TSyn(n) for n in env.defs] + [env.defs[n] for n in env.defs] + BASES
        for t in candidates:
            assert type_eq(env, t, t)
            assert is_subtype(env, t, t)
        for t1, t2 in itertools.product(candidates, repeat=2):
            if type_eq(env, t1, t2):
                assert type_eq(env, t2, t1)
                assert is_subtype(env, t1, t2) and is_subtype(env, t2, t1)
        for t1, t2, t3 in itertools.islice(itertools.product(candidates, repeat=3), 300):
            if type_eq(env, t1, t2) and type_eq(env, t2, t3):
                assert type_eq(env, t1, t3)
            if is_subtype(env, t1, t2) and is_subtype(env, t2, t3):
                assert is_subtype(env, t1, t3)
