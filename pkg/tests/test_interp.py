import math
import random
from fractions import Fraction

import pytest

from disco.builtins import IMPLS, is_prime_int
from disco.errors import (
    ComparisonOfFunctions, DivisionByZero, NonExhaustiveMatch, RecursionLimit,
)
from disco.interp import Env, Interpreter, match_pattern
from disco.parser import expr_to_pattern, parse_expr_text
from disco.pretty import render_value
from disco.types import N as TN
from disco.types import Q as TQ
from disco.types import F as TF
from disco.types import Z as TZ
from disco.values import (
    UNIT, CollV, InjV, canonical_compare, make_bag, make_list, make_set,
)

from conftest import load_program


def ev(state, src):
    blocks = state.exec_input(src)
    assert blocks[-1].kind == "value", blocks[-1].text
    return blocks[-1].text


# ---------------------------------------------------------------------------
# Core evaluation
# ---------------------------------------------------------------------------

def test_gcd_evaluates(state):
    load_program(state, "gcd.disco")
    assert ev(state, "gcd(7,6)") == "1"
    assert ev(state, "gcd(7,6) == 1") == "true"
    assert ev(state, "gcd(12, 18)") == "6"


def test_lambda_subtraction_on_fraction(state):
    assert ev(state, "(\\x. x - 2) (5/2)") == "1/2"


def test_parity_function_values(state):
    load_program(state, "parity.disco")
    assert ev(state, "f(4)") == "0"
    assert ev(state, "f(13)") == "3"
    assert ev(state, "f(5)") == "13"


def test_exact_arithmetic_never_rounds(state):
    assert ev(state, "1/3 + 1/6") == "1/2"
    assert ev(state, "(2/3) ^ 50 * (3/2) ^ 50") == "1"
    assert ev(state, "10 ^ 30 + 1") == str(10 ** 30 + 1)


# Independent big-rational oracle over raw integer pairs (num, den).

def oracle_norm(n, d):
    g = math.gcd(n, d)
    n, d = n // g, d // g
    if d < 0:
        n, d = -n, -d
    return n, d


def oracle_add(a, b):
    return oracle_norm(a[0] * b[1] + b[0] * a[1], a[1] * b[1])


def oracle_sub(a, b):
    return oracle_norm(a[0] * b[1] - b[0] * a[1], a[1] * b[1])


def oracle_mul(a, b):
    return oracle_norm(a[0] * b[0], a[1] * b[1])


def oracle_div(a, b):
    return oracle_norm(a[0] * b[1], a[1] * b[0])


def test_arithmetic_matches_big_rational_oracle(state):
    rng = random.Random(5)
    for _ in range(200):
        an, ad = rng.randint(-10**12, 10**12), rng.randint(1, 10**9)
        bn, bd = rng.randint(-10**12, 10**12), rng.randint(1, 10**9)
        a, b = f"({an}/{ad})", f"({bn}/{bd})"
        for op, oracle in [("+", oracle_add), ("-", oracle_sub), ("*", oracle_mul),
                           ("/", oracle_div)]:
            if op == "/" and bn == 0:
                continue
            n, d = oracle((an, ad), (bn, bd))
            expected = str(n) if d == 1 else f"{n}/{d}"
            assert ev(state, f"{a} {op} {b}") == expected

        got = Fraction(an, ad)
        assert got.denominator > 0 and math.gcd(got.numerator, got.denominator) == 1


# ---------------------------------------------------------------------------
# Pattern matching
# ---------------------------------------------------------------------------

def arith_pattern(src, ty):
    p = expr_to_pattern(parse_expr_text(src))
    p.var_type = ty
    return p


def test_arithmetic_pattern_examples():
    p = arith_pattern("2n", TN)
    assert match_pattern(p, Fraction(6)) == {"n": Fraction(3)}
    assert match_pattern(p, Fraction(7)) is None

    p = arith_pattern("2n+1", TN)
    assert match_pattern(p, Fraction(7)) == {"n": Fraction(3)}

    p = arith_pattern("n+3", TN)
    assert match_pattern(p, Fraction(2)) is None
    assert match_pattern(p, Fraction(3)) == {"n": Fraction(0)}


def test_arithmetic_pattern_respects_variable_type():
    p = arith_pattern("2n", TZ)
    assert match_pattern(p, Fraction(-6)) == {"n": Fraction(-3)}
    p = arith_pattern("2n", TN)
    assert match_pattern(p, Fraction(-6)) is None
    p = arith_pattern("2n", TQ)
    assert match_pattern(p, Fraction(7)) == {"n": Fraction(7, 2)}
    p = arith_pattern("n/2", TN)
    assert match_pattern(p, Fraction(3, 2)) == {"n": Fraction(3)}
    p = arith_pattern("2n", TF)
    assert match_pattern(p, Fraction(7)) == {"n": Fraction(7, 2)}
    assert match_pattern(p, Fraction(-7)) is None


def test_arithmetic_pattern_soundness_property():
    rng = random.Random(11)
    for _ in range(300):
        coeff = rng.choice([1, 2, 3, 5])
        offset = rng.randint(-5, 5)
        src = f"{coeff}n + {offset}" if offset >= 0 else f"{coeff}n - {-offset}"
        ty = rng.choice([TN, TZ, TF, TQ])
        p = arith_pattern(src, ty)
        if not isinstance(p, type(arith_pattern("2n", ty))):
            continue  # coeff 1, offset 0 reduces to a plain variable pattern
        v = Fraction(rng.randint(-50, 50), rng.randint(1, 10))
        m = match_pattern(p, v)
        if m is not None:
            w = m["n"]
            assert coeff * w + offset == v
            if ty.name in ("N", "Z"):
                assert w.denominator == 1
            if ty.name in ("N", "F"):
                assert w >= 0


def test_structural_patterns_and_case(state):
    load_program(state, "zorder.disco")
    assert ev(state, "zOrder(3, 5)") == "39"
    assert ev(state, "zOrder'(39)") == "(3, 5)"


def test_non_exhaustive_match_is_a_runtime_error(state):
    state.load_source("m.disco", "h : N -> N\nh(2n+1) = n\n")
    blocks = state.exec_input("h(4)")
    assert blocks[-1].kind == "error"
    assert "non-exhaustive" in blocks[-1].doc_url


# ---------------------------------------------------------------------------
# canonical_compare
# ---------------------------------------------------------------------------

def test_canonical_compare_examples():
    assert canonical_compare(Fraction(1, 2), Fraction(2, 3)) == -1
    left_unit = InjV("left", UNIT)
    right_pair = InjV("right", (InjV("left", UNIT), InjV("left", UNIT)))
    assert canonical_compare(left_unit, right_pair) == -1
    s1 = make_set([Fraction(1), Fraction(3)])
    s2 = make_set([Fraction(1), Fraction(2), Fraction(4)])
    assert canonical_compare(s1, s2) == 1


def test_compare_functions_rejected_statically(state):
    blocks = state.exec_input("(\\x. x) == (\\y. y)")
    assert blocks[-1].kind == "error"
    assert "qualifier-error" in blocks[-1].doc_url


def test_compare_functions_raises_at_runtime():
    from disco.values import ClosureV

    with pytest.raises(ComparisonOfFunctions):
        canonical_compare(ClosureV("x", None, None), ClosureV("y", None, None))


def test_bool_char_unit_pair_ordering():
    assert canonical_compare(False, True) == -1
    assert canonical_compare("a", "b") == -1
    assert canonical_compare(UNIT, UNIT) == 0
    assert canonical_compare((Fraction(1), Fraction(5)), (Fraction(1), Fraction(6))) == -1


# ---------------------------------------------------------------------------
# Collections and comprehensions
# ---------------------------------------------------------------------------

def test_set_comprehension_examples(state):
    assert ev(state, "{2x+1 | x in {0 .. 3}}") == "{1, 3, 5, 7}"
    assert ev(state, "{x | x in {1,2,3}, false}") == "{}"


def test_two_generator_comprehension_counts_products(state):
    assert ev(state, "|[ (x, y) | x in [1 .. 4], y in [1 .. 5] ]|") == "20"


def test_set_canonical_form_after_operations(state):
    load_program(state, "gcd.disco")
    sources = [
        "{3, 1, 2, 1}",
        "{1,2,3} union {0, 2, 9}",
        "{1,2,3} intersect {2,3,4}",
        "{1,2,3} \\\\ {2}",
        "set([3,3,1])",
        "each(\\x. gcd(x, 4), {1, 2, 3, 4, 8})",
    ]
    for src in sources:
        blocks = state.exec_input(src)
        # re-evaluate structurally to inspect the value
        from disco.interp import Interpreter

        interp = Interpreter(state.globals)
        v = interp.run(parse_and_check(state, src))
        assert v.kind == "set"
        for _, count in v.items:
            assert count == 1
        for (a, _), (b, _) in zip(v.items, v.items[1:]):
            assert canonical_compare(a, b) == -1


def parse_and_check(state, src):
    expr = parse_repl(src)
    state._typecheck(expr)
    return expr


def parse_repl(src):
    return parse_expr_text(src)


def test_power_set_cardinality_law(state):
    for n in range(0, 11):
        elems = "{" + ", ".join(str(i) for i in range(n)) + "}"
        got = ev(state, f"|power({elems})|")
        assert got == str(2 ** n)


def test_power_set_small_example(state):
    assert ev(state, "power({1,2})") == "{{}, {1}, {1, 2}, {2}}"
    # contents as sets
    interp = Interpreter(state.globals)
    v = IMPLS["power"](interp, make_set([Fraction(1), Fraction(2)]))
    contents = {tuple(x for x, _ in s.items) for s, _ in v.items}
    assert contents == {(), (Fraction(1),), (Fraction(2),), (Fraction(1), Fraction(2))}


def test_each_preserves_list_length(state):
    rng = random.Random(3)
    for _ in range(30):
        xs = [rng.randint(0, 50) for _ in range(rng.randint(0, 12))]
        lit = "[" + ", ".join(map(str, xs)) + "]"
        assert ev(state, f"|each(\\x. x + 1, {lit})|") == str(len(xs))


def test_reduce_is_a_right_fold(state):
    # fold-right shape: subtractions associate to the right
    got = ev(state, "reduce(~-~, 0, [10, 4, 3])")
    ref = Fraction(10) - (Fraction(4) - (Fraction(3) - Fraction(0)))
    assert got == str(ref)


def test_bag_and_conversions(state):
    assert ev(state, "bag([2,1,2])") == "⟅1, 2 # 2⟆"
    assert ev(state, "list(bag([2,1,2]))") == "[1, 2, 2]"
    assert ev(state, "set([2,1,2,1])") == "{1, 2}"
    assert ev(state, "|bag([2,1,2])|") == "3"


# ---------------------------------------------------------------------------
# Builtins
# ---------------------------------------------------------------------------

def trial_division_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def test_isprime_agrees_with_trial_division_to_1000(state):
    for n in range(0, 1000):
        assert is_prime_int(n) == trial_division_prime(n), n


def test_isprime_builtin_at_repl(state):
    assert ev(state, "isPrime(9973)") == "true"
    assert ev(state, "isPrime(9409)") == "false"


def test_divides_and_mod(state):
    assert ev(state, "3 divides 21") == "true"
    assert ev(state, "2 divides 7") == "false"
    assert ev(state, "0 divides 0") == "true"
    assert ev(state, "0 divides 5") == "false"
    assert ev(state, "17 mod 5") == "2"
    blocks = state.exec_input("17 mod 0")
    assert blocks[-1].kind == "error"
    assert "division-by-zero" in blocks[-1].doc_url


def test_division_by_zero(state):
    blocks = state.exec_input("1/0")
    assert blocks[-1].kind == "error"
    assert blocks[-1].text == "Error: division by zero."


def test_min_max_abs_floor_ceiling(state):
    assert ev(state, "min(2/3, 1/2)") == "1/2"
    assert ev(state, "max(-3, 2)") == "2"
    assert ev(state, "abs(-3)") == "3"
    assert ev(state, "|-3|") == "3"
    assert ev(state, "floor(-2/3)") == "-1"
    assert ev(state, "ceiling(-2/3)") == "0"
    assert ev(state, "floor(7/2)") == "3"


# ---------------------------------------------------------------------------
# Value printing (golden formats)
# ---------------------------------------------------------------------------

def test_value_printing_contract(state):
    assert ev(state, "1/2") == "1/2"
    assert ev(state, "{1, 3 .. 7}") == "{1, 3, 5, 7}"
    assert ev(state, "(3, 4)") == "(3, 4)"
    assert ev(state, "left(unit)") == "left(unit)"
    assert ev(state, "(1, 2, 3)") == "(1, 2, 3)"
    assert ev(state, "right((1, 2))") == "right(1, 2)"
    assert ev(state, '"https://oeis.org/A000108"') == '"https://oeis.org/A000108"'
    assert ev(state, "[]") == "[]"
    assert ev(state, "\\x. x") == "<function>"


# ---------------------------------------------------------------------------
# Limits
# ---------------------------------------------------------------------------

def test_huge_integers_render_without_crashing(state):
    # ~4,900 digits: prints in full
    text = state.exec_input("-(2 ^ 4 ^ 7)")[-1].text
    assert text.startswith("-118973149535723176508575932662800713076")
    assert len(text) == 4934
    # ~90,000 digits: abbreviated, never a bare interpreter error
    text = state.exec_input("2 ^ 300000")[-1].text
    assert "digits" in text


def test_resource_caps(state):
    blocks = state.exec_input("[0 .. 10^9]")
    assert blocks[-1].kind == "error"
    assert "resource-limit" in blocks[-1].doc_url
    blocks = state.exec_input("2 ^ (10^9)")
    assert blocks[-1].kind == "error"
    assert "resource-limit" in blocks[-1].doc_url
    # bases with trivial magnitude are exempt, as is big-but-sane arithmetic
    assert state.exec_input("1 ^ (10^9)")[-1].text == "1"
    assert state.exec_input("2 ^ 1000")[-1].kind == "value"


def test_deadline_interrupts_builtin_loops(state):
    import time

    elems = ", ".join(str(i) for i in range(24))
    start = time.monotonic()
    blocks = state.exec_input(f"power({{{elems}}})", deadline=time.monotonic() + 0.5)
    assert blocks[-1].kind == "error"
    assert "recursion-limit" in blocks[-1].doc_url  # timeout renders like it
    assert time.monotonic() - start < 5.0


def test_recursion_limit(state_factory):
    state = state_factory(recursion_limit=500)
    state.load_source("loop.disco", "loop : N -> N\nloop(n) = loop(n + 1)\n")
    blocks = state.exec_input("loop(0)")
    assert blocks[-1].kind == "error"
    assert "recursion-limit" in blocks[-1].doc_url


def test_self_referential_value_definition(state):
    state.load_source("x.disco", "x : N\nx = x + 1\n")
    blocks = state.exec_input("x")
    assert blocks[-1].kind == "error"
