from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disco.ast import (
    App, BinOp, Case, DefClause, Lambda, NatLit, PArith, PNat, PTuple, PVar,
    StrLit, Tuple, TypeSig, TypeSynonym, UnOp, Var, Command,
)
from disco.errors import ParseError
from disco.parser import (
    expr_to_pattern, parse_expr_text, parse_module, parse_repl_input,
    parse_type_text, resolve_juxtaposition,
)
from disco.pretty import pretty_expr, pretty_type
from disco.types import N, TArrow, TProd, TSum, TSyn, UNIT
from disco.ops import BINOPS


# ---------------------------------------------------------------------------
# Juxtaposition
# ---------------------------------------------------------------------------

def test_numeric_literal_juxtaposition_is_multiplication():
    assert parse_expr_text("2x") == BinOp("*", NatLit(2), Var("x"))


def test_name_juxtaposition_is_application():
    assert parse_expr_text("f(3)") == App(Var("f"), NatLit(3))
    assert parse_expr_text("x(y+2)") == App(Var("x"), BinOp("+", Var("y"), NatLit(2)))


def test_parenthesized_operator_juxtaposition_is_multiplication():
    e = parse_expr_text("(n+1)(n+2)")
    assert isinstance(e, BinOp) and e.op == "*"


def test_parenthesized_lambda_juxtaposition_is_application():
    e = parse_expr_text("(\\x. x - 2) (5/2)")
    assert isinstance(e, App) and isinstance(e.fn, Lambda)


def test_resolve_juxtaposition_is_pure_in_lhs_shape():
    rhs = Var("y")
    assert resolve_juxtaposition(NatLit(2), False, rhs) == BinOp("*", NatLit(2), rhs)
    assert resolve_juxtaposition(NatLit(2), True, rhs) == App(NatLit(2), rhs)
    assert resolve_juxtaposition(BinOp("+", Var("a"), Var("b")), True, rhs) == BinOp(
        "*", BinOp("+", Var("a"), Var("b")), rhs)
    assert resolve_juxtaposition(Var("f"), False, rhs) == App(Var("f"), rhs)
    assert resolve_juxtaposition(Lambda("x", Var("x")), True, rhs) == App(
        Lambda("x", Var("x")), rhs)


# ---------------------------------------------------------------------------
# Precedence
# ---------------------------------------------------------------------------

def test_plus_is_level_seven_left_associative():
    assert BINOPS["+"].prec == 7
    assert BINOPS["+"].assoc == "left"
    assert parse_expr_text("1 - 2 + 3") == BinOp(
        "+", BinOp("-", NatLit(1), NatLit(2)), NatLit(3))


def test_multiplication_tighter_than_comparison():
    e = parse_expr_text("2 * g divides b")
    assert e == BinOp("divides", BinOp("*", NatLit(2), Var("g")), Var("b"))


def test_unary_minus_binds_tighter_than_division():
    e = parse_expr_text("-2/3")
    assert e == BinOp("/", UnOp("neg", NatLit(2)), NatLit(3))


def test_power_right_associative_and_tighter_than_unary_minus():
    assert parse_expr_text("2^3^2") == BinOp("^", NatLit(2), BinOp("^", NatLit(3), NatLit(2)))
    assert parse_expr_text("-x^2") == UnOp("neg", BinOp("^", Var("x"), NatLit(2)))


def test_comparisons_do_not_chain():
    with pytest.raises(ParseError):
        parse_expr_text("1 < 2 < 3")


def test_logical_precedences():
    e = parse_expr_text("a /\\ b \\/ c ==> d")
    assert e.op == "==>"
    assert e.left.op == "\\/"
    assert e.left.left.op == "/\\"


# ---------------------------------------------------------------------------
# Synonym-insensitivity
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("a,b", [
    ("p /\\ q", "p ∧ q"),
    ("p && q", "p and q"),
    ("p \\/ q", "p or q"),
    ("not p", "¬p"),
    ("a <= b", "a ≤ b"),
    ("a /= b", "a ≠ b"),
    ("\\x. x", "λx. x"),
    ("forall n:N. n >= 0", "∀n:Nat. n ≥ 0"),
])
def test_spelling_synonyms_parse_identically(a, b):
    assert parse_expr_text(a) == parse_expr_text(b)


@pytest.mark.parametrize("a,b", [
    ("N * N -> N", "ℕ × ℕ → ℕ"),
    ("Natural", "Nat"),
    ("Z", "Integer"),
    ("F -> Q", "Frac -> Rational"),
])
def test_type_spelling_synonyms(a, b):
    assert parse_type_text(a) == parse_type_text(b)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

def test_signature_type_shapes():
    assert parse_type_text("N * N -> N") == TArrow(TProd(N, N), N)
    assert parse_type_text("Unit + BT*BT") == TSum(UNIT, TProd(TSyn("BT"), TSyn("BT")))


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

def test_arithmetic_pattern_forms():
    p = expr_to_pattern(parse_expr_text("2n"))
    assert p == PArith("n", Fraction(2), Fraction(0), parse_expr_text("2n"))
    p = expr_to_pattern(parse_expr_text("2n+1"))
    assert (p.coeff, p.offset) == (Fraction(2), Fraction(1))
    p = expr_to_pattern(parse_expr_text("n-3"))
    assert (p.coeff, p.offset) == (Fraction(1), Fraction(-3))
    p = expr_to_pattern(parse_expr_text("n/2"))
    assert (p.coeff, p.offset) == (Fraction(1, 2), Fraction(0))


def test_pattern_rejects_nonlinear_and_two_variable_forms():
    with pytest.raises(ParseError):
        expr_to_pattern(parse_expr_text("n*n"))
    with pytest.raises(ParseError):
        expr_to_pattern(parse_expr_text("n+m"))
    with pytest.raises(ParseError):
        expr_to_pattern(parse_expr_text("0*n"))


def test_structural_patterns():
    assert expr_to_pattern(parse_expr_text("(a, 0)")) == PTuple([PVar("a"), PNat(0)])
    p = expr_to_pattern(parse_expr_text("right(l, r)"))
    assert p.side == "right" and p.pattern == PTuple([PVar("l"), PVar("r")])


# ---------------------------------------------------------------------------
# Modules
# ---------------------------------------------------------------------------

GCD = """\
||| The greatest common divisor.
!!! gcd(7,6) == 1
gcd : N * N -> N
gcd(a, 0) = a
gcd(a, b) = gcd(b, a mod b)
"""


def test_module_parses_signature_and_clauses():
    mod = parse_module(GCD)
    sigs = [d for d in mod.decls if isinstance(d, TypeSig)]
    clauses = [d for d in mod.decls if isinstance(d, DefClause)]
    assert len(sigs) == 1 and sigs[0].name == "gcd"
    assert len(clauses) == 2
    assert all(c.name == "gcd" for c in clauses)


def test_missing_signature_is_a_parse_error():
    with pytest.raises(ParseError, match="missing type signature"):
        parse_module("f(x) = x\n")


def test_duplicate_signature_rejected():
    with pytest.raises(ParseError):
        parse_module("f : N -> N\nf : N -> N\nf(x) = x\n")


def test_clause_arity_mismatch_rejected():
    with pytest.raises(ParseError):
        parse_module("f : N -> N -> N\nf(x)(y) = x\nf(x) = x\n")


def test_type_synonym_declaration():
    mod = parse_module("type BT = Unit + BT*BT\n")
    assert mod.decls == [TypeSynonym("BT", TSum(UNIT, TProd(TSyn("BT"), TSyn("BT"))))]


def test_multiline_clause_bodies_by_indentation():
    mod = parse_module(
        "f : N -> N\n"
        "f(n) = {? 1 if n > 5,\n"
        "          2 otherwise\n"
        "       ?}\n"
    )
    clause = [d for d in mod.decls if isinstance(d, DefClause)][0]
    assert isinstance(clause.body, Case)


# ---------------------------------------------------------------------------
# REPL input
# ---------------------------------------------------------------------------

def test_repl_commands():
    cmd = parse_repl_input(":type -3")
    assert cmd == Command("type", UnOp("neg", NatLit(3)))
    assert parse_repl_input(":doc +") == Command("doc", "+")
    assert isinstance(parse_repl_input("x + 3"), BinOp)


def test_repl_rejects_definitions_with_guidance():
    with pytest.raises(ParseError, match=":load"):
        parse_repl_input("x = 3")
    with pytest.raises(ParseError, match=":load"):
        parse_repl_input("f : N -> N")


# ---------------------------------------------------------------------------
# Round-trip: parse(pretty(e)) == e
# ---------------------------------------------------------------------------

_names = st.sampled_from(["x", "y", "zOrder'", "f2"])
_ops = st.sampled_from(["+", "-", "*", "/", "==", "/\\", "\\/", "divides", "^", "mod"])


def _exprs(depth):
    if depth == 0:
        return st.one_of(
            _names.map(Var),
            st.integers(0, 99).map(NatLit),
            st.sampled_from(["hi", "a b"]).map(StrLit),
        )
    sub = _exprs(depth - 1)
    return st.one_of(
        sub,
        st.tuples(_ops, sub, sub).map(lambda t: BinOp(t[0], t[1], t[2])),
        sub.map(lambda e: UnOp("neg", e)),
        st.tuples(_names, sub).map(lambda t: Lambda(t[0], t[1])),
        st.tuples(_names.map(Var), sub).map(lambda t: App(t[0], t[1])),
        st.lists(sub, min_size=2, max_size=3).map(Tuple),
    )


@given(_exprs(3))
@settings(max_examples=300, deadline=None)
def test_parse_pretty_roundtrip(e):
    assert parse_expr_text(pretty_expr(e, unicode=True)) == e
    assert parse_expr_text(pretty_expr(e, unicode=False)) == e


@given(_exprs(2))
@settings(max_examples=100, deadline=None)
def test_case_guard_roundtrip(e):
    src = pretty_expr(e)
    wrapped = f"{{? {src} if {src} is 2n+1, 0 otherwise ?}}"
    again = pretty_expr(parse_expr_text(wrapped))
    assert parse_expr_text(again) == parse_expr_text(wrapped)


from disco.types import BOOL, CHAR, Q as TQ, TBag, TList, TSet, TVar as TV, UNIT as TUNIT
from disco.types import F as TF, Z as TZ


def _types(depth):
    leaves = st.sampled_from([N, TZ, TF, TQ, BOOL, CHAR, TUNIT,
                              TV("a"), TV("b"), TSyn("BT")])
    if depth == 0:
        return leaves
    sub = _types(depth - 1)
    return st.one_of(
        leaves,
        st.tuples(sub, sub).map(lambda t: TSum(*t)),
        st.tuples(sub, sub).map(lambda t: TProd(*t)),
        st.tuples(sub, sub).map(lambda t: TArrow(*t)),
        sub.map(TList),
        sub.map(TSet),
        sub.map(TBag),
    )


@given(_types(3))
@settings(max_examples=300, deadline=None)
def test_type_pretty_roundtrip(t):
    from disco.parser import parse_type_text
    from disco.pretty import pretty_type

    assert parse_type_text(pretty_type(t, unicode=True)) == t
    assert parse_type_text(pretty_type(t, unicode=False)) == t
