"""Bidirectional type inference with subtype and qualifier constraints,
plus the atomic constraint solver over the numeric lattice.

Constraint generation is syntax-directed; numeric literals get a fresh
variable above ℕ so joins can lift them later. The solver decomposes
structural subtype constraints (instantiating variables against
constructor-headed bounds, with synonym names kept atomic so equirecursion
cannot make instantiation diverge), merges chain variables, collapses
cycles, and assigns every bounded variable the least base satisfying its
lower bounds and qualifiers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import ast
from .ast import (
    AbsOrCard, App, BinOp, BoolLit, Case, CharLit, Comprehension,
    ContainerLit, EllipsisLit, Exists, Filter, Forall, GBool, Generator,
    GOtherwise, GPat, Lambda, Let, LetQual, NatLit, Section, StrLit, Tuple,
    UnitLit, UnOp, Var,
)
from .desugar import desugar_section
from .errors import (
    ArityMismatch, InfiniteType, PatternError, QualifierError, ShapeMismatch,
    UnboundVariable, Unsatisfiable,
)
from .types import (
    BOOL, CHAR, N, PROP, UNIT, Z, F, Q,
    SynonymEnv, TArrow, TBag, TCon, TList, TProd, TSet, TSkolem, TSum, TSyn,
    TVar, Type, free_vars, is_numeric, is_subtype, join_types, lattice_join,
    lattice_leq, lattice_meet, least_base_satisfying, qual_holds, substitute,
)

#: Builtins whose types are overloaded on operand shape; they must be fully
#: applied and are resolved with deferred constraints.
OVERLOADED = {"abs", "floor", "ceiling", "each", "reduce", "list", "bag", "set"}

_CONTAINER_MAKERS = {"list": TList, "bag": TBag, "set": TSet}
_CONTAINER_TYPES = (TList, TBag, TSet)
_CONSTRUCTOR_TYPES = (TSum, TProd, TArrow, TList, TBag, TSet)


@dataclass
class TypeScheme:
    vars: list[str]
    constraints: list
    body: Type

    @staticmethod
    def mono(t: Type) -> "TypeScheme":
        return TypeScheme([], [], t)


@dataclass(frozen=True)
class SubC:
    lhs: Type
    rhs: Type


@dataclass(frozen=True)
class QualC:
    qual: str
    ty: Type


@dataclass
class Deferred:
    kind: str  # 'abs_or_card' | 'floor' | 'ceil' | 'container_map' | 'container_of'
    operand: Type
    payload: tuple
    node: object = None


@dataclass
class Solution:
    subst: dict[str, Type]
    parametric: set[str]
    residual_quals: dict[str, set[str]] = field(default_factory=dict)

    def resolve(self, t: Type) -> Type:
        return substitute(t, self.subst)


def _solver_base_leq(a: TCon, b: TCon) -> bool:
    if a.name in ("N", "Z", "F", "Q") and b.name in ("N", "Z", "F", "Q"):
        return lattice_leq(a, b)
    if a.name == "Bool" and b.name == "Prop":
        return True  # boolean tests are degenerate propositions
    return a.name == b.name


def _solver_join(a: TCon, b: TCon) -> TCon | None:
    if a.name in ("N", "Z", "F", "Q") and b.name in ("N", "Z", "F", "Q"):
        return lattice_join(a, b)
    if {a.name, b.name} == {"Bool", "Prop"}:
        return PROP
    return a if a.name == b.name else None


def qual_on_type(q: str, t: Type, synenv: SynonymEnv) -> bool:
    """Whether a qualifier holds at a type; cmp decomposes structurally
    (arrows never compare). Parametric variables count as satisfiable:
    they can still be instantiated at any qualifying base."""
    assumed: set = set()

    def go(t: Type) -> bool:
        if t in assumed:
            return True
        assumed.add(t)
        if isinstance(t, TVar):
            return True
        t2 = synenv.expand_head(t)
        if t2 in assumed and t2 is not t:
            return True
        assumed.add(t2)
        if isinstance(t2, TCon):
            return qual_holds(q, t2)
        if isinstance(t2, TSkolem):
            return False
        if q != "cmp":
            return False
        if isinstance(t2, TArrow):
            return False
        if isinstance(t2, (TSum, TProd)):
            return go(t2.left) and go(t2.right)
        if isinstance(t2, _CONTAINER_TYPES):
            return go(t2.elem)
        return False

    return go(t)


# ---------------------------------------------------------------------------
# Constraint generation
# ---------------------------------------------------------------------------

class Inferencer:
    """One inference run: owns a variable supply and a constraint store."""

    def __init__(self, ctx: dict[str, TypeScheme], synenv: SynonymEnv):
        self.ctx = ctx
        self.synenv = synenv
        self.constraints: list = []
        self.deferred: list[Deferred] = []
        self.protected: set[str] = set()
        self.arith_patterns: list[tuple[ast.PArith, Type]] = []
        self._supply = 0

    def fresh(self) -> TVar:
        self._supply += 1
        return TVar(f"_t{self._supply}")

    def emit(self, c) -> None:
        self.constraints.append(c)

    def instantiate(self, scheme: TypeScheme) -> Type:
        mapping = {v: self.fresh() for v in scheme.vars}
        for c in scheme.constraints:
            if isinstance(c, SubC):
                self.emit(SubC(substitute(c.lhs, mapping), substitute(c.rhs, mapping)))
            else:
                self.emit(QualC(c.qual, substitute(c.ty, mapping)))
        return substitute(scheme.body, mapping)

    # -- expressions ---------------------------------------------------------

    def infer(self, env: dict[str, Type], e: ast.Expr) -> Type:
        if isinstance(e, Var):
            if e.name in env:
                return env[e.name]
            if e.name in self.ctx:
                return self.instantiate(self.ctx[e.name])
            if e.name in OVERLOADED:
                raise Unsatisfiable(f"the built-in {e.name} must be applied to its arguments.")
            raise UnboundVariable(e.name)
        if isinstance(e, NatLit):
            a = self.fresh()
            self.emit(SubC(N, a))
            return a
        if isinstance(e, CharLit):
            return CHAR
        if isinstance(e, StrLit):
            return TList(CHAR)
        if isinstance(e, UnitLit):
            return UNIT
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, Lambda):
            a = self.fresh()
            body = self.infer({**env, e.var: a}, e.body)
            return TArrow(a, body)
        if isinstance(e, App):
            return self.infer_app(env, e)
        if isinstance(e, BinOp):
            return self.infer_binop(env, e)
        if isinstance(e, UnOp):
            if e.op == "neg":
                g = self.fresh()
                self.emit(SubC(self.infer(env, e.operand), g))
                self.emit(QualC("sub", g))
                return g
            self.check(env, e.operand, BOOL)
            return BOOL
        if isinstance(e, Tuple):
            return self.tuple_type([self.infer(env, item) for item in e.items])
        if isinstance(e, Let):
            inner = dict(env)
            for name, rhs in e.bindings:
                inner[name] = self.infer(inner, rhs)
            return self.infer(inner, e.body)
        if isinstance(e, Case):
            r = self.fresh()
            self.check_case(env, e, r)
            return r
        if isinstance(e, Comprehension):
            return self.infer_comprehension(env, e)
        if isinstance(e, EllipsisLit):
            g = self.fresh()
            self.emit(SubC(self.infer(env, e.first), g))
            if e.second is not None:
                self.emit(SubC(self.infer(env, e.second), g))
            self.emit(SubC(self.infer(env, e.last), g))
            self.emit(QualC("num", g))
            return _CONTAINER_MAKERS[e.kind](g)
        if isinstance(e, ContainerLit):
            g = self.fresh()
            for item in e.items:
                self.emit(SubC(self.infer(env, item), g))
            if e.kind in ("set", "bag"):
                self.emit(QualC("cmp", g))
            return _CONTAINER_MAKERS[e.kind](g)
        if isinstance(e, AbsOrCard):
            op_ty = self.infer(env, e.operand)
            r = self.fresh()
            self.protected.add(r.name)
            self.deferred.append(Deferred("abs_or_card", op_ty, (r,), e))
            return r
        if isinstance(e, (Forall, Exists)):
            inner = dict(env)
            for name, ty in e.binders:
                if free_vars(ty):
                    raise QualifierError("quantifier binders need concrete types.")
                inner[name] = ty
            self.check(inner, e.body, PROP)
            return PROP
        if isinstance(e, Section):
            return self.infer(env, desugar_section(e.op))
        raise TypeError(f"cannot infer type of {e!r}")

    def tuple_type(self, parts: list[Type]) -> Type:
        t = parts[-1]
        for p in reversed(parts[:-1]):
            t = TProd(p, t)
        return t

    def infer_app(self, env: dict[str, Type], e: App) -> Type:
        fn = e.fn
        if (
            isinstance(fn, Var)
            and fn.name in OVERLOADED
            and fn.name not in env
            and fn.name not in self.ctx
        ):
            return self.infer_overloaded(env, fn.name, e.arg)
        fn_ty = self.infer(env, fn)
        arg_ty = self.infer(env, e.arg)
        r = self.fresh()
        self.emit(SubC(fn_ty, TArrow(arg_ty, r)))
        return r

    def infer_overloaded(self, env: dict[str, Type], name: str, arg: ast.Expr) -> Type:
        if name in ("floor", "ceiling"):
            op_ty = self.infer(env, arg)
            self.emit(QualC("num", op_ty))
            r = self.fresh()
            self.protected.add(r.name)
            self.deferred.append(Deferred("floor", op_ty, (r,)))
            return r
        if name == "abs":
            op_ty = self.infer(env, arg)
            r = self.fresh()
            self.protected.add(r.name)
            self.deferred.append(Deferred("abs_or_card", op_ty, (r,)))
            return r
        if name == "each":
            args = self._tuple_args(name, arg, 2)
            f_ty = self.infer(env, args[0])
            c_ty = self.infer(env, args[1])
            a, b, r = self.fresh(), self.fresh(), self.fresh()
            self.protected.add(r.name)
            self.emit(SubC(f_ty, TArrow(a, b)))
            self.deferred.append(Deferred("container_map", c_ty, (a, b, r)))
            return r
        if name == "reduce":
            args = self._tuple_args(name, arg, 3)
            f_ty = self.infer(env, args[0])
            z_ty = self.infer(env, args[1])
            c_ty = self.infer(env, args[2])
            a, b = self.fresh(), self.fresh()
            self.emit(SubC(f_ty, TArrow(a, TArrow(b, b))))
            self.emit(SubC(z_ty, b))
            self.deferred.append(Deferred("container_of", c_ty, (a,)))
            return b
        if name in ("list", "bag", "set"):
            c_ty = self.infer(env, arg)
            a = self.fresh()
            self.deferred.append(Deferred("container_of", c_ty, (a,)))
            if name in ("bag", "set"):
                self.emit(QualC("cmp", a))
            return _CONTAINER_MAKERS[name](a)
        raise TypeError(name)

    def _tuple_args(self, name: str, arg: ast.Expr, n: int) -> list[ast.Expr]:
        if isinstance(arg, Tuple) and len(arg.items) == n:
            return arg.items
        raise ArityMismatch(f"{name} expects {n} arguments.")

    def infer_binop(self, env: dict[str, Type], e: BinOp) -> Type:
        op = e.op
        lt = self.infer(env, e.left)
        if op in ("/\\", "\\/", "==>"):
            self.emit(SubC(lt, BOOL))
            self.check(env, e.right, BOOL)
            return BOOL
        rt = self.infer(env, e.right)
        if op in ("+", "*"):
            return self._numeric(lt, rt, [])
        if op == "-":
            return self._numeric(lt, rt, ["sub"])
        if op == "/":
            return self._numeric(lt, rt, ["div"])
        if op == "mod":
            return self._numeric(lt, rt, [])
        if op == "^":
            g = self.fresh()
            self.emit(SubC(lt, g))
            self.emit(QualC("num", g))
            self.emit(SubC(rt, N))
            return g
        if op in ("==", "/=", "<", "<=", ">", ">="):
            g = self.fresh()
            self.emit(SubC(lt, g))
            self.emit(SubC(rt, g))
            self.emit(QualC("cmp", g))
            return BOOL
        if op == "divides":
            g = self.fresh()
            self.emit(SubC(lt, g))
            self.emit(SubC(rt, g))
            self.emit(QualC("num", g))
            return BOOL
        if op in ("union", "intersect", "\\\\"):
            a = self.fresh()
            self.emit(SubC(lt, TSet(a)))
            self.emit(SubC(rt, TSet(a)))
            self.emit(QualC("cmp", a))
            return TSet(a)
        raise TypeError(f"unknown operator {op!r}")

    def _numeric(self, lt: Type, rt: Type, quals: list[str]) -> Type:
        g = self.fresh()
        self.emit(SubC(lt, g))
        self.emit(SubC(rt, g))
        self.emit(QualC("num", g))
        for q in quals:
            self.emit(QualC(q, g))
        return g

    # -- checking ------------------------------------------------------------

    def check(self, env: dict[str, Type], e: ast.Expr, ty: Type) -> None:
        expanded = self.synenv.expand_head(ty) if isinstance(ty, TSyn) else ty
        if isinstance(e, Lambda) and isinstance(expanded, TArrow):
            self.check({**env, e.var: expanded.dom}, e.body, expanded.cod)
            return
        if isinstance(e, Tuple) and isinstance(expanded, TProd):
            parts = e.items
            t = expanded
            for item in parts[:-1]:
                if not isinstance(t, TProd):
                    break
                self.check(env, item, t.left)
                t = self.synenv.expand_head(t.right) if isinstance(t.right, TSyn) else t.right
            else:
                self.check(env, parts[-1], t)
                return
        if isinstance(e, Let):
            inner = dict(env)
            for name, rhs in e.bindings:
                inner[name] = self.infer(inner, rhs)
            self.check(inner, e.body, ty)
            return
        if isinstance(e, Case):
            self.check_case(env, e, ty)
            return
        inferred = self.infer(env, e)
        self.emit(SubC(inferred, ty))

    def check_case(self, env: dict[str, Type], e: Case, ty: Type) -> None:
        for branch in e.branches:
            inner = dict(env)
            for g in branch.guards:
                if isinstance(g, GBool):
                    self.check(inner, g.cond, BOOL)
                elif isinstance(g, GPat):
                    scr_ty = self.infer(inner, g.scrutinee)
                    inner.update(self.check_pattern(g.pattern, scr_ty))
                elif isinstance(g, GOtherwise):
                    pass
            self.check(inner, branch.body, ty)

    def check_pattern(self, p: ast.Pattern, ty: Type) -> dict[str, Type]:
        from .ast import PArith, PBool, PChar, PInj, PNat, PTuple, PUnit, PVar, PWild

        if isinstance(p, PVar):
            return {p.name: ty}
        if isinstance(p, PWild):
            return {}
        if isinstance(p, PUnit):
            self.emit(SubC(ty, UNIT))
            return {}
        if isinstance(p, PBool):
            self.emit(SubC(ty, BOOL))
            return {}
        if isinstance(p, PChar):
            self.emit(SubC(ty, CHAR))
            return {}
        if isinstance(p, PNat):
            self.emit(QualC("num", ty))
            return {}
        if isinstance(p, PTuple):
            comps = [self.fresh() for _ in p.items]
            self.emit(SubC(ty, self.tuple_type(comps)))
            out: dict[str, Type] = {}
            for item, comp in zip(p.items, comps):
                bound = self.check_pattern(item, comp)
                if out.keys() & bound.keys():
                    raise PatternError("a pattern binds the same variable twice.")
                out.update(bound)
            return out
        if isinstance(p, PInj):
            a, b = self.fresh(), self.fresh()
            self.emit(SubC(ty, TSum(a, b)))
            return self.check_pattern(p.pattern, a if p.side == "left" else b)
        if isinstance(p, PArith):
            self.emit(QualC("num", ty))
            self.arith_patterns.append((p, ty))
            return {p.var: ty}
        raise TypeError(f"unknown pattern {p!r}")

    def infer_comprehension(self, env: dict[str, Type], e: Comprehension) -> Type:
        inner = dict(env)
        for q in e.quals:
            if isinstance(q, Generator):
                src_ty = self.infer(inner, q.source)
                a = self.fresh()
                self.deferred.append(Deferred("container_of", src_ty, (a,)))
                inner[q.var] = a
            elif isinstance(q, Filter):
                self.check(inner, q.cond, BOOL)
            elif isinstance(q, LetQual):
                inner[q.var] = self.infer(inner, q.expr)
        head = self.infer(inner, e.head)
        if e.kind in ("set", "bag"):
            self.emit(QualC("cmp", head))
        return _CONTAINER_MAKERS[e.kind](head)

    # -- post-solve annotations -----------------------------------------------

    def annotate(self, solution: Solution) -> None:
        """Fill in arithmetic-pattern types and abs/cardinality choices."""
        for pat, ty in self.arith_patterns:
            resolved = solution.resolve(ty)
            if isinstance(resolved, TSyn):
                resolved = self.synenv.expand_head(resolved)
            if not is_numeric(resolved):
                raise PatternError(
                    "arithmetic patterns need a concrete numeric type."
                )
            pat.var_type = resolved
        for d in self.deferred:
            if d.kind == "abs_or_card" and d.node is not None and d.node.resolved is None:
                d.node.resolved = "abs"


# ---------------------------------------------------------------------------
# The solver
# ---------------------------------------------------------------------------

class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def find(self, x: str) -> str:
        root = x
        while self.parent.get(root, root) != root:
            root = self.parent[root]
        while self.parent.get(x, x) != x:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> str:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
        return rb


def solve(
    constraints: list,
    synenv: SynonymEnv,
    deferred: list[Deferred] | None = None,
    protected: set[str] | None = None,
    fresh=None,
) -> Solution:
    """Solve subtype/qualifier constraints; raises on failure.

    Returns a substitution for every solved variable; variables with no
    bounds (or only cmp qualifiers) stay parametric.
    """
    solver = _Solver(synenv, deferred or [], protected or set(), fresh)
    return solver.run(constraints)


class _Solver:
    def __init__(self, synenv: SynonymEnv, deferred: list[Deferred], protected: set[str], fresh):
        self.synenv = synenv
        self.deferred = list(deferred)
        self.protected = set(protected)
        self.subst: dict[str, Type] = {}
        self._supply = 0
        self._fresh_external = fresh
        self.atomic_subs: list[tuple[Type, Type]] = []
        self.quals: dict[str, set[str]] = {}
        self.var_order: list[str] = []

    def fresh(self) -> TVar:
        if self._fresh_external is not None:
            return self._fresh_external()
        self._supply += 1
        return TVar(f"_s{self._supply}")

    def resolve(self, t: Type) -> Type:
        return substitute(t, self.subst)

    def note_var(self, name: str) -> None:
        if name not in self.quals:
            self.quals[name] = set()
            self.var_order.append(name)

    # -- stage A: decomposition ------------------------------------------------

    def run(self, constraints: list) -> Solution:
        work = list(constraints)
        assumed: set[tuple[Type, Type]] = set()
        self._rounds = 0
        while True:
            self._drain(work, assumed)
            if self.resolve_deferred_shapes(work):
                continue
            if self.default_deferred_shapes(work):
                continue
            break
        for d in self.deferred:
            if d.kind in ("container_of", "container_map"):
                raise Unsatisfiable(
                    "a collection was expected but the type is not a collection."
                )

        self.merge_chains()
        self.collapse_cycles()
        parametric = self.assign()
        self.finish_deferred(parametric)
        self.verify(parametric)
        residual = {v: qs for v, qs in self.quals.items()
                    if self._rep(v) == v and v in parametric and qs}
        return Solution(self.subst, parametric, residual)

    def _drain(self, work: list, assumed: set) -> None:
        while work:
            self._rounds += 1
            if self._rounds > 200_000:
                raise Unsatisfiable("constraint solving did not terminate.")
            c = work.pop()
            if isinstance(c, QualC):
                self.process_qual(c, work)
            else:
                self.process_sub(c, work, assumed)

    def process_qual(self, c: QualC, work: list) -> None:
        t = self.resolve(c.ty)
        if isinstance(t, TVar):
            self.note_var(t.name)
            self.quals[t.name].add(c.qual)
            return
        if isinstance(t, TSyn):
            t = self.synenv.expand_head(t)
        if isinstance(t, TCon):
            if not qual_holds(c.qual, t):
                raise QualifierError(self._qual_message(c.qual, t))
            return
        if isinstance(t, TSkolem):
            raise QualifierError(
                f"the type variable {t.name} does not support this operation."
            )
        if c.qual == "cmp":
            if isinstance(t, TArrow):
                raise QualifierError("functions cannot be compared.")
            if isinstance(t, (TSum, TProd)):
                work.append(QualC("cmp", t.left))
                work.append(QualC("cmp", t.right))
                return
            if isinstance(t, _CONTAINER_TYPES):
                work.append(QualC("cmp", t.elem))
                return
        raise QualifierError(self._qual_message(c.qual, t))

    @staticmethod
    def _qual_message(q: str, t) -> str:
        names = {"num": "arithmetic", "sub": "subtraction", "div": "division",
                 "cmp": "comparison"}
        return f"the type {_show_type(t)} does not support {names[q]}."

    def process_sub(self, c: SubC, work: list, assumed: set) -> None:
        l = self.resolve(c.lhs)
        r = self.resolve(c.rhs)
        if l == r:
            return
        lv, rv = isinstance(l, TVar), isinstance(r, TVar)
        if lv and rv:
            self.note_var(l.name)
            self.note_var(r.name)
            self.atomic_subs.append((l, r))
            return
        if lv or rv:
            other = r if lv else l
            if isinstance(other, _CONSTRUCTOR_TYPES):
                var = l if lv else r
                self.instantiate_shape(var, other, work)
                work.append(SubC(l, r))
                return
            # base, skolem, or synonym bound: atomic
            var = l if lv else r
            self.note_var(var.name)
            self.atomic_subs.append((l, r))
            return
        key = (l, r)
        if key in assumed:
            return
        assumed.add(key)
        le = self.synenv.expand_head(l)
        re_ = self.synenv.expand_head(r)
        if isinstance(le, TCon) and isinstance(re_, TCon):
            if not _solver_base_leq(le, re_):
                self._base_failure(le, re_)
            return
        if isinstance(le, TSkolem) or isinstance(re_, TSkolem):
            if le == re_:
                return
            raise Unsatisfiable(self._not_subtype_message(l, r))
        if type(le) is not type(re_):
            raise ShapeMismatch()
        if isinstance(le, (TSum, TProd)):
            work.append(SubC(le.left, re_.left))
            work.append(SubC(le.right, re_.right))
            return
        if isinstance(le, TArrow):
            work.append(SubC(re_.dom, le.dom))
            work.append(SubC(le.cod, re_.cod))
            return
        if isinstance(le, _CONTAINER_TYPES):
            work.append(SubC(le.elem, re_.elem))
            return
        raise ShapeMismatch()

    def _base_failure(self, l: TCon, r: TCon) -> None:
        if is_numeric(l) != is_numeric(r):
            raise ShapeMismatch()
        raise Unsatisfiable(self._not_subtype_message(l, r))

    @staticmethod
    def _not_subtype_message(l, r) -> str:
        return f"{_show_type(l)} is not a subtype of {_show_type(r)}."

    def instantiate_shape(self, var: TVar, shape: Type, work: list) -> None:
        if var.name in free_vars(shape) or var.name in free_vars(self.resolve(shape)):
            raise InfiniteType("cannot construct an infinite type.")
        if isinstance(shape, (TSum, TProd)):
            skeleton = type(shape)(self.fresh(), self.fresh())
        elif isinstance(shape, TArrow):
            skeleton = TArrow(self.fresh(), self.fresh())
        else:
            skeleton = type(shape)(self.fresh())
        self.subst[var.name] = skeleton
        # qualifiers recorded while this was a bare variable now apply to
        # the skeleton; re-decompose them (clear but keep the key so the
        # variable-order bookkeeping stays stable)
        if var.name in self.quals:
            pending = sorted(self.quals[var.name])
            self.quals[var.name] = set()
            for q in pending:
                work.append(QualC(q, skeleton))
        self._requeue_atomics(work)

    def _requeue_atomics(self, work: list) -> None:
        """A substitution may turn held atomic constraints structural;
        push them back through decomposition."""
        work.extend(SubC(l, r) for l, r in self.atomic_subs)
        self.atomic_subs.clear()

    # -- deferred builtins ------------------------------------------------------

    def resolve_deferred_shapes(self, work: list) -> bool:
        progress = False
        remaining = []
        for d in self.deferred:
            op = self.resolve(d.operand)
            if isinstance(op, TSyn):
                op = self.synenv.expand_head(op)
            if d.kind == "container_of":
                if isinstance(op, _CONTAINER_TYPES):
                    work.append(SubC(op.elem, d.payload[0]))
                    progress = True
                    continue
            elif d.kind == "container_map":
                if isinstance(op, _CONTAINER_TYPES):
                    a, b, r = d.payload
                    work.append(SubC(op.elem, a))
                    if not isinstance(op, TList):
                        work.append(QualC("cmp", b))
                    self._bind_result(r, type(op)(b), work)
                    progress = True
                    continue
            elif d.kind == "abs_or_card":
                if isinstance(op, _CONTAINER_TYPES):
                    if d.node is not None:
                        d.node.resolved = "card"
                    self._bind_result(d.payload[0], N, work)
                    progress = True
                    continue
                if isinstance(op, TCon):
                    if not qual_holds("num", op):
                        raise QualifierError(self._qual_message("num", op))
                    remaining.append(d)
                    continue
            elif d.kind == "floor":
                if isinstance(op, TCon):
                    if not qual_holds("num", op):
                        raise QualifierError(self._qual_message("num", op))
                    remaining.append(d)
                    continue
            remaining.append(d)
        self.deferred = remaining
        return progress

    def default_deferred_shapes(self, work: list) -> bool:
        """Apply defaults for still-unshaped operands: containers default
        to List, abs/cardinality to numeric abs. Returns True when any
        default fired so the fixpoint loop can continue."""
        progress = False
        for d in list(self.deferred):
            op = self.resolve(d.operand)
            if d.kind in ("container_of", "container_map") and isinstance(op, TVar):
                self.subst[op.name] = TList(self.fresh())
                self._requeue_atomics(work)
                progress = True
            elif d.kind == "abs_or_card" and isinstance(op, TVar):
                if "num" not in self.quals.get(op.name, set()):
                    work.append(QualC("num", op))
                    progress = True
        return progress

    def _bind_result(self, r: Type, value: Type, work: list) -> None:
        r = self.resolve(r)
        if isinstance(r, TVar):
            self.subst[r.name] = value
            self._requeue_atomics(work)
        else:
            work.append(SubC(value, r))
            work.append(SubC(r, value))

    def finish_deferred(self, parametric: set[str]) -> None:
        """After assignment, abs/floor results follow from operand bases."""
        pending = [d for d in self.deferred if d.kind in ("abs_or_card", "floor")]
        guard = 0
        while pending:
            guard += 1
            if guard > 1000:
                raise Unsatisfiable("overloaded builtins did not resolve.")
            progress = False
            still = []
            for d in pending:
                op = self.resolve(d.operand)
                if isinstance(op, TSyn):
                    op = self.synenv.expand_head(op)
                if isinstance(op, TVar):
                    if op.name in parametric:
                        self.subst[op.name] = N
                        parametric.discard(op.name)
                        op = N
                    else:
                        still.append(d)
                        continue
                if isinstance(op, _CONTAINER_TYPES) and d.kind == "abs_or_card":
                    if d.node is not None:
                        d.node.resolved = "card"
                    result = N
                elif isinstance(op, TCon) and qual_holds("num", op):
                    if d.kind == "abs_or_card":
                        if d.node is not None:
                            d.node.resolved = "abs"
                        result = lattice_meet(op, F)
                    else:
                        result = lattice_meet(op, Z)
                else:
                    raise QualifierError(self._qual_message("num", op))
                r = self.resolve(d.payload[0])
                if isinstance(r, TVar):
                    self.subst[r.name] = result
                    parametric.discard(r.name)
                elif not is_subtype(self.synenv, result, r):
                    raise Unsatisfiable(self._not_subtype_message(result, r))
                progress = True
            pending = still
            if not progress and pending:
                raise Unsatisfiable("overloaded builtins did not resolve.")
        self.deferred = [d for d in self.deferred if d.kind not in ("abs_or_card", "floor")]

    # -- stage B: the atomic graph ------------------------------------------------

    def _rep(self, name: str) -> str:
        t = self.resolve(TVar(name))
        return t.name if isinstance(t, TVar) else name

    def _atomic_edges(self):
        """Current atomic constraints with substitution applied; drops
        reflexive pairs."""
        out = []
        for l, r in self.atomic_subs:
            l2, r2 = self.resolve(l), self.resolve(r)
            if l2 == r2:
                continue
            out.append((l2, r2))
        return out

    def _live_vars(self) -> list[str]:
        return [v for v in self.var_order
                if isinstance(self.resolve(TVar(v)), TVar)
                and self.resolve(TVar(v)).name == v]

    def merge_chains(self) -> None:
        """Collapse lower-bound-free variables into their unique upper
        bound (and dually for qualifier-free upper-bound-free variables);
        preserves satisfiability exactly because the merged variable can
        always take its bound's value."""
        changed = True
        while changed:
            changed = False
            live = self._live_vars()
            lowers: dict[str, list] = {v: [] for v in live}
            uppers: dict[str, list] = {v: [] for v in live}
            for l, r in self._atomic_edges():
                if isinstance(r, TVar) and r.name in lowers:
                    lowers[r.name].append(l)
                if isinstance(l, TVar) and l.name in uppers:
                    uppers[l.name].append(r)
            for v in live:
                if v in self.protected:
                    continue
                qs = self.quals.get(v, set())
                ups = set(uppers[v])
                downs = set(lowers[v])
                if not downs and len(ups) == 1 and isinstance(next(iter(ups)), (TVar, TSkolem)):
                    target = next(iter(ups))
                    if isinstance(target, TSkolem) and qs:
                        raise QualifierError(
                            f"the type variable {target.name} does not support this operation."
                        )
                    self.subst[v] = target
                    if isinstance(target, TVar):
                        self.note_var(target.name)
                        self.quals.setdefault(target.name, set()).update(qs)
                    changed = True
                    break
                if not ups and not qs and len(downs) == 1 and isinstance(next(iter(downs)), TVar):
                    self.subst[v] = next(iter(downs))
                    changed = True
                    break

    def collapse_cycles(self) -> None:
        """Variables related by a subtype cycle are equal; union them."""
        edges = [(l.name, r.name) for l, r in self._atomic_edges()
                 if isinstance(l, TVar) and isinstance(r, TVar)]
        if not edges:
            return
        graph: dict[str, set[str]] = {}
        for a, b in edges:
            graph.setdefault(a, set()).add(b)
            graph.setdefault(b, set())
        sccs = _tarjan(graph)
        uf = _UnionFind()
        for comp in sccs:
            if len(comp) > 1:
                rep = comp[0]
                for other in comp[1:]:
                    uf.union(other, rep)
        for comp in sccs:
            if len(comp) > 1:
                rep = uf.find(comp[0])
                merged_quals: set[str] = set()
                for v in comp:
                    merged_quals |= self.quals.get(v, set())
                    if v != rep:
                        self.subst[v] = TVar(rep)
                self.note_var(rep)
                self.quals[rep] = self.quals.get(rep, set()) | merged_quals

    # -- stage C: assignment -----------------------------------------------------

    def assign(self) -> set[str]:
        """Topological least assignment: every variable gets the join of
        its (already assigned) lower bounds, lifted to the least base
        satisfying its qualifiers."""
        edges = self._atomic_edges()
        live = self._live_vars()
        liveset = set(live)
        var_edges = [(l.name, r.name) for l, r in edges
                     if isinstance(l, TVar) and isinstance(r, TVar)
                     and l.name in liveset and r.name in liveset]
        order = _topo(live, var_edges)
        concrete_lowers: dict[str, list] = {v: [] for v in live}
        for l, r in edges:
            if isinstance(r, TVar) and r.name in concrete_lowers and not isinstance(l, TVar):
                concrete_lowers[r.name].append(l)
        var_lowers: dict[str, list[str]] = {v: [] for v in live}
        for a, b in var_edges:
            var_lowers[b].append(a)
        concrete_uppers: dict[str, list] = {v: [] for v in live}
        for l, r in edges:
            if isinstance(l, TVar) and l.name in concrete_uppers and not isinstance(r, TVar):
                concrete_uppers[l.name].append(r)

        parametric: set[str] = set()
        for v in order:
            qs = self.quals.get(v, set())
            lows = list(concrete_lowers[v])
            for u in var_lowers[v]:
                t = self.resolve(TVar(u))
                if not isinstance(t, TVar):
                    lows.append(t)
            value = self._solve_one(v, lows, qs)
            if value is None:
                parametric.add(v)
            else:
                self._blame_qualifier_lift(value, lows, qs, concrete_uppers[v])
                self.subst[v] = value
        return parametric

    def _blame_qualifier_lift(self, value, lows, qs, uppers) -> None:
        """When qualifiers lifted a variable past an upper bound that its
        plain lower bounds satisfied, the qualifier is the real error."""
        if not qs or not uppers:
            return
        for up in uppers:
            ue = self.synenv.expand_head(up) if isinstance(up, TSyn) else up
            ve = self.synenv.expand_head(value) if isinstance(value, TSyn) else value
            if not (isinstance(ue, TCon) and isinstance(ve, TCon)):
                continue
            if _solver_base_leq(ve, ue):
                continue
            plain = None
            for t in lows:
                te = self.synenv.expand_head(t) if isinstance(t, TSyn) else t
                if not isinstance(te, TCon):
                    plain = None
                    break
                plain = te if plain is None else _solver_join(plain, te)
            if plain is None or _solver_base_leq(plain, ue):
                bad = next((q for q in sorted(qs) if not qual_holds(q, ue)), None)
                if bad is not None:
                    raise QualifierError(self._qual_message(bad, ue))

    def _solve_one(self, v: str, lows: list, qs: set[str]):
        skolems = [t for t in lows if isinstance(t, TSkolem)]
        if skolems:
            first = skolems[0]
            for s in skolems[1:]:
                if s != first:
                    raise Unsatisfiable(
                        f"the type variables {first.name} and {s.name} cannot be identified."
                    )
            if any(not isinstance(t, TSkolem) for t in lows):
                raise Unsatisfiable(
                    "the declared type is more general than the definition allows."
                )
            if qs:
                raise QualifierError(
                    f"the type variable {first.name} does not support this operation."
                )
            return first
        if not lows:
            if not qs or qs <= {"cmp"}:
                return None
            value = least_base_satisfying(None, qs)
            if value is None:
                raise QualifierError("no type satisfies these operations together.")
            return value
        # join all concrete lower bounds
        current = lows[0]
        for t in lows[1:]:
            current = self._join2(current, t)
        expanded = self.synenv.expand_head(current) if isinstance(current, TSyn) else current
        if isinstance(expanded, TCon):
            value = least_base_satisfying(expanded, qs)
            if value is None:
                raise QualifierError(self._qual_message(sorted(qs)[0], expanded))
            return value
        for q in qs:
            if not qual_on_type(q, current, self.synenv):
                raise QualifierError(self._qual_message(q, current))
        return current

    def _join2(self, a: Type, b: Type) -> Type:
        ea = self.synenv.expand_head(a) if isinstance(a, TSyn) else a
        eb = self.synenv.expand_head(b) if isinstance(b, TSyn) else b
        if isinstance(ea, TCon) and isinstance(eb, TCon):
            j = _solver_join(ea, eb)
            if j is None:
                raise ShapeMismatch()
            return j
        j = join_types(self.synenv, a, b)
        if j is None:
            raise Unsatisfiable(
                f"these types have no common supertype."
            )
        return j

    # -- verification ---------------------------------------------------------

    def verify(self, parametric: set[str]) -> None:
        for l, r in self.atomic_subs:
            l2, r2 = self.resolve(l), self.resolve(r)
            if isinstance(l2, TVar) or isinstance(r2, TVar):
                continue  # parametric side: instantiable as needed
            le = self.synenv.expand_head(l2) if isinstance(l2, TSyn) else l2
            re_ = self.synenv.expand_head(r2) if isinstance(r2, TSyn) else r2
            if isinstance(le, TCon) and isinstance(re_, TCon):
                if not _solver_base_leq(le, re_):
                    self._base_failure(le, re_)
                continue
            if not is_subtype(self.synenv, l2, r2):
                if isinstance(le, TSkolem) or isinstance(re_, TSkolem):
                    raise Unsatisfiable(self._not_subtype_message(l2, r2))
                raise Unsatisfiable(self._not_subtype_message(l2, r2))
        for v, qs in self.quals.items():
            t = self.resolve(TVar(v))
            if isinstance(t, TVar):
                continue
            for q in qs:
                if isinstance(t, TCon):
                    if not qual_holds(q, t):
                        raise QualifierError(self._qual_message(q, t))
                elif not qual_on_type(q, t, self.synenv):
                    raise QualifierError(self._qual_message(q, t))


def _show_type(t: Type) -> str:
    """Render a type for an error message, internal variables renamed."""
    from .pretty import pretty_type

    user_names = {n for n in free_vars(t) if not n.startswith("_")}
    rename: dict[str, Type] = {}
    i = 0
    for name in sorted(free_vars(t)):
        if name.startswith("_"):
            while _DISPLAY_NAMES[i % 26] in user_names:
                i += 1
            rename[name] = TVar(_DISPLAY_NAMES[i % 26])
            i += 1
    return pretty_type(substitute(t, rename))


def _tarjan(graph: dict[str, set[str]]) -> list[list[str]]:
    """Iterative Tarjan SCC; deterministic over insertion order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = [0]

    for start in graph:
        if start in index:
            continue
        frames = [(start, iter(sorted(graph.get(start, ()))))]
        index[start] = low[start] = counter[0]
        counter[0] += 1
        stack.append(start)
        on_stack.add(start)
        while frames:
            node, it = frames[-1]
            advanced = False
            for child in it:
                if child not in index:
                    index[child] = low[child] = counter[0]
                    counter[0] += 1
                    stack.append(child)
                    on_stack.add(child)
                    frames.append((child, iter(sorted(graph.get(child, ())))))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            frames.pop()
            if frames:
                parent = frames[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(sorted(comp))
    return sccs


def _topo(nodes: list[str], edges: list[tuple[str, str]]) -> list[str]:
    """Kahn topological order, lower bounds first; input order breaks ties."""
    nodeset = set(nodes)
    incoming: dict[str, set[str]] = {v: set() for v in nodes}
    outgoing: dict[str, set[str]] = {v: set() for v in nodes}
    for a, b in edges:
        if a in nodeset and b in nodeset and a != b:
            incoming[b].add(a)
            outgoing[a].add(b)
    ready = [v for v in nodes if not incoming[v]]
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for w in sorted(outgoing[v]):
            incoming[w].discard(v)
            if not incoming[w]:
                ready.append(w)
    for v in nodes:
        if v not in order:
            order.append(v)  # leftover cycles (already collapsed) or stragglers
    return order


# ---------------------------------------------------------------------------
# Schemes: generalize, skolemize, monomorphize
# ---------------------------------------------------------------------------

def generalize(ty: Type, solution: Solution) -> TypeScheme:
    body = solution.resolve(ty)
    vars_in_order: list[str] = []

    def walk(t: Type):
        if isinstance(t, TVar):
            if t.name not in vars_in_order:
                vars_in_order.append(t.name)
        elif isinstance(t, (TSum, TProd)):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, TArrow):
            walk(t.dom)
            walk(t.cod)
        elif isinstance(t, _CONTAINER_TYPES):
            walk(t.elem)

    walk(body)
    constraints = []
    for v in vars_in_order:
        for q in sorted(solution.residual_quals.get(v, ())):
            constraints.append(QualC(q, TVar(v)))
    return TypeScheme(vars_in_order, constraints, body)


def skolemize(scheme: TypeScheme) -> tuple[Type, list]:
    """Rigidify a declared scheme's variables for checking its body."""
    mapping = {v: TSkolem(v) for v in scheme.vars}
    constraints = []
    for c in scheme.constraints:
        if isinstance(c, SubC):
            constraints.append(SubC(substitute(c.lhs, mapping), substitute(c.rhs, mapping)))
        else:
            constraints.append(QualC(c.qual, substitute(c.ty, mapping)))
    return substitute(scheme.body, mapping), constraints


def scheme_from_signature(ty: Type) -> TypeScheme:
    """Quantify the free type variables of a written signature."""
    vars_in_order: list[str] = []

    def walk(t: Type):
        if isinstance(t, TVar):
            if t.name not in vars_in_order:
                vars_in_order.append(t.name)
        elif isinstance(t, (TSum, TProd)):
            walk(t.left)
            walk(t.right)
        elif isinstance(t, TArrow):
            walk(t.dom)
            walk(t.cod)
        elif isinstance(t, _CONTAINER_TYPES):
            walk(t.elem)

    walk(ty)
    return TypeScheme(vars_in_order, [], ty)


_DISPLAY_NAMES = "abcdefghijklmnopqrstuvwxyz"


def monomorphize(scheme: TypeScheme) -> Type:
    """Instantiate each constrained variable at the least base satisfying
    its constraints; unconstrained variables stay, renamed a, b, c, ...
    """
    lowers: dict[str, list] = {v: [] for v in scheme.vars}
    uppers: dict[str, list] = {v: [] for v in scheme.vars}
    quals: dict[str, set[str]] = {v: set() for v in scheme.vars}
    for c in scheme.constraints:
        if isinstance(c, QualC) and isinstance(c.ty, TVar):
            quals[c.ty.name].add(c.qual)
        elif isinstance(c, SubC):
            if isinstance(c.rhs, TVar) and isinstance(c.lhs, TCon):
                lowers[c.rhs.name].append(c.lhs)
            if isinstance(c.lhs, TVar) and isinstance(c.rhs, TCon):
                uppers[c.lhs.name].append(c.rhs)

    subst: dict[str, Type] = {}
    for v in scheme.vars:
        effective_quals = quals[v] - {"cmp"} if not lowers[v] and not uppers[v] else quals[v]
        if not lowers[v] and not uppers[v] and not effective_quals:
            continue
        candidates = [b for b in (N, Z, F, Q)
                      if all(lattice_leq(lo, b) for lo in lowers[v] if is_numeric(lo))
                      and all(lattice_leq(b, up) for up in uppers[v] if is_numeric(up))
                      and all(qual_holds(q, b) for q in quals[v])]
        non_numeric = [t for t in lowers[v] + uppers[v] if not is_numeric(t)]
        if non_numeric:
            subst[v] = non_numeric[0]
            continue
        best = None
        for b in candidates:
            if best is None or lattice_leq(b, best):
                best = b
        if best is not None:
            subst[v] = best

    body = substitute(scheme.body, subst)
    remaining = [v for v in scheme.vars if v not in subst and v in free_vars(body)]
    rename: dict[str, Type] = {}
    taken = set()
    for v in remaining:
        if len(v) == 1 and v.isalpha() and v not in taken:
            rename[v] = TVar(v)
            taken.add(v)
    i = 0
    for v in remaining:
        if v in rename:
            continue
        while i < len(_DISPLAY_NAMES) and _DISPLAY_NAMES[i] in taken:
            i += 1
        fresh_name = _DISPLAY_NAMES[i] if i < len(_DISPLAY_NAMES) else f"a{i}"
        taken.add(fresh_name)
        i += 1
        rename[v] = TVar(fresh_name)
    return substitute(body, rename)
