"""Module checking: signatures become schemes, clauses desugar to core
bodies checked against their skolemized signatures, and attached tests
typecheck as propositions.

All signatures enter the context before any body is checked, so mutual
recursion needs no special casing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ast import (
    DefClause, DocLines, Expr, Import, SurfaceModule, TestProp, TypeSig,
    TypeSynonym,
)
from .desugar import desugar_definition
from .errors import ImportError_, InvalidSynonym, ParseError
from .infer import (
    Inferencer, SubC, TypeScheme, scheme_from_signature, skolemize, solve,
)
from .types import PROP, SynonymEnv, Type


@dataclass
class CheckedModule:
    sigs: dict[str, TypeScheme]
    synenv: SynonymEnv            # base synonyms plus this module's
    new_synonyms: dict[str, Type]
    defs: dict[str, Expr]         # desugared core bodies, by name
    docs: dict[str, list[str]]
    tests: list[tuple[str, Expr]]
    imports: list[str]
    order: list[str] = field(default_factory=list)


KNOWN_MODULES = {"oeis"}


def check_module(surface: SurfaceModule, base_ctx: dict[str, TypeScheme],
                 base_synenv: SynonymEnv) -> CheckedModule:
    synenv = base_synenv.copy()
    new_synonyms: dict[str, Type] = {}
    for d in surface.decls:
        if isinstance(d, TypeSynonym):
            if d.name in new_synonyms:
                raise InvalidSynonym(f"type {d.name} is declared twice.")
            synenv.declare(d.name, d.type)
            new_synonyms[d.name] = d.type
    synenv.validate()

    imports: list[str] = []
    extra_ctx: dict[str, TypeScheme] = {}
    for d in surface.decls:
        if isinstance(d, Import):
            if d.name not in KNOWN_MODULES:
                raise ImportError_(f"there is no module named {d.name}.")
            imports.append(d.name)
            if d.name == "oeis":
                from .oeis import OEIS_SCHEMES

                extra_ctx.update(OEIS_SCHEMES)

    sigs: dict[str, TypeScheme] = {}
    order: list[str] = []
    for d in surface.decls:
        if isinstance(d, TypeSig):
            synenv._check_bound(d.type)
            sigs[d.name] = scheme_from_signature(d.type)
            order.append(d.name)

    clauses: dict[str, list[DefClause]] = {}
    for d in surface.decls:
        if isinstance(d, DefClause):
            clauses.setdefault(d.name, []).append(d)

    ctx = {**base_ctx, **extra_ctx, **sigs}

    defs: dict[str, Expr] = {}
    for name in order:
        core = desugar_definition(name, clauses[name])
        sk_ty, assumed = skolemize(sigs[name])
        if assumed:
            raise ParseError(f"the signature of {name} carries constraints.")
        engine = Inferencer(ctx, synenv)
        engine.check({}, core, sk_ty)
        solution = solve(engine.constraints, synenv, engine.deferred,
                         engine.protected, engine.fresh)
        engine.annotate(solution)
        defs[name] = core

    docs: dict[str, list[str]] = {}
    tests: list[tuple[str, Expr]] = []
    for d in surface.decls:
        if isinstance(d, DocLines):
            docs.setdefault(d.name, []).extend(d.lines)
        elif isinstance(d, TestProp):
            engine = Inferencer(ctx, synenv)
            t = engine.infer({}, d.expr)
            engine.emit(SubC(t, PROP))
            solution = solve(engine.constraints, synenv, engine.deferred,
                             engine.protected, engine.fresh)
            engine.annotate(solution)
            tests.append((d.name, d.expr))

    return CheckedModule(
        sigs=sigs,
        synenv=synenv,
        new_synonyms=new_synonyms,
        defs=defs,
        docs=docs,
        tests=tests,
        imports=imports,
        order=order,
    )
