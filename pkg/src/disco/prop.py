"""Property-based testing: exhaustive checking when the joint domain is
small, otherwise a deterministic small prefix of the fair enumeration
followed by seeded random sampling.

The deterministic prefix guarantees tiny counterexamples reproduce
independently of the seed; random tuples index the per-binder streams
with geometrically distributed indices.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Optional

from .ast import Expr, Forall
from .enumerate import Enumerator
from .errors import CannotDecide, DiscoError
from .interp import Env, Interpreter
from .types import SynonymEnv, TProd, Type
from .values import PropV


@dataclass
class GenConfig:
    seed: int = 0
    samples: int = 100
    exhaustive_threshold: int = 10_000
    deterministic_prefix: int = 32


@dataclass
class PropSpec:
    kind: str  # 'forall' | 'exists'
    binders: list[tuple[str, Type]]
    body: Expr
    env: Any  # closure environment


CERTAINLY_TRUE = "CertainlyTrue"
POSSIBLY_TRUE = "PossiblyTrue"
CERTAINLY_FALSE = "CertainlyFalse"


@dataclass
class TestResult:
    verdict: str
    checked: int
    counterexample: Optional[list[tuple[str, Any, Type]]] = None
    error: Optional[str] = None
    exhausted: bool = False


def prop_spec_of_value(v) -> PropSpec | None:
    """Flatten a property value (nested foralls join one binder list)."""
    if not isinstance(v, PropV):
        return None
    binders = list(v.binders)
    body = v.body
    while isinstance(body, Forall) and v.kind == "forall":
        binders.extend(body.binders)
        body = body.body
    return PropSpec(v.kind, binders, body, v.env)


def run_test(interp: Interpreter, value, cfg: GenConfig, synenv: SynonymEnv) -> TestResult:
    """Check a test value: a plain boolean is a unit test; a property is
    enumerated or sampled."""
    if isinstance(value, bool):
        verdict = CERTAINLY_TRUE if value else CERTAINLY_FALSE
        return TestResult(verdict, 1, None if value else [], exhausted=True)
    spec = prop_spec_of_value(value)
    if spec is None:
        raise DiscoError("cannot test a value of this kind.")
    return _run_spec(interp, spec, cfg, synenv)


def _run_spec(interp: Interpreter, spec: PropSpec, cfg: GenConfig, synenv: SynonymEnv) -> TestResult:
    if not spec.binders:
        holds, err = _eval_body(interp, spec, [], cfg, synenv)
        if err is not None:
            return TestResult(CERTAINLY_FALSE, 1, [], error=err, exhausted=True)
        verdict = CERTAINLY_TRUE if holds else CERTAINLY_FALSE
        return TestResult(verdict, 1, None if holds else [], exhausted=True)

    enumerator = Enumerator(synenv)
    streams = [enumerator.stream(ty) for _, ty in spec.binders]
    joint_card = 1
    for s in streams:
        joint_card = None if (joint_card is None or s.card is None) else joint_card * s.card

    if spec.kind == "exists" and joint_card is None:
        raise CannotDecide(
            "exists over an infinite domain cannot be decided; test its negation."
        )

    if joint_card is not None and joint_card <= cfg.exhaustive_threshold:
        return _run_exhaustive(interp, spec, cfg, synenv, joint_card)
    return _run_sampled(interp, spec, cfg, synenv, streams)


def _joint_type(binders: list[tuple[str, Type]]) -> Type:
    t = binders[-1][1]
    for _, ty in reversed(binders[:-1]):
        t = TProd(ty, t)
    return t


def _split_joint(value, n: int) -> list:
    out = []
    for _ in range(n - 1):
        out.append(value[0])
        value = value[1]
    out.append(value)
    return out


def _run_exhaustive(interp, spec, cfg, synenv, joint_card) -> TestResult:
    joint = Enumerator(synenv).stream(_joint_type(spec.binders))
    n = len(spec.binders)
    checked = 0
    witness_found = False
    for i in range(joint_card):
        values = _split_joint(joint.get(i), n)
        checked += 1
        holds, err = _eval_body(interp, spec, values, cfg, synenv)
        if err is not None:
            return TestResult(CERTAINLY_FALSE, checked, _bindings(spec, values), error=err, exhausted=True)
        if spec.kind == "forall" and not holds:
            result = TestResult(CERTAINLY_FALSE, checked, _bindings(spec, values), exhausted=True)
            _assert_counterexample(interp, spec, values, cfg, synenv)
            return result
        if spec.kind == "exists" and holds:
            witness_found = True
            break
    if spec.kind == "exists":
        verdict = CERTAINLY_TRUE if witness_found else CERTAINLY_FALSE
        return TestResult(verdict, checked, None if witness_found else [], exhausted=True)
    return TestResult(CERTAINLY_TRUE, checked, None, exhausted=True)


def _run_sampled(interp, spec, cfg, synenv, streams) -> TestResult:
    n = len(spec.binders)
    joint = Enumerator(synenv).stream(_joint_type(spec.binders))
    checked = 0
    rng = random.Random(cfg.seed)
    prefix = min(cfg.deterministic_prefix, cfg.samples)

    def check_one(values) -> TestResult | None:
        nonlocal checked
        checked += 1
        holds, err = _eval_body(interp, spec, values, cfg, synenv)
        if err is not None:
            return TestResult(CERTAINLY_FALSE, checked, _bindings(spec, values), error=err)
        if not holds:
            result = TestResult(CERTAINLY_FALSE, checked, _bindings(spec, values))
            _assert_counterexample(interp, spec, values, cfg, synenv)
            return result
        return None

    for i in range(prefix):
        try:
            values = _split_joint(joint.get(i), n)
        except IndexError:
            break
        failed = check_one(values)
        if failed is not None:
            return failed

    for _ in range(cfg.samples - checked):
        values = []
        for s in streams:
            idx = _geometric(rng)
            if s.card is not None:
                idx %= s.card
            values.append(s.get(idx))
        failed = check_one(values)
        if failed is not None:
            return failed
    return TestResult(POSSIBLY_TRUE, checked, None)


def _geometric(rng: random.Random, p: float = 1 / 32) -> int:
    k = 0
    while rng.random() >= p:
        k += 1
    return k


def _bindings(spec: PropSpec, values: list) -> list[tuple[str, Any, Type]]:
    return [(name, v, ty) for (name, ty), v in zip(spec.binders, values)]


def _eval_body(interp, spec: PropSpec, values: list, cfg, synenv) -> tuple[bool, str | None]:
    """Evaluate the body at one binding; nested property values recurse.

    Runtime errors count as counterexamples, but a wall-clock timeout is
    environmental and must not produce a timing-dependent verdict."""
    from .errors import EvalTimeout

    frame = {name: v for (name, _), v in zip(spec.binders, values)}
    base = spec.env if isinstance(spec.env, Env) else Env({})
    try:
        result = interp.eval(base.child(frame), spec.body)
    except EvalTimeout:
        raise
    except DiscoError as e:
        return False, e.message
    if isinstance(result, PropV):
        inner = _run_spec(interp, prop_spec_of_value(result), cfg, synenv)
        return inner.verdict in (CERTAINLY_TRUE, POSSIBLY_TRUE), None
    return bool(result), None


def _assert_counterexample(interp, spec, values, cfg, synenv) -> None:
    # Soundness check: the reported counterexample really falsifies the body.
    holds, err = _eval_body(interp, spec, values, cfg, synenv)
    if holds and err is None:
        raise AssertionError("reported counterexample does not falsify the property")
