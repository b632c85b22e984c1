"""REPL session state and input execution.

Every piece of output is an OutputBlock (value, type, doc, test-report,
or error); the local loop, the batch checker, and the HTTP session
service all render the same blocks, so transcripts agree byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import Command, Exists, Expr, Forall
from .builtins import (
    BUILTIN_DOCS, OPERATOR_DOCS, OVERLOAD_DOC_TYPES, SCHEMES, builtin_values,
)
from .errors import (
    DiscoError, ParseError, PropNotPrintable, RecursionLimit, UnboundVariable,
)
from .infer import (
    Inferencer, SubC, TypeScheme, generalize, monomorphize, solve,
)
from .interp import Env, EvalServices, Interpreter, Thunk
from .lexer import tokenize
from .modules import check_module
from .oeis import OEIS_DOCS, OEIS_SCHEMES, OeisClient, oeis_builtins
from .ops import BINOPS
from .parser import parse_module, parse_repl_input
from .pretty import pretty_expr, pretty_type, quantifier_echo, render_value
from .prop import (
    CERTAINLY_FALSE, CERTAINLY_TRUE, POSSIBLY_TRUE, GenConfig, TestResult,
    run_test,
)
from .types import PROP, SynonymEnv
from .ast import Lambda


@dataclass
class ReplConfig:
    seed: int = 0
    samples: int = 100
    exhaustive_threshold: int = 10_000
    deterministic_prefix: int = 32
    unicode: bool = True
    offline: bool = False
    recursion_limit: int = 100_000
    oeis_client: Optional[OeisClient] = None

    def gen_config(self) -> GenConfig:
        return GenConfig(
            seed=self.seed,
            samples=max(1, self.samples),
            exhaustive_threshold=self.exhaustive_threshold,
            deterministic_prefix=self.deterministic_prefix,
        )


@dataclass
class OutputBlock:
    kind: str  # 'value' | 'type' | 'doc' | 'test-report' | 'error'
    text: str
    doc_url: Optional[str] = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "text": self.text}
        if self.doc_url is not None:
            out["docURL"] = self.doc_url
        return out


def render_error(err: DiscoError) -> OutputBlock:
    return OutputBlock("error", f"Error: {err.message}", err.url)


def render_block(block: OutputBlock) -> str:
    """Exact printed form of a block, trailing newline included."""
    if block.kind in ("doc", "test-report"):
        out = block.text.rstrip("\n") + "\n"
        if block.doc_url:
            out += "\n" + block.doc_url + "\n"
        return out + "\n"
    out = block.text + "\n"
    if block.doc_url:
        out += block.doc_url + "\n"
    return out


class ReplState:
    def __init__(self, config: ReplConfig | None = None):
        self.config = config or ReplConfig()
        self.synenv = SynonymEnv()
        self.ctx: dict[str, TypeScheme] = dict(SCHEMES)
        self.globals: dict = builtin_values()
        self.docs: dict[str, list[str]] = {}
        self.sig_order: list[str] = []
        self.quit_requested = False
        self._oeis = self.config.oeis_client or OeisClient(offline=self.config.offline)

    # -- execution ----------------------------------------------------------

    def exec_input(self, line: str, deadline: float | None = None) -> list[OutputBlock]:
        if not line.strip():
            return []
        warnings: list[OutputBlock] = []
        try:
            parsed = parse_repl_input(line)
        except DiscoError as e:
            return [render_error(e)]
        except RecursionError:
            return [render_error(RecursionLimit("this input is nested too deeply."))]
        try:
            if isinstance(parsed, Command):
                return self._command(parsed, warnings, deadline)
            return self._expression(parsed, warnings, deadline)
        except DiscoError as e:
            return warnings + [render_error(e)]
        except RecursionError:
            return warnings + [render_error(RecursionLimit("this input is nested too deeply."))]

    def _interp(self, warnings: list[OutputBlock], deadline: float | None) -> Interpreter:
        def warn(err: DiscoError):
            warnings.append(OutputBlock("error", f"Warning: {err.message}", err.url))

        services = EvalServices(
            recursion_limit=self.config.recursion_limit,
            deadline=deadline,
            warn=warn,
        )
        return Interpreter(self.globals, services)

    def _typecheck(self, expr: Expr):
        engine = Inferencer(self.ctx, self.synenv)
        ty = engine.infer({}, expr)
        solution = solve(engine.constraints, self.synenv, engine.deferred,
                         engine.protected, engine.fresh)
        engine.annotate(solution)
        scheme = generalize(ty, solution)
        return monomorphize(scheme)

    def _typecheck_prop(self, expr: Expr) -> None:
        engine = Inferencer(self.ctx, self.synenv)
        ty = engine.infer({}, expr)
        engine.emit(SubC(ty, PROP))
        solution = solve(engine.constraints, self.synenv, engine.deferred,
                         engine.protected, engine.fresh)
        engine.annotate(solution)

    def _expression(self, expr: Expr, warnings, deadline) -> list[OutputBlock]:
        display = self._typecheck(expr)
        if display == PROP:
            raise PropNotPrintable()
        interp = self._interp(warnings, deadline)
        value = interp.run(expr)
        text = render_value(value, display, self.synenv, self.config.unicode)
        return warnings + [OutputBlock("value", text)]

    # -- commands -------------------------------------------------------------

    def _command(self, cmd: Command, warnings, deadline) -> list[OutputBlock]:
        if cmd.name == "type":
            display = self._typecheck(cmd.arg)
            echo = pretty_expr(cmd.arg, self.config.unicode)
            ty = pretty_type(display, self.config.unicode)
            return [OutputBlock("type", f"{echo} : {ty}")]
        if cmd.name == "test":
            self._typecheck_prop(cmd.arg)
            interp = self._interp(warnings, deadline)
            value = interp.run(cmd.arg)
            result = run_test(interp, value, self.config.gen_config(), self.synenv)
            text = self._format_result(cmd.arg, result)
            return warnings + [OutputBlock("test-report", text)]
        if cmd.name == "doc":
            return [self._doc_block(cmd.arg)]
        if cmd.name == "load":
            return self._load_path(cmd.arg, warnings, deadline)
        if cmd.name == "names":
            lines = [f"{name} : {pretty_type(monomorphize(self.ctx[name]), self.config.unicode)}"
                     for name in self.sig_order if name in self.ctx]
            return [OutputBlock("value", "\n".join(lines) if lines else "(no definitions loaded)")]
        if cmd.name == "help":
            return [OutputBlock("value", _HELP_TEXT)]
        if cmd.name == "quit":
            self.quit_requested = True
            return []
        raise ParseError(f"unknown command :{cmd.name}.")

    # -- :doc ----------------------------------------------------------------

    def _doc_block(self, target: str) -> OutputBlock:
        from .errors import DOC_BASE

        target = target.strip()
        toks = tokenize(target)
        if len(toks) == 1 and toks[0].kind == "op" and toks[0].text in OPERATOR_DOCS:
            canon = toks[0].text
            display, ty_text, doc, slug = OPERATOR_DOCS[canon]
            lines = [f"{display} : {self._mode_type(ty_text)}"]
            if canon in BINOPS:
                info = BINOPS[canon]
                assoc = {"left": "left associative", "right": "right associative",
                         "none": "non-associative"}[info.assoc]
                lines.append(f"precedence level {info.prec}, {assoc}")
            lines.append("")
            lines.append(doc)
            return OutputBlock("doc", "\n".join(lines), f"{DOC_BASE}{slug}.html")
        name = target
        if name in self.docs or (name in self.ctx and name in self.sig_order):
            ty = pretty_type(monomorphize(self.ctx[name]), self.config.unicode)
            lines = [f"{name} : {ty}"]
            doc_lines = self.docs.get(name)
            if doc_lines:
                lines.append("")
                lines.extend(doc_lines)
            url = None
            if name in OEIS_DOCS:
                url = f"{DOC_BASE}{OEIS_DOCS[name][1]}.html"
            return OutputBlock("doc", "\n".join(lines), url)
        if name in BUILTIN_DOCS:
            doc, slug = BUILTIN_DOCS[name]
            if name in self.ctx:
                ty_text = pretty_type(monomorphize(self.ctx[name]), self.config.unicode)
            else:
                ty_text = self._mode_type(OVERLOAD_DOC_TYPES.get(name, "?"))
            lines = [f"{name} : {ty_text}", "", doc]
            return OutputBlock("doc", "\n".join(lines), f"{DOC_BASE}{slug}.html")
        if name in OEIS_DOCS and name in self.ctx:
            doc, slug = OEIS_DOCS[name]
            ty_text = pretty_type(monomorphize(self.ctx[name]), self.config.unicode)
            return OutputBlock("doc", "\n".join([f"{name} : {ty_text}", "", doc]),
                               f"{DOC_BASE}{slug}.html")
        raise UnboundVariable(name)

    def _mode_type(self, ty_text: str) -> str:
        if self.config.unicode:
            return ty_text
        table = {"ℕ": "N", "ℤ": "Z", "𝔽": "F", "ℚ": "Q", "×": "*", "→": "->"}
        for k, v in table.items():
            ty_text = ty_text.replace(k, v)
        return ty_text

    # -- :load ----------------------------------------------------------------

    def _load_path(self, path: str, warnings, deadline) -> list[OutputBlock]:
        try:
            with open(path, encoding="utf-8") as f:
                source = f.read()
        except OSError as e:
            raise ParseError(f"cannot open {path}: {e.strerror or e}.")
        return self.load_source(path, source, warnings, deadline)

    def load_source(self, name: str, source: str,
                    warnings: list[OutputBlock] | None = None,
                    deadline: float | None = None) -> list[OutputBlock]:
        """Parse, typecheck, run attached tests, and install. On any error
        prior state stays untouched."""
        warnings = warnings if warnings is not None else []
        surface = parse_module(source)
        checked = check_module(surface, self.ctx, self.synenv)

        new_globals = dict(self.globals)
        if "oeis" in checked.imports:
            new_globals.update(oeis_builtins(self._oeis))
        for def_name, core in checked.defs.items():
            if isinstance(core, Lambda):
                from .values import ClosureV

                new_globals[def_name] = ClosureV(core.var, core.body, Env({}))
            else:
                new_globals[def_name] = Thunk(core)

        new_ctx = dict(self.ctx)
        new_ctx.update({n: checked.sigs[n] for n in checked.order})
        if "oeis" in checked.imports:
            new_ctx.update(OEIS_SCHEMES)

        # run attached tests against the candidate environment
        interp = Interpreter(new_globals, EvalServices(
            recursion_limit=self.config.recursion_limit,
            deadline=deadline,
            warn=lambda err: warnings.append(
                OutputBlock("error", f"Warning: {err.message}", err.url)),
        ))
        results: list[tuple[str, TestResult, Expr]] = []
        for test_name, expr in checked.tests:
            value = interp.run(expr)
            result = run_test(interp, value, self.config.gen_config(), checked.synenv)
            results.append((test_name, result, expr))

        # commit
        self.synenv = checked.synenv
        self.ctx = new_ctx
        self.globals = new_globals
        for n in checked.order:
            if n not in self.sig_order:
                self.sig_order.append(n)
        for doc_name, lines in checked.docs.items():
            self.docs[doc_name] = lines
        if "oeis" in checked.imports:
            for n in OEIS_SCHEMES:
                if n not in self.sig_order:
                    self.sig_order.append(n)
                self.docs.setdefault(n, [OEIS_DOCS[n][0]])

        blocks = list(warnings)
        if results:
            blocks.append(OutputBlock("test-report", self._format_report(results)))
        blocks.append(OutputBlock("value", f"Loaded {name}."))
        return blocks

    # -- test report rendering ---------------------------------------------------

    def _prop_echo(self, expr: Expr) -> str:
        if isinstance(expr, (Forall, Exists)):
            kind = "forall" if isinstance(expr, Forall) else "exists"
            names = [n for n, _ in expr.binders]
            body = expr.body
            while isinstance(body, Forall) and isinstance(expr, Forall):
                names.extend(n for n, _ in body.binders)
                body = body.body
            return quantifier_echo(kind, names, body, self.config.unicode)
        return pretty_expr(expr, self.config.unicode)

    def _format_result(self, expr: Expr, result: TestResult) -> str:
        echo = self._prop_echo(expr)
        verdicts = {
            CERTAINLY_TRUE: "Certainly true",
            POSSIBLY_TRUE: "Possibly true",
            CERTAINLY_FALSE: "Certainly false",
        }
        lines = [f"  - {verdicts[result.verdict]}: {echo}"]
        if result.verdict == POSSIBLY_TRUE:
            lines.append(
                f"    Checked {result.checked} possibilities without finding a counterexample."
            )
        elif result.verdict == CERTAINLY_FALSE:
            if result.error is not None:
                lines.append(f"    Evaluation error: {result.error}")
            if result.counterexample:
                lines.append("    Counterexample:")
                for bname, bval, bty in result.counterexample:
                    rendered = render_value(bval, bty, self.synenv, self.config.unicode)
                    lines.append(f"      {bname} = {rendered}")
        return "\n".join(lines)

    def _format_report(self, results: list[tuple[str, TestResult, Expr]]) -> str:
        grouped: dict[str, list[tuple[TestResult, Expr]]] = {}
        order: list[str] = []
        for name, result, expr in results:
            if name not in grouped:
                grouped[name] = []
                order.append(name)
            grouped[name].append((result, expr))
        chunks = []
        for name in order:
            lines = [f"  {name}:"]
            for result, expr in grouped[name]:
                lines.append(self._format_result(expr, result))
            chunks.append("\n".join(lines))
        return "\n".join(chunks)


_HELP_TEXT = """\
Commands:
  <expression>        evaluate an expression
  :type <expression>  show the type of an expression
  :doc <name>         documentation for a name or operator
  :test <property>    check a property
  :load <file>        load a .disco file (typechecks and runs its tests)
  :names              list loaded definitions
  :help               this message
  :quit               leave the REPL"""


def transcript(state: ReplState, lines: list[str]) -> str:
    """Simulate an interactive session byte for byte."""
    parts = []
    for line in lines:
        parts.append(f"Disco> {line}\n")
        for block in state.exec_input(line):
            parts.append(render_block(block))
    return "".join(parts)
