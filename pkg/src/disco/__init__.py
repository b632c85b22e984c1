"""Disco: a teaching language for discrete mathematics — interpreter,
REPL, property tester, and session service."""

__version__ = "0.1.0"

from .repl import OutputBlock, ReplConfig, ReplState, transcript  # noqa: F401
