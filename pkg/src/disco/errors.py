"""Error classes shared by every stage, each tied to a documentation URL.

Every user-facing failure renders as a one-line message plus a link into
the online reference; the slug is fixed per error class.
"""

from __future__ import annotations

DOC_BASE = "https://disco-lang.readthedocs.io/en/latest/reference/"


class DiscoError(Exception):
    """Base class for all language-level errors."""

    slug = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message

    @property
    def url(self) -> str:
        return f"{DOC_BASE}{self.slug}.html"


class LexError(DiscoError):
    slug = "parse"

    def __init__(self, message: str, span: tuple[int, int] = (0, 0)):
        super().__init__(message)
        self.span = span


class ParseError(DiscoError):
    slug = "parse"

    def __init__(self, message: str, span: tuple[int, int] = (0, 0)):
        super().__init__(message)
        self.span = span


class UnboundVariable(DiscoError):
    slug = "unbound"

    def __init__(self, name: str):
        super().__init__(f"there is nothing named {name}.")
        self.name = name


class UnboundSynonym(DiscoError):
    slug = "unbound-synonym"


class InvalidSynonym(DiscoError):
    # Raised for unguarded cycles like `type X = X`.
    slug = "invalid-synonym"


class ShapeMismatch(DiscoError):
    slug = "shape-mismatch"

    def __init__(self, message: str = "the shape of two types does not match."):
        super().__init__(message)


class QualifierError(DiscoError):
    slug = "qualifier-error"


class Unsatisfiable(DiscoError):
    slug = "not-subtype"


class InfiniteType(DiscoError):
    slug = "infinite-type"


class ArityMismatch(DiscoError):
    slug = "arity-mismatch"


class PatternError(DiscoError):
    # Arithmetic patterns outside the linear forms, or at a non-numeric type.
    slug = "arith-pattern"


class DivisionByZero(DiscoError):
    slug = "division-by-zero"

    def __init__(self, message: str = "division by zero."):
        super().__init__(message)


class NonExhaustiveMatch(DiscoError):
    slug = "non-exhaustive"

    def __init__(self, message: str = "no pattern matched the given input."):
        super().__init__(message)


class ComparisonOfFunctions(DiscoError):
    slug = "compare-functions"

    def __init__(self, message: str = "functions cannot be compared."):
        super().__init__(message)


class RecursionLimit(DiscoError):
    slug = "recursion-limit"


class EvalTimeout(RecursionLimit):
    # Rendered like a recursion-limit error; used by the session service.
    slug = "recursion-limit"


class ZeroStride(DiscoError):
    slug = "zero-stride"


class ResourceLimit(DiscoError):
    # A single operation would materialize an unreasonably large value.
    slug = "resource-limit"


class CannotEnumerate(DiscoError):
    slug = "cannot-enumerate"


class CannotDecide(DiscoError):
    slug = "cannot-decide"


class NetworkError(DiscoError):
    slug = "network"


class PropNotPrintable(DiscoError):
    slug = "prop"

    def __init__(self, message: str = "propositions cannot be evaluated directly; use :test."):
        super().__init__(message)


class ImportError_(DiscoError):
    slug = "import"


#: Every concrete error class, for the URL well-formedness test.
ALL_ERROR_CLASSES = [
    LexError,
    ParseError,
    UnboundVariable,
    UnboundSynonym,
    InvalidSynonym,
    ShapeMismatch,
    QualifierError,
    Unsatisfiable,
    InfiniteType,
    ArityMismatch,
    PatternError,
    DivisionByZero,
    NonExhaustiveMatch,
    ComparisonOfFunctions,
    RecursionLimit,
    EvalTimeout,
    ZeroStride,
    ResourceLimit,
    CannotEnumerate,
    CannotDecide,
    NetworkError,
    PropNotPrintable,
    ImportError_,
]
