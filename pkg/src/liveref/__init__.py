"""liveref: live Extract Method refactoring engine for Java source."""

from .model import (
    ClassModel,
    MethodModel,
    SourceUnit,
    StatementNode,
    TokenBag,
    sibling_runs,
    statement_count,
)
from .frontend import ParseDiagnostics, classify_tokens, parse_source

__version__ = "0.1.0"

__all__ = [
    "ClassModel",
    "MethodModel",
    "ParseDiagnostics",
    "SourceUnit",
    "StatementNode",
    "TokenBag",
    "classify_tokens",
    "parse_source",
    "sibling_runs",
    "statement_count",
    "__version__",
]
