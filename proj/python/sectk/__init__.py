"""Speaker-tagged transcript toolkit: reconciliation, WDER/cpWER/BLEU scoring,
error taxonomy and simulation, and speaker error correction."""

from sectk._core import (
    ConfigError,
    NumericalError,
    ParseError,
    ValidationError,
    bleu,
    classify_errors,
    corrupt,
    correct,
    cpwer,
    generate_alternates,
    generate_corpus,
    reconcile,
    wder,
)

__all__ = [
    "ConfigError",
    "NumericalError",
    "ParseError",
    "ValidationError",
    "bleu",
    "classify_errors",
    "corrupt",
    "correct",
    "cpwer",
    "generate_alternates",
    "generate_corpus",
    "reconcile",
    "wder",
]
