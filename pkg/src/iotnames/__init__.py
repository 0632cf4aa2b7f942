"""IoT domain-name analysis: sanitization, resolvability probing, capture
extraction, statistical profiling, label embedding, and binary classification
of names as IoT-backend versus general-web."""

from . import (
    classifiers,
    corpus,
    embedding,
    evaluation,
    pipeline,
    resolver,
    stats,
)
from .errors import InputError, MalformedNameError
from .names import DomainName, NormalizationReport, normalize, parse_name
from .sanitizer import SyntaxVerdict, check_syntax, sanitize_names

__version__ = "0.1.0"

__all__ = [
    "DomainName",
    "InputError",
    "MalformedNameError",
    "NormalizationReport",
    "SyntaxVerdict",
    "check_syntax",
    "classifiers",
    "corpus",
    "embedding",
    "evaluation",
    "normalize",
    "parse_name",
    "pipeline",
    "resolver",
    "sanitize_names",
    "stats",
    "__version__",
]
