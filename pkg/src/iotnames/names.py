"""Domain-name normalization and label splitting.

Names arrive from many sources (vendor lists, top lists, packet captures)
with inconsistent dot characters, stray whitespace, mixed case and optional
trailing root dots.  This module canonicalizes them to a single presentation
form and splits that form into labels.  There is deliberately no character
whitelist here: underscores, IDN bytes and other oddities survive, and only
structure is enforced.
"""

from dataclasses import dataclass

from .errors import MalformedNameError

# Alternative "full stop" code points that appear in real lists and captures:
# ideographic full stop, fullwidth full stop, halfwidth ideographic full stop.
DOT_VARIANTS = ("。", "．", "｡")

DOT = "."


@dataclass(frozen=True)
class NormalizationReport:
    """What normalize() changed about one input string."""

    substituted_dots: int
    trimmed_whitespace: bool
    trailing_dot_removed: bool


@dataclass(frozen=True)
class DomainName:
    """A parsed domain name: the raw input plus its normalized labels."""

    raw: str
    labels: tuple[str, ...]

    @property
    def normalized(self) -> str:
        return DOT.join(self.labels)


def _canonicalize(raw: str) -> tuple[str, int, bool]:
    """Trim whitespace, unify dot variants and lowercase.

    Trailing dots are kept; callers that need the fully normalized form use
    normalize().  Returns (text, substituted_dots, trimmed_whitespace).
    """
    stripped = raw.strip()
    trimmed = stripped != raw
    substituted = 0
    for variant in DOT_VARIANTS:
        n = stripped.count(variant)
        if n:
            substituted += n
            stripped = stripped.replace(variant, DOT)
    return stripped.lower(), substituted, trimmed


def normalize(raw: str) -> tuple[str, NormalizationReport]:
    """Normalize one raw name to presentation form.

    Dot variants become ".", surrounding whitespace is dropped, the name is
    lowercased (DNS is case-insensitive) and a single trailing root dot is
    removed.  The report records each change.  Normalization never rejects:
    syntax enforcement lives in the sanitizer.
    """
    text, substituted, trimmed = _canonicalize(raw)
    trailing = text.endswith(DOT)
    if trailing:
        text = text[:-1]
    return text, NormalizationReport(substituted, trimmed, trailing)


def split_labels(normalized: str, raw: str | None = None) -> DomainName:
    """Split a normalized name into its labels.

    The input must carry no leading, trailing or consecutive dots; an empty
    segment raises MalformedNameError naming the 1-based segment position.
    """
    if normalized == "":
        raise MalformedNameError("empty name has no labels")
    segments = normalized.split(DOT)
    for position, segment in enumerate(segments, start=1):
        if segment == "":
            raise MalformedNameError(
                f"empty label at segment {position} of {normalized!r}"
            )
    return DomainName(raw=normalized if raw is None else raw, labels=tuple(segments))


def parse_name(raw: str) -> DomainName:
    """Normalize and split in one step, keeping the original raw text."""
    normalized, _ = normalize(raw)
    return split_labels(normalized, raw=raw)


def label_count(name: DomainName) -> int:
    """Number of labels, e.g. 3 for iot.backend.org."""
    return len(name.labels)


def char_length(name: DomainName) -> int:
    """Length of the normalized dotted form, separator dots included."""
    return sum(len(label) for label in name.labels) + len(name.labels) - 1
