"""Syntax checking and list sanitization for domain names.

A name is accepted only when it survives a fixed sequence of structural
checks.  The sequence (and the first-failure reporting) is part of the
contract: a name that both starts with a dot and contains consecutive dots
is reported for starting with a dot.

Rule order:

  1. starts-with-dot      name begins with "."
  2. consecutive-dots     ".." anywhere (checked before the trailing root
                          dot is dropped, so "a.b.." fails here)
     (a single trailing dot is then removed; that is a step, not a failure)
  3. label-too-long       any label longer than 63 characters
  4. name-too-long        presentation form longer than 253 characters
  5. single-label         fewer than two labels (covers empty input)
  6. hyphen-edge          any label starting or ending with "-"
  7. double-hyphen-34     characters 3 and 4 are "--" and the name does not
                          start with "xn" (IDNA A-labels are exempt)

There is no character whitelist: anything structurally sound is kept.
"""

from dataclasses import dataclass
from typing import Iterable

from . import names as _names
from .names import DOT

STARTS_WITH_DOT = "starts-with-dot"
CONSECUTIVE_DOTS = "consecutive-dots"
LABEL_TOO_LONG = "label-too-long"
NAME_TOO_LONG = "name-too-long"
SINGLE_LABEL = "single-label"
HYPHEN_EDGE = "hyphen-edge"
DOUBLE_HYPHEN_34 = "double-hyphen-34"

RULES = (
    STARTS_WITH_DOT,
    CONSECUTIVE_DOTS,
    LABEL_TOO_LONG,
    NAME_TOO_LONG,
    SINGLE_LABEL,
    HYPHEN_EDGE,
    DOUBLE_HYPHEN_34,
)

MAX_LABEL_CHARS = 63
MAX_NAME_CHARS = 253


@dataclass(frozen=True)
class SyntaxVerdict:
    accepted: bool
    failed_rule: str | None = None


ACCEPTED = SyntaxVerdict(True, None)


def check_syntax(raw: str) -> SyntaxVerdict:
    """Run the ordered rule chain against one raw name."""
    text, _, _ = _names._canonicalize(raw)
    if text.startswith(DOT):
        return SyntaxVerdict(False, STARTS_WITH_DOT)
    if DOT + DOT in text:
        return SyntaxVerdict(False, CONSECUTIVE_DOTS)
    if text.endswith(DOT):
        text = text[:-1]
    labels = text.split(DOT)
    for label in labels:
        if len(label) > MAX_LABEL_CHARS:
            return SyntaxVerdict(False, LABEL_TOO_LONG)
    if len(text) > MAX_NAME_CHARS:
        return SyntaxVerdict(False, NAME_TOO_LONG)
    if text == "" or len(labels) < 2:
        return SyntaxVerdict(False, SINGLE_LABEL)
    for label in labels:
        if label.startswith("-") or label.endswith("-"):
            return SyntaxVerdict(False, HYPHEN_EDGE)
    if text[2:4] == "--" and not text.startswith("xn"):
        return SyntaxVerdict(False, DOUBLE_HYPHEN_34)
    return ACCEPTED


def sanitize_names(raw_names: Iterable[str]) -> tuple[list[_names.DomainName], list[tuple[str, str]]]:
    """Check, normalize and deduplicate a stream of raw names.

    Returns (accepted, discarded) where accepted holds one DomainName per
    distinct normalized form (first appearance wins, order preserved) and
    discarded holds (raw, failed_rule) pairs, again first appearance only.
    Accepted plus discarded covers every distinct input exactly once.
    """
    accepted: list[_names.DomainName] = []
    discarded: list[tuple[str, str]] = []
    seen: set[str] = set()
    for raw in raw_names:
        verdict = check_syntax(raw)
        if verdict.accepted:
            name = _names.parse_name(raw)
            key = name.normalized
            if key not in seen:
                seen.add(key)
                accepted.append(name)
        else:
            # Deduplicate rejects on the canonical text so the same bad name
            # written twice is reported once.
            key, _ = _names.normalize(raw)
            key = "\x00" + key
            if key not in seen:
                seen.add(key)
                discarded.append((raw, verdict.failed_rule))
    return accepted, discarded
