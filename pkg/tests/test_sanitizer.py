import csv
from pathlib import Path

import numpy as np
import pytest

from iotnames.sanitizer import (
    CONSECUTIVE_DOTS,
    DOUBLE_HYPHEN_34,
    HYPHEN_EDGE,
    LABEL_TOO_LONG,
    MAX_LABEL_CHARS,
    MAX_NAME_CHARS,
    NAME_TOO_LONG,
    RULES,
    SINGLE_LABEL,
    STARTS_WITH_DOT,
    check_syntax,
    sanitize_names,
)

CORPUS = Path(__file__).parent / "data" / "syntax_corpus.csv"


def read_corpus():
    with open(CORPUS, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        return [(row[0], row[1]) for row in reader]


def verdict_tag(raw):
    verdict = check_syntax(raw)
    return "accepted" if verdict.accepted else verdict.failed_rule


def test_corpus_is_large_enough():
    rows = read_corpus()
    assert len(rows) >= 60
    for rule in RULES:
        witnesses = [raw for raw, expected in rows if expected == rule]
        assert len(witnesses) >= 5, f"want 5+ witnesses for {rule}"


def test_corpus_full_agreement():
    for raw, expected in read_corpus():
        assert verdict_tag(raw) == expected, f"{raw!r}: want {expected}"


def test_rule_order_is_first_failure():
    # Each of these violates two rules; the earlier one must be reported.
    assert verdict_tag(".a..b") == STARTS_WITH_DOT
    assert verdict_tag("a.b..") == CONSECUTIVE_DOTS          # before trailing-dot removal
    assert verdict_tag("x" * 64 + "..com") == CONSECUTIVE_DOTS
    assert verdict_tag("-" + "x" * 63 + ".com") == LABEL_TOO_LONG  # 64 chars beats hyphen-edge
    assert verdict_tag("single.") == SINGLE_LABEL            # trailing dot removed first
    assert verdict_tag("ab--.com") == HYPHEN_EDGE            # edge beats double-hyphen


def test_trailing_dot_is_a_step_not_a_failure():
    assert check_syntax("example.com.").accepted
    assert verdict_tag("example.com..") == CONSECUTIVE_DOTS


def test_xn_exemption_cases():
    assert check_syntax("xn--p1ai.com").accepted
    assert check_syntax("XN--P1AI.com").accepted             # checked after lowercasing
    assert verdict_tag("xm--test.com") == DOUBLE_HYPHEN_34
    assert verdict_tag("ab--cd.com") == DOUBLE_HYPHEN_34


def test_length_boundaries():
    assert check_syntax("a" * MAX_LABEL_CHARS + ".com").accepted
    assert verdict_tag("a" * (MAX_LABEL_CHARS + 1) + ".com") == LABEL_TOO_LONG
    exactly = ".".join(["a" * 63, "b" * 63, "c" * 63, "d" * 61])
    assert len(exactly) == MAX_NAME_CHARS
    assert check_syntax(exactly).accepted
    assert verdict_tag(exactly + "e") == NAME_TOO_LONG


def test_single_label_covers_empty_and_whitespace():
    assert verdict_tag("") == SINGLE_LABEL
    assert verdict_tag("   ") == SINGLE_LABEL
    assert verdict_tag("localhost") == SINGLE_LABEL


def test_no_character_whitelist():
    for raw in ("under_score.example.com", "*.example.com", "héllo.example", "a$b.c"):
        assert check_syntax(raw).accepted, raw


def test_accepted_names_recheck_as_accepted():
    accepted, _ = sanitize_names([raw for raw, _ in read_corpus()])
    for name in accepted:
        assert check_syntax(name.normalized).accepted


def test_sanitize_names_dedup_and_report():
    accepted, discarded = sanitize_names(["a.com", "A.com", ".b.com"])
    assert [n.normalized for n in accepted] == ["a.com"]
    assert discarded == [(".b.com", STARTS_WITH_DOT)]


def test_sanitize_names_deduplicates_rejects_too():
    # ".B.com." normalizes to the same form as ".b.com", so the bad name is
    # reported once (first raw spelling wins); a distinct bad name is not.
    _, discarded = sanitize_names([".b.com", ".b.com", ".B.com.", ".c.com"])
    assert discarded == [(".b.com", STARTS_WITH_DOT), (".c.com", STARTS_WITH_DOT)]


def test_sanitize_names_empty_input():
    assert sanitize_names([]) == ([], [])


def test_planted_violations_are_counted_exactly():
    # 1000 valid generated names, 50 corrupted in place; exactly 950 survive.
    rng = np.random.default_rng(17)
    names = [f"host{i}.site{i % 97}.example.com" for i in range(1000)]
    corrupt = rng.choice(1000, size=50, replace=False)
    breakers = ["." + "{}", "{}..x", "-{}", "{}" + "z" * 64 + ".q", "{}."]
    for slot, i in enumerate(corrupt):
        pattern = breakers[slot % len(breakers)]
        if pattern == "{}.":
            names[i] = "justonelabel"  # single-label violation
        else:
            names[i] = pattern.format(names[i])
    accepted, discarded = sanitize_names(names)
    assert len(accepted) == 950
    assert len(discarded) == len(set(n for n in (names[i] for i in corrupt)))


def test_verdict_dataclass_shape():
    verdict = check_syntax(".x")
    assert (verdict.accepted, verdict.failed_rule) == (False, STARTS_WITH_DOT)
    ok = check_syntax("x.y")
    assert (ok.accepted, ok.failed_rule) == (True, None)


def test_corpus_runtime_under_a_second():
    import time

    rows = read_corpus()
    start = time.perf_counter()
    for raw, _ in rows:
        check_syntax(raw)
    assert time.perf_counter() - start < 1.0
