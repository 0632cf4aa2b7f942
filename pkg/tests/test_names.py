import numpy as np
import pytest

from iotnames.errors import MalformedNameError
from iotnames.names import (
    DOT_VARIANTS,
    DomainName,
    char_length,
    label_count,
    normalize,
    parse_name,
    split_labels,
)


def test_normalize_substitutes_dot_variant_and_trims():
    text, report = normalize("example。com ")
    assert text == "example.com"
    assert report.substituted_dots == 1
    assert report.trimmed_whitespace is True
    assert report.trailing_dot_removed is False


def test_normalize_removes_single_trailing_dot():
    text, report = normalize("example.com.")
    assert text == "example.com"
    assert report.trailing_dot_removed is True


def test_normalize_identity_case():
    text, report = normalize("example.com")
    assert text == "example.com"
    assert report == type(report)(0, False, False)


def test_normalize_lowercases():
    text, _ = normalize("ExAmPle.COM")
    assert text == "example.com"


def test_normalize_all_dot_variants():
    for variant in DOT_VARIANTS:
        text, report = normalize(f"a{variant}b")
        assert text == "a.b"
        assert report.substituted_dots == 1


def test_normalize_counts_every_substitution():
    text, report = normalize("a。b．c｡d")
    assert text == "a.b.c.d"
    assert report.substituted_dots == 3


def test_normalize_keeps_second_trailing_dot():
    # Only one trailing root dot is a normalization step; ".." survives for
    # the sanitizer to reject.
    text, report = normalize("a.b..")
    assert text == "a.b."
    assert report.trailing_dot_removed is True


def test_normalize_is_idempotent():
    # Exactly one trailing dot is removed per pass, so idempotence holds for
    # every output that no longer ends with a dot (all sanitizer-passing
    # names; stacked trailing dots are the sanitizer's problem, not ours).
    rng = np.random.default_rng(7)
    alphabet = list("abcXYZ09-_。．.")
    for _ in range(300):
        raw = "".join(rng.choice(alphabet, size=rng.integers(1, 20)))
        once, _ = normalize(raw)
        if not once.endswith("."):
            assert normalize(once)[0] == once


def test_split_labels_basic():
    name = split_labels("iot.backend.org")
    assert name.labels == ("iot", "backend", "org")
    assert name.normalized == "iot.backend.org"


def test_split_labels_single():
    assert split_labels("com").labels == ("com",)


def test_split_labels_reports_empty_segment_position():
    with pytest.raises(MalformedNameError, match="segment 3"):
        split_labels("a.b..c")
    with pytest.raises(MalformedNameError):
        split_labels("")


def test_split_join_round_trip():
    rng = np.random.default_rng(11)
    alphabet = list("abcdefghij0123456789-_")
    for _ in range(300):
        labels = [
            "".join(rng.choice(alphabet, size=rng.integers(1, 8)))
            for _ in range(rng.integers(1, 6))
        ]
        name = split_labels(".".join(labels))
        assert list(name.labels) == labels


def test_parse_name_keeps_raw():
    name = parse_name(" CAM.Example。Com. ")
    assert name.raw == " CAM.Example。Com. "
    assert name.labels == ("cam", "example", "com")


def test_counts_on_known_names():
    name = parse_name("cam.example.com")
    assert char_length(name) == 15
    assert label_count(name) == 3
    assert char_length(parse_name("com")) == 3
    assert label_count(parse_name("com")) == 1


def test_counts_match_independent_recount():
    rng = np.random.default_rng(3)
    alphabet = list("abcdefgh")
    for _ in range(200):
        labels = [
            "".join(rng.choice(alphabet, size=rng.integers(1, 10)))
            for _ in range(rng.integers(1, 7))
        ]
        dotted = ".".join(labels)
        name = parse_name(dotted)
        assert char_length(name) == len(dotted)
        assert label_count(name) == dotted.count(".") + 1
        assert char_length(name) == sum(map(len, name.labels)) + label_count(name) - 1


def test_domain_name_is_hashable_and_frozen():
    a = DomainName("x.y", ("x", "y"))
    b = DomainName("x.y", ("x", "y"))
    assert a == b and hash(a) == hash(b)
    with pytest.raises(AttributeError):
        a.labels = ("z",)
