"""Normalization and tokenization behavior, pinned case by case."""

import pytest

from anssim.textnorm import (
    DE_PROFILE,
    EN_PROFILE,
    EN_SEQUENCE_PROFILE,
    Language,
    NormalizationProfile,
    UnicodeForm,
    ngrams,
    normalize,
    profile_for,
    tokenize,
)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("The UV-light!", "uv light"),
        ("", ""),
        ("ultraviolet", "ultraviolet"),
        ("40,000", "40000"),
        ("3.5 million", "35 million"),
        ("An Apple a Day", "apple day"),
        ("  lots   of\tspace ", "lots of space"),
        ("don't", "don t"),
        ("$40", "40"),
        ("1,234.56", "123456"),
        ("Ärger!", "ärger"),  # NFC composes before lowercasing
        ("semi;colon", "semi colon"),
        ("em—dash", "em dash"),
        ("1+1", "11"),  # any digit-flanked punctuation or symbol is deleted
        ("x+y", "x y"),
    ],
)
def test_normalize_en(text, expected):
    assert normalize(text, EN_PROFILE) == expected


def test_digit_flanked_symbols_are_deleted_only_between_digits():
    assert normalize("40,000 people, mostly", EN_PROFILE) == "40000 people mostly"
    assert normalize(",40", EN_PROFILE) == "40"
    assert normalize("40,", EN_PROFILE) == "40"
    assert normalize("4,,0", EN_PROFILE) == "4 0"


def test_normalize_de_keeps_articles():
    assert normalize("Die Mauer", DE_PROFILE) == "die mauer"
    assert normalize("das U-Boot!", DE_PROFILE) == "das u boot"


def test_sequence_profile_keeps_articles():
    assert normalize("the cat", EN_SEQUENCE_PROFILE) == "the cat"


def test_normalize_is_idempotent_on_examples():
    for text in ["The UV-light!", "40,000", "Äpfel, Birnen & Co.", "a—b–c", ""]:
        once = normalize(text, EN_PROFILE)
        assert normalize(once, EN_PROFILE) == once


def test_nfkc_profile_folds_compatibility_forms():
    profile = NormalizationProfile(unicode_form=UnicodeForm.NFKC)
    assert normalize("ﬁsh", profile) == "fish"
    assert normalize("ﬁsh", EN_PROFILE) == "ﬁsh"


@pytest.mark.parametrize(
    "text,profile,expected",
    [
        ("Joseph Priestley", EN_PROFILE, ["joseph", "priestley"]),
        ("40,000", EN_PROFILE, ["40000"]),
        ("", EN_PROFILE, []),
        ("the a an", EN_PROFILE, []),
        ("the a an", EN_SEQUENCE_PROFILE, ["the", "a", "an"]),
        ("Der Hund!", DE_PROFILE, ["der", "hund"]),
    ],
)
def test_tokenize(text, profile, expected):
    assert tokenize(text, profile) == expected


def test_ngrams_enumeration():
    assert ngrams(["a", "b", "c"], 2) == {("a", "b"): 1, ("b", "c"): 1}
    assert ngrams(["a"], 2) == {}
    assert ngrams(["a", "a"], 1) == {("a",): 2}
    assert ngrams([], 1) == {}


def test_ngrams_count_identity():
    tokens = list("abcdefg")
    for n in range(1, 10):
        assert sum(ngrams(tokens, n).values()) == max(0, len(tokens) - n + 1)


def test_ngrams_rejects_nonpositive_n():
    with pytest.raises(ValueError):
        ngrams(["a"], 0)


def test_profile_for():
    assert profile_for("en") is EN_PROFILE
    assert profile_for(Language.DE) is DE_PROFILE
    with pytest.raises(ValueError):
        profile_for("fr")


def test_profile_replace_returns_new_profile():
    custom = EN_PROFILE.replace(remove_articles=False)
    assert custom.remove_articles is False
    assert EN_PROFILE.remove_articles is True
