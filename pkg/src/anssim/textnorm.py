"""Deterministic normalization and tokenization underlying the lexical metrics.

The pipeline, in order: Unicode normalization, lowercasing, punctuation
removal, whole-token article removal, whitespace collapse. Punctuation is
every character in Unicode categories P* and S* and is replaced by a space,
except when flanked by digits on both sides ("40,000", "3.5"), in which case
it is deleted so numbers survive as single tokens. ``normalize`` is
idempotent.
"""

from __future__ import annotations

import enum
import unicodedata
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

TokenSequence = list[str]
Ngram = tuple[str, ...]


class Language(enum.Enum):
    EN = "en"
    DE = "de"


class UnicodeForm(enum.Enum):
    NFC = "NFC"
    NFKC = "NFKC"


@dataclass(frozen=True)
class NormalizationProfile:
    """Knobs for one language's normalization; defaults match EN_PROFILE/DE_PROFILE."""

    language: Language = Language.EN
    lowercase: bool = True
    strip_punctuation: bool = True
    remove_articles: bool = True
    article_list: tuple[str, ...] = ("a", "an", "the")
    unicode_form: UnicodeForm = UnicodeForm.NFC

    def replace(self, **changes) -> "NormalizationProfile":
        from dataclasses import replace

        return replace(self, **changes)


EN_PROFILE = NormalizationProfile()
# Sequence metrics (BLEU, ROUGE-L, METEOR) score token order, so articles
# stay in; stripping them is a QA exact-match/F1 convention only.
EN_SEQUENCE_PROFILE = NormalizationProfile(remove_articles=False, article_list=())
# German keeps articles: der/die/das inflect and double as pronouns, and no
# stopword handling is defined for DE, so only case/punctuation are touched.
DE_PROFILE = NormalizationProfile(
    language=Language.DE, remove_articles=False, article_list=()
)

_PROFILES = {Language.EN: EN_PROFILE, Language.DE: DE_PROFILE}


def profile_for(language: Language | str) -> NormalizationProfile:
    """Default profile for a language ('en'/'de' or Language)."""
    if isinstance(language, str):
        language = Language(language.lower())
    return _PROFILES[language]


@lru_cache(maxsize=65536)
def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def _strip_punctuation(text: str) -> str:
    out = []
    last = len(text) - 1
    for i, ch in enumerate(text):
        if not _is_punct(ch):
            out.append(ch)
            continue
        digit_flanked = (
            0 < i < last and text[i - 1].isdigit() and text[i + 1].isdigit()
        )
        if not digit_flanked:
            out.append(" ")
        # digit-flanked punctuation is dropped outright: "40,000" -> "40000"
    return "".join(out)


def normalize(text: str, profile: NormalizationProfile = EN_PROFILE) -> str:
    """Apply the profile's normalization steps in their fixed order."""
    text = unicodedata.normalize(profile.unicode_form.value, text)
    if profile.lowercase:
        text = text.lower()
    if profile.strip_punctuation:
        text = _strip_punctuation(text)
    tokens = text.split()
    if profile.remove_articles and profile.article_list:
        articles = set(profile.article_list)
        tokens = [tok for tok in tokens if tok not in articles]
    return " ".join(tokens)


def tokenize(text: str, profile: NormalizationProfile = EN_PROFILE) -> TokenSequence:
    """Normalized whitespace tokens; empty input yields the empty sequence."""
    normalized = normalize(text, profile)
    return normalized.split()


def ngrams(tokens: TokenSequence, n: int) -> Counter:
    """Multiset of contiguous n-grams; empty when the sequence is too short."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
