"""String-overlap similarity metrics for answer pairs.

Exact match, token F1, top-n positional accuracy, sentence BLEU, ROUGE-L,
METEOR, and max-over-ground-truths aggregation. All scores live in [0, 1].

Exact match and token F1 default to the QA profile (articles stripped); the
sequence metrics BLEU, ROUGE-L, and METEOR default to EN_SEQUENCE_PROFILE,
which keeps articles, since they score token order and n-gram structure.

Degenerate-length conventions, applied uniformly: both texts empty -> 1.0
(METEOR excepted: zero matches -> 0.0), exactly one empty -> 0.0.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import (
    ContextMismatch,
    EmptyReferences,
    MissingSpan,
    UnsupportedLanguage,
)
from .records import Answer, LexicalSplit
from .stemming import porter_stem
from .textnorm import (
    EN_PROFILE,
    EN_SEQUENCE_PROFILE,
    Language,
    NormalizationProfile,
    ngrams,
    normalize,
    tokenize,
)

#: Smoothing constant for BLEU n-gram orders with zero raw matches.
BLEU_EPSILON = 1e-9


def exact_match(
    a: str, b: str, profile: NormalizationProfile = EN_PROFILE
) -> float:
    """1.0 iff the two texts are identical after normalization."""
    return 1.0 if normalize(a, profile) == normalize(b, profile) else 0.0


def token_f1(a: str, b: str, profile: NormalizationProfile = EN_PROFILE) -> float:
    """Harmonic mean of token-multiset precision and recall."""
    tokens_a = tokenize(a, profile)
    tokens_b = tokenize(b, profile)
    if not tokens_a and not tokens_b:
        return 1.0
    if not tokens_a or not tokens_b:
        return 0.0
    overlap = sum((Counter(tokens_a) & Counter(tokens_b)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(tokens_a)
    recall = overlap / len(tokens_b)
    return 2 * precision * recall / (precision + recall)


def lexical_split_of(
    a: str, b: str, profile: NormalizationProfile = EN_PROFILE
) -> LexicalSplit:
    """Dataset split predicate: F1 == 0 means disjoint token multisets."""
    return (
        LexicalSplit.F1_ZERO
        if token_f1(a, b, profile) == 0.0
        else LexicalSplit.F1_POSITIVE
    )


@dataclass(frozen=True)
class SpanPrediction:
    """Ranked model predictions, every answer carrying a character span."""

    answers: tuple[Answer, ...]

    def __post_init__(self):
        if not self.answers:
            raise ValueError("SpanPrediction requires at least one answer")


def _require_span(answer: Answer) -> tuple[int, int]:
    if answer.span is None:
        raise MissingSpan(f"answer {answer.text!r} has no character span")
    return answer.span


def top_n_accuracy(predictions: SpanPrediction, gold: Answer, n: int) -> float:
    """1.0 iff any of the first n predicted spans overlaps the gold span.

    Spans are half-open character intervals in the same context; touching
    intervals do not overlap.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    gold_start, gold_end = _require_span(gold)
    for answer in predictions.answers[:n]:
        start, end = _require_span(answer)
        if answer.context_id != gold.context_id:
            raise ContextMismatch(
                f"prediction context {answer.context_id!r} != gold context "
                f"{gold.context_id!r}"
            )
        if min(end, gold_end) - max(start, gold_start) >= 1:
            return 1.0
    return 0.0


def bleu(
    candidate: str,
    reference: str,
    profile: NormalizationProfile = EN_SEQUENCE_PROFILE,
    max_n: int = 4,
) -> float:
    """Sentence-level BLEU with brevity penalty and epsilon smoothing.

    N-gram orders are capped at the candidate length (effective order), so
    identical texts score 1.0; within an included order, zero clipped matches
    contribute BLEU_EPSILON to the numerator instead of collapsing the
    geometric mean to exactly zero.
    """
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    cand = tokenize(candidate, profile)
    ref = tokenize(reference, profile)
    if not cand and not ref:
        return 1.0
    if not cand or not ref:
        return 0.0
    log_precision_sum = 0.0
    orders = min(max_n, len(cand))
    for n in range(1, orders + 1):
        cand_ngrams = ngrams(cand, n)
        ref_ngrams = ngrams(ref, n)
        clipped = sum((cand_ngrams & ref_ngrams).values())
        total = cand_ngrams.total()
        numerator = clipped if clipped > 0 else BLEU_EPSILON
        log_precision_sum += math.log(numerator / total)
    geo_mean = math.exp(log_precision_sum / orders)
    c, r = len(cand), len(ref)
    brevity = 1.0 if c >= r else math.exp(1.0 - r / c)
    return min(1.0, geo_mean * brevity)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length, O(len(a) * len(b)) with 1-D rows."""
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for i in range(1, len(a) + 1):
        current = [0] * (len(b) + 1)
        for j in range(1, len(b) + 1):
            if a[i - 1] == b[j - 1]:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[len(b)]


def rouge_l(
    candidate: str,
    reference: str,
    profile: NormalizationProfile = EN_SEQUENCE_PROFILE,
) -> float:
    """LCS-based F1 over token sequences (balanced beta, symmetric)."""
    cand = tokenize(candidate, profile)
    ref = tokenize(reference, profile)
    if not cand and not ref:
        return 1.0
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    if lcs == 0:
        return 0.0
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return 2 * precision * recall / (precision + recall)


class MeteorStage(enum.Enum):
    EXACT = "exact"
    STEM = "stem"
    SYNONYM = "synonym"


@dataclass(frozen=True)
class MeteorParams:
    """Classic METEOR parameters plus the staged-matcher configuration."""

    alpha: float = 0.9
    beta: float = 3.0
    gamma: float = 0.5
    stages: tuple[MeteorStage, ...] = (MeteorStage.EXACT, MeteorStage.STEM)
    synonym_lexicon: dict[str, frozenset[str]] | None = None

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")


DEFAULT_METEOR_PARAMS = MeteorParams()


def load_synonym_lexicon(path) -> dict[str, frozenset[str]]:
    """Read a synonym lexicon: one synonym set per line, tokens tab-separated.

    Returns a symmetric mapping token -> set of all other tokens sharing a
    line with it (union over lines).
    """
    groups: dict[str, set[str]] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            tokens = [tok for tok in line.rstrip("\n").split("\t") if tok]
            for token in tokens:
                others = groups.setdefault(token, set())
                others.update(tok for tok in tokens if tok != token)
    return {token: frozenset(others) for token, others in groups.items()}


def _stage_matcher(
    stage: MeteorStage, params: MeteorParams
) -> Callable[[str, str], bool] | None:
    if stage is MeteorStage.EXACT:
        return lambda c, r: c == r
    if stage is MeteorStage.STEM:
        return lambda c, r: porter_stem(c) == porter_stem(r)
    lexicon = params.synonym_lexicon
    if not lexicon:
        return None
    empty: frozenset[str] = frozenset()
    return lambda c, r: r in lexicon.get(c, empty) or c in lexicon.get(r, empty)


def _align(
    cand: Sequence[str], ref: Sequence[str], params: MeteorParams
) -> list[tuple[int, int]]:
    """Stage-wise greedy unigram alignment; each token matched at most once.

    Stages run in configured order; within a stage, candidate tokens are
    visited left to right and matched to the first free reference token.
    """
    matched_cand: set[int] = set()
    matched_ref: set[int] = set()
    alignment: list[tuple[int, int]] = []
    for stage in params.stages:
        matcher = _stage_matcher(stage, params)
        if matcher is None:
            continue
        for i, cand_tok in enumerate(cand):
            if i in matched_cand:
                continue
            for j, ref_tok in enumerate(ref):
                if j in matched_ref:
                    continue
                if matcher(cand_tok, ref_tok):
                    matched_cand.add(i)
                    matched_ref.add(j)
                    alignment.append((i, j))
                    break
    return sorted(alignment)


def _count_chunks(alignment: list[tuple[int, int]]) -> int:
    """Contiguous runs of matches (adjacent in both texts), candidate order."""
    chunks = 0
    prev = None
    for i, j in alignment:
        if prev is None or i != prev[0] + 1 or j != prev[1] + 1:
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(
    candidate: str,
    reference: str,
    profile: NormalizationProfile = EN_SEQUENCE_PROFILE,
    params: MeteorParams = DEFAULT_METEOR_PARAMS,
) -> float:
    """Staged-alignment METEOR with the fragmentation penalty.

    F_mean = P*R / (alpha*P + (1-alpha)*R); penalty = gamma*(chunks/matches)
    ** beta; score = F_mean * (1 - penalty). Zero matches (including empty
    inputs) score 0.0. English only: the stem stage is tied to an English
    stemmer and the synonym stage to an English lexicon.
    """
    if profile.language is not Language.EN:
        raise UnsupportedLanguage(
            f"METEOR is defined for EN only, got {profile.language.value}"
        )
    cand = tokenize(candidate, profile)
    ref = tokenize(reference, profile)
    if not cand or not ref:
        return 0.0
    alignment = _align(cand, ref, params)
    matches = len(alignment)
    if matches == 0:
        return 0.0
    precision = matches / len(cand)
    recall = matches / len(ref)
    f_mean = (precision * recall) / (
        params.alpha * precision + (1 - params.alpha) * recall
    )
    chunks = _count_chunks(alignment)
    penalty = params.gamma * (chunks / matches) ** params.beta
    return f_mean * (1.0 - penalty)


def max_over_references(
    metric: Callable[[str, str], float],
    candidate: str,
    references: Iterable[str],
) -> float:
    """Best metric value of the candidate over all ground-truth references."""
    references = list(references)
    if not references:
        raise EmptyReferences("at least one reference answer is required")
    return max(metric(candidate, reference) for reference in references)
