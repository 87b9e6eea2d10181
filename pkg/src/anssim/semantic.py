"""Embedding-based similarity metrics computed against a model backend.

BERTScore-style greedy matching (per-layer, optional IDF weighting),
bi-encoder cosine similarity, and the SAS cross-encoder score. Texts are
passed to the backend raw: model tokenizers own their input, so no lexical
normalization is applied on this side.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .backends import ModelBackend, TokenEmbeddings
from .errors import (
    DimensionMismatch,
    EmptyCorpus,
    EmptyTokenizationWarning,
    LayerOutOfRange,
    UnknownModel,
    ZeroVector,
)

_NORM_TOLERANCE = 1e-6


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity in [-1, 1], clamped against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionMismatch(f"vector shapes differ: {u.shape} vs {v.shape}")
    norm_u = np.linalg.norm(u)
    norm_v = np.linalg.norm(v)
    if norm_u == 0.0 or norm_v == 0.0:
        raise ZeroVector("cosine is undefined for an all-zero vector")
    value = float(np.dot(u, v) / (norm_u * norm_v))
    return max(-1.0, min(1.0, value))


@dataclass(frozen=True)
class SentenceEmbedding:
    """One pooled text embedding; rows are unit length when normalized."""

    vector: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        if self.normalized:
            norm = float(np.linalg.norm(self.vector))
            if abs(norm - 1.0) > _NORM_TOLERANCE:
                raise ValueError(f"normalized embedding has norm {norm}")

    def normalize(self) -> "SentenceEmbedding":
        norm = float(np.linalg.norm(self.vector))
        if norm == 0.0:
            raise ZeroVector("cannot normalize an all-zero sentence embedding")
        return SentenceEmbedding(self.vector / norm, normalized=True)


@dataclass(frozen=True)
class TokenEmbeddingMatrix:
    """Per-token vectors for one text at one model layer."""

    tokens: tuple[str, ...]
    vectors: np.ndarray
    layer: int
    normalized: bool = False

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.tokens):
            raise ValueError(
                f"expected one row per token ({len(self.tokens)}), got shape "
                f"{self.vectors.shape}"
            )
        if self.normalized and len(self.tokens):
            norms = np.linalg.norm(self.vectors, axis=1)
            if np.any(np.abs(norms - 1.0) > _NORM_TOLERANCE):
                raise ValueError("normalized matrix contains non-unit rows")

    @classmethod
    def from_backend(
        cls, embeddings: TokenEmbeddings, layer: int
    ) -> "TokenEmbeddingMatrix":
        vectors = np.asarray(embeddings.layers[layer], dtype=np.float64)
        if not embeddings.tokens:
            vectors = np.zeros((0, 0))
        return cls(tokens=tuple(embeddings.tokens), vectors=vectors, layer=layer)

    def normalize(self) -> "TokenEmbeddingMatrix":
        """Unit-normalize rows; all-zero rows are left at zero."""
        if self.normalized:
            return self
        norms = np.linalg.norm(self.vectors, axis=1, keepdims=True)
        safe = np.where(norms == 0.0, 1.0, norms)
        vectors = self.vectors / safe
        return TokenEmbeddingMatrix(
            self.tokens, vectors, self.layer, normalized=not np.any(norms == 0.0)
        )


@dataclass(frozen=True)
class IdfTable:
    """Inverse document frequency weights; unseen tokens get default_weight."""

    weights: dict[str, float]
    default_weight: float

    def __post_init__(self):
        if self.default_weight < 0 or not math.isfinite(self.default_weight):
            raise ValueError(f"bad default weight {self.default_weight}")
        for token, weight in self.weights.items():
            if weight < 0 or not math.isfinite(weight):
                raise ValueError(f"bad idf weight {weight} for token {token!r}")

    def weight(self, token: str) -> float:
        return self.weights.get(token, self.default_weight)


def build_idf_table(
    corpus: Sequence[str], tokenizer: Callable[[str], Sequence[str]]
) -> IdfTable:
    """idf(t) = log((N + 1) / (df(t) + 1)); unseen tokens weigh log(N + 1)."""
    if not corpus:
        raise EmptyCorpus("cannot build an IDF table from an empty corpus")
    n_docs = len(corpus)
    document_frequency: dict[str, int] = {}
    for document in corpus:
        for token in set(tokenizer(document)):
            document_frequency[token] = document_frequency.get(token, 0) + 1
    weights = {
        token: math.log((n_docs + 1) / (df + 1))
        for token, df in document_frequency.items()
    }
    return IdfTable(weights=weights, default_weight=math.log(n_docs + 1))


class BertScore(NamedTuple):
    precision: float
    recall: float
    f1: float


def _resolve_token_model(backend: ModelBackend, model: str, layer: int):
    roster = backend.models()
    info = roster.get(model)
    if info is None:
        raise UnknownModel(f"unknown model alias {model!r}", model=model)
    if not 0 <= layer <= info.num_layers:
        raise LayerOutOfRange(
            f"layer {layer} outside [0, {info.num_layers}]", model=model
        )
    return info


def _greedy_side(
    sim: np.ndarray, weights: np.ndarray | None, axis: int
) -> float:
    """Weighted mean of per-token best cosines along one matching direction.

    Negative cosines are floored at zero so the aggregate stays in [0, 1].
    """
    best = sim.max(axis=axis)
    best = np.maximum(best, 0.0)
    if weights is None:
        return float(best.mean())
    total = float(weights.sum())
    if total == 0.0:
        return float(best.mean())
    return float(np.dot(best, weights) / total)


def bertscore_from_matrices(
    cand: TokenEmbeddingMatrix,
    ref: TokenEmbeddingMatrix,
    idf: IdfTable | None = None,
) -> BertScore:
    """Greedy matching over already-fetched (and normalized) token matrices."""
    cand = cand.normalize()
    ref = ref.normalize()
    if not cand.tokens or not ref.tokens:
        warnings.warn(
            f"empty tokenization for {'candidate' if not cand.tokens else 'reference'};"
            " scoring pair as 0",
            EmptyTokenizationWarning,
            stacklevel=2,
        )
        return BertScore(0.0, 0.0, 0.0)
    sim = cand.vectors @ ref.vectors.T
    cand_weights = None
    ref_weights = None
    if idf is not None:
        cand_weights = np.array([idf.weight(token) for token in cand.tokens])
        ref_weights = np.array([idf.weight(token) for token in ref.tokens])
    precision = _greedy_side(sim, cand_weights, axis=1)
    recall = _greedy_side(sim.T, ref_weights, axis=1)
    if precision + recall == 0.0:
        return BertScore(precision, recall, 0.0)
    f1 = 2 * precision * recall / (precision + recall)
    return BertScore(precision, recall, f1)


def bertscore(
    candidate: str,
    reference: str,
    backend: ModelBackend,
    model: str,
    layer: int,
    idf: IdfTable | None = None,
) -> BertScore:
    """Greedy maximum-cosine token matching aggregated into P/R/F1.

    Precision matches candidate tokens against the reference, recall the
    reverse; with an IDF table, each matched token's contribution is weighted
    on its own side. Either side tokenizing to nothing yields (0, 0, 0) and
    an EmptyTokenizationWarning.
    """
    _resolve_token_model(backend, model, layer)
    cand_emb, ref_emb = backend.embed_tokens([candidate, reference], model, [layer])
    cand = TokenEmbeddingMatrix.from_backend(cand_emb, layer)
    ref = TokenEmbeddingMatrix.from_backend(ref_emb, layer)
    return bertscore_from_matrices(cand, ref, idf)


def bi_encoder_score(a: str, b: str, backend: ModelBackend, model: str) -> float:
    """Cosine of the two pooled sentence embeddings, negatives clamped to 0."""
    vectors = backend.embed_sentence([a, b], model)
    first = SentenceEmbedding(np.asarray(vectors[0], dtype=np.float64)).normalize()
    second = SentenceEmbedding(np.asarray(vectors[1], dtype=np.float64)).normalize()
    return max(0.0, cosine(first.vector, second.vector))


def sas_score(a: str, b: str, backend: ModelBackend, model: str) -> float:
    """Cross-encoder regression score for the ordered pair, clamped to [0, 1]."""
    raw = backend.cross_score([(a, b)], model)[0]
    return max(0.0, min(1.0, float(raw)))
