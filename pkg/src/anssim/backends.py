"""Model backends: the abstract scoring interface and its two clients.

``SyntheticBackend`` is an in-process, fully deterministic stand-in (one-hot
token vectors, hash-seeded sentence vectors, pluggable cross scores) that
lets every semantic-metric code path run offline. ``HttpBackend`` talks to
the inference sidecar over its HTTP/JSON protocol:

    POST /v1/embed_tokens   {"model", "texts", "layers"}
    POST /v1/embed_sentence {"model", "texts"}
    POST /v1/cross_score    {"model", "pairs"}
    GET  /v1/models

The sidecar base URL defaults to the ANSSIM_BACKEND_URL environment variable.
"""

from __future__ import annotations

import enum
import hashlib
import os
import threading
from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence

import numpy as np
import requests

from .errors import BackendError, LayerOutOfRange, UnknownModel

BACKEND_URL_ENV = "ANSSIM_BACKEND_URL"
DEFAULT_BACKEND_URL = "http://127.0.0.1:8765"


class ModelKind(enum.Enum):
    TOKEN_ENCODER = "token_encoder"
    SENTENCE_ENCODER = "sentence_encoder"
    CROSS_ENCODER = "cross_encoder"


@dataclass(frozen=True)
class ModelInfo:
    alias: str
    kind: ModelKind
    num_layers: int
    dim: int
    revision: str = ""


@dataclass
class TokenEmbeddings:
    """Per-layer hidden states for one text, tokens aligned with matrix rows."""

    tokens: list[str]
    layers: dict[int, np.ndarray]
    truncated: bool = False

    def __post_init__(self):
        for layer, matrix in self.layers.items():
            if matrix.shape[0] != len(self.tokens):
                raise BackendError(
                    f"layer {layer} returned {matrix.shape[0]} rows for "
                    f"{len(self.tokens)} tokens"
                )


class ModelBackend(Protocol):
    """Interface the semantic metrics are computed against."""

    def models(self) -> dict[str, ModelInfo]: ...

    def embed_tokens(
        self, texts: Sequence[str], model: str, layers: Sequence[int]
    ) -> list[TokenEmbeddings]: ...

    def embed_sentence(self, texts: Sequence[str], model: str) -> np.ndarray: ...

    def cross_score(
        self, pairs: Sequence[tuple[str, str]], model: str
    ) -> list[float]: ...


def _token_dice(a: str, b: str) -> float:
    """Default synthetic cross score: Dice overlap of whitespace token sets."""
    set_a, set_b = set(a.split()), set(b.split())
    if not set_a and not set_b:
        return 1.0
    if not set_a or not set_b:
        return 0.0
    return 2 * len(set_a & set_b) / (len(set_a) + len(set_b))


@dataclass
class SyntheticBackend:
    """Deterministic offline backend for tests, demos, and dry runs.

    Token vectors are one-hot over a per-request vocabulary scaled by
    (layer + 1): cosine is 1 for equal tokens and 0 otherwise, identically at
    every layer, while raw vectors still differ per layer. Sentence vectors
    are unit Gaussian draws seeded from the text's SHA-256, so equal texts
    map to bitwise-equal vectors. Cross scores come from ``cross_fn``.
    """

    num_layers: int = 2
    token_dim: int = 256
    sentence_dim: int = 16
    max_tokens: int | None = None
    cross_fn: Callable[[str, str], float] = field(default=_token_dice)
    token_alias: str = "synthetic-token"
    sentence_alias: str = "synthetic-sentence"
    cross_alias: str = "synthetic-cross"

    def models(self) -> dict[str, ModelInfo]:
        return {
            self.token_alias: ModelInfo(
                self.token_alias,
                ModelKind.TOKEN_ENCODER,
                self.num_layers,
                self.token_dim,
                revision="synthetic",
            ),
            self.sentence_alias: ModelInfo(
                self.sentence_alias,
                ModelKind.SENTENCE_ENCODER,
                0,
                self.sentence_dim,
                revision="synthetic",
            ),
            self.cross_alias: ModelInfo(
                self.cross_alias, ModelKind.CROSS_ENCODER, 0, 1, revision="synthetic"
            ),
        }

    def _expect(self, model: str, kind: ModelKind) -> ModelInfo:
        info = self.models().get(model)
        if info is None:
            raise UnknownModel(f"unknown model alias {model!r}", model=model)
        if info.kind is not kind:
            raise BackendError(
                f"model {model!r} has kind {info.kind.value}, expected {kind.value}",
                model=model,
            )
        return info

    def embed_tokens(
        self, texts: Sequence[str], model: str, layers: Sequence[int]
    ) -> list[TokenEmbeddings]:
        self._expect(model, ModelKind.TOKEN_ENCODER)
        for layer in layers:
            if not 0 <= layer <= self.num_layers:
                raise LayerOutOfRange(
                    f"layer {layer} outside [0, {self.num_layers}]", model=model
                )
        tokenized = []
        vocab: dict[str, int] = {}
        for text in texts:
            tokens = text.split()
            truncated = False
            if self.max_tokens is not None and len(tokens) > self.max_tokens:
                tokens = tokens[: self.max_tokens]
                truncated = True
            for token in tokens:
                vocab.setdefault(token, len(vocab))
            tokenized.append((tokens, truncated))
        if len(vocab) > self.token_dim:
            raise BackendError(
                f"request needs {len(vocab)} distinct tokens, dim is {self.token_dim}",
                model=model,
            )
        results = []
        for tokens, truncated in tokenized:
            per_layer = {}
            for layer in layers:
                matrix = np.zeros((len(tokens), self.token_dim))
                for row, token in enumerate(tokens):
                    matrix[row, vocab[token]] = float(layer + 1)
                per_layer[layer] = matrix
            results.append(
                TokenEmbeddings(tokens=tokens, layers=per_layer, truncated=truncated)
            )
        return results

    def embed_sentence(self, texts: Sequence[str], model: str) -> np.ndarray:
        info = self._expect(model, ModelKind.SENTENCE_ENCODER)
        vectors = np.empty((len(texts), info.dim))
        for i, text in enumerate(texts):
            seed = int.from_bytes(
                hashlib.sha256(text.encode("utf-8")).digest()[:8], "big"
            )
            vector = np.random.default_rng(seed).standard_normal(info.dim)
            vectors[i] = vector / np.linalg.norm(vector)
        return vectors

    def cross_score(
        self, pairs: Sequence[tuple[str, str]], model: str
    ) -> list[float]:
        self._expect(model, ModelKind.CROSS_ENCODER)
        return [float(self.cross_fn(a, b)) for a, b in pairs]


_ERROR_TYPES = {
    "UnknownModel": UnknownModel,
    "LayerOutOfRange": LayerOutOfRange,
}


class HttpBackend:
    """Client for the inference sidecar; safe to share across worker threads."""

    def __init__(self, base_url: str | None = None, timeout: float = 120.0):
        self.base_url = (
            base_url or os.environ.get(BACKEND_URL_ENV) or DEFAULT_BACKEND_URL
        ).rstrip("/")
        self.timeout = timeout
        self._local = threading.local()
        self._roster: dict[str, ModelInfo] | None = None
        self._roster_lock = threading.Lock()

    def _session(self) -> requests.Session:
        session = getattr(self._local, "session", None)
        if session is None:
            session = requests.Session()
            self._local.session = session
        return session

    def _request(self, method: str, path: str, payload: dict | None = None) -> dict:
        url = f"{self.base_url}{path}"
        model = (payload or {}).get("model")
        try:
            response = self._session().request(
                method, url, json=payload, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise BackendError(str(exc), endpoint=path, model=model) from exc
        if response.status_code != 200:
            self._raise_for_error(response, path, model)
        try:
            return response.json()
        except ValueError as exc:
            raise BackendError(
                "backend returned non-JSON body", endpoint=path, model=model
            ) from exc

    @staticmethod
    def _raise_for_error(response, path: str, model: str | None):
        message = response.text[:500]
        error_type = None
        try:
            error = response.json().get("error", {})
            error_type = error.get("type")
            message = error.get("message", message)
        except ValueError:
            pass
        exc_class = _ERROR_TYPES.get(error_type, BackendError)
        raise exc_class(
            message, endpoint=path, model=model, status=response.status_code
        )

    def models(self, refresh: bool = False) -> dict[str, ModelInfo]:
        with self._roster_lock:
            if self._roster is None or refresh:
                body = self._request("GET", "/v1/models")
                roster = {}
                for entry in body.get("models", []):
                    info = ModelInfo(
                        alias=entry["alias"],
                        kind=ModelKind(entry["kind"]),
                        num_layers=int(entry["num_layers"]),
                        dim=int(entry["dim"]),
                        revision=str(entry.get("revision", "")),
                    )
                    roster[info.alias] = info
                self._roster = roster
            return dict(self._roster)

    def embed_tokens(
        self, texts: Sequence[str], model: str, layers: Sequence[int]
    ) -> list[TokenEmbeddings]:
        body = self._request(
            "POST",
            "/v1/embed_tokens",
            {"model": model, "texts": list(texts), "layers": [int(l) for l in layers]},
        )
        results = []
        for entry in body["results"]:
            per_layer = {
                int(layer): np.asarray(matrix, dtype=np.float64)
                for layer, matrix in entry["layers"].items()
            }
            results.append(
                TokenEmbeddings(
                    tokens=list(entry["tokens"]),
                    layers=per_layer,
                    truncated=bool(entry.get("truncated", False)),
                )
            )
        return results

    def embed_sentence(self, texts: Sequence[str], model: str) -> np.ndarray:
        body = self._request(
            "POST", "/v1/embed_sentence", {"model": model, "texts": list(texts)}
        )
        return np.asarray(body["vectors"], dtype=np.float64)

    def cross_score(
        self, pairs: Sequence[tuple[str, str]], model: str
    ) -> list[float]:
        body = self._request(
            "POST",
            "/v1/cross_score",
            {"model": model, "pairs": [[a, b] for a, b in pairs]},
        )
        return [float(score) for score in body["scores"]]
