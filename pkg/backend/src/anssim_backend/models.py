"""Model registry for the sidecar: synthetic stand-ins and hub-loaded models.

Each loaded model exposes one of three operations (per-layer token
embeddings, pooled sentence embeddings, cross-encoder pair scores). Real
models are loaded eagerly at startup so a broken configuration fails fast;
synthetic models need no downloads and make the full wire protocol testable
offline. Inference on a given model is serialized with a per-model lock.
"""

from __future__ import annotations

import enum
import hashlib
import json
import threading
from dataclasses import dataclass

import numpy as np


class ModelKind(enum.Enum):
    TOKEN_ENCODER = "token_encoder"
    SENTENCE_ENCODER = "sentence_encoder"
    CROSS_ENCODER = "cross_encoder"


class RequestError(Exception):
    """Client-caused failure, mapped to an HTTP 4xx with a typed body."""

    def __init__(self, error_type: str, message: str, status: int = 400):
        super().__init__(message)
        self.error_type = error_type
        self.status = status


@dataclass(frozen=True)
class ModelSpec:
    """One roster entry from the server configuration."""

    alias: str
    kind: ModelKind
    hub_id: str = ""
    synthetic: bool = False
    num_layers: int = 2
    dim: int = 32
    max_tokens: int | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ModelSpec":
        known = {"alias", "kind", "hub_id", "synthetic", "num_layers", "dim",
                 "max_tokens"}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown model config keys {sorted(unknown)}")
        if "alias" not in raw or "kind" not in raw:
            raise ValueError("model config needs 'alias' and 'kind'")
        spec = cls(
            alias=str(raw["alias"]),
            kind=ModelKind(str(raw["kind"])),
            hub_id=str(raw.get("hub_id", "")),
            synthetic=bool(raw.get("synthetic", False)),
            num_layers=int(raw.get("num_layers", 2)),
            dim=int(raw.get("dim", 32)),
            max_tokens=raw.get("max_tokens"),
        )
        if not spec.synthetic and not spec.hub_id:
            raise ValueError(f"model {spec.alias!r} needs a hub_id or synthetic=true")
        return spec


@dataclass
class TokenResult:
    tokens: list[str]
    layers: dict[int, np.ndarray]
    truncated: bool


class LoadedModel:
    """Base: metadata plus the per-model inference lock."""

    def __init__(self, spec: ModelSpec, num_layers: int, dim: int, revision: str):
        self.spec = spec
        self.alias = spec.alias
        self.kind = spec.kind
        self.num_layers = num_layers
        self.dim = dim
        self.revision = revision
        self.lock = threading.Lock()

    def describe(self) -> dict:
        return {
            "alias": self.alias,
            "kind": self.kind.value,
            "num_layers": self.num_layers,
            "dim": self.dim,
            "revision": self.revision,
        }

    def check_layers(self, layers: list[int]) -> None:
        for layer in layers:
            if not 0 <= layer <= self.num_layers:
                raise RequestError(
                    "LayerOutOfRange",
                    f"layer {layer} outside [0, {self.num_layers}] for "
                    f"{self.alias!r}",
                )


def _stable_unit_vector(seed_text: str, dim: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(seed_text.encode("utf-8")).digest()[:8], "big")
    vector = np.random.default_rng(seed).standard_normal(dim)
    return vector / np.linalg.norm(vector)


class SyntheticTokenModel(LoadedModel):
    """Hash-positioned one-hot token vectors, scaled by (layer + 1).

    A token's row depends only on the token string, so identical requests
    (and identical tokens across requests) produce bitwise-equal vectors.
    """

    def __init__(self, spec: ModelSpec):
        super().__init__(spec, spec.num_layers, spec.dim, revision="synthetic")

    def embed_tokens(self, texts: list[str], layers: list[int]) -> list[TokenResult]:
        results = []
        for text in texts:
            tokens = text.split()
            truncated = False
            if self.spec.max_tokens is not None and len(tokens) > self.spec.max_tokens:
                tokens = tokens[: self.spec.max_tokens]
                truncated = True
            rows = [
                int.from_bytes(hashlib.sha256(tok.encode("utf-8")).digest()[:4], "big")
                % self.dim
                for tok in tokens
            ]
            per_layer = {}
            for layer in layers:
                matrix = np.zeros((len(tokens), self.dim))
                for row, col in enumerate(rows):
                    matrix[row, col] = float(layer + 1)
                per_layer[layer] = matrix
            results.append(TokenResult(tokens, per_layer, truncated))
        return results


class SyntheticSentenceModel(LoadedModel):
    def __init__(self, spec: ModelSpec):
        super().__init__(spec, 0, spec.dim, revision="synthetic")

    def embed_sentence(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        return np.stack([_stable_unit_vector(text, self.dim) for text in texts])


class SyntheticCrossModel(LoadedModel):
    """Token-set Dice overlap as a deterministic cross score."""

    def __init__(self, spec: ModelSpec):
        super().__init__(spec, 0, 1, revision="synthetic")

    def cross_score(self, pairs: list[tuple[str, str]]) -> list[float]:
        scores = []
        for a, b in pairs:
            set_a, set_b = set(a.split()), set(b.split())
            if not set_a and not set_b:
                scores.append(1.0)
            elif not set_a or not set_b:
                scores.append(0.0)
            else:
                scores.append(2 * len(set_a & set_b) / (len(set_a) + len(set_b)))
        return scores


class TransformerTokenModel(LoadedModel):
    """Hub model serving raw hidden states per layer, special tokens stripped."""

    def __init__(self, spec: ModelSpec):
        import torch
        from transformers import AutoModel, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(spec.hub_id)
        self.model = AutoModel.from_pretrained(spec.hub_id, output_hidden_states=True)
        self.model.eval()
        config = self.model.config
        revision = getattr(config, "_commit_hash", None) or spec.hub_id
        super().__init__(
            spec,
            num_layers=int(config.num_hidden_layers),
            dim=int(config.hidden_size),
            revision=str(revision),
        )

    def embed_tokens(self, texts: list[str], layers: list[int]) -> list[TokenResult]:
        torch = self._torch
        results = []
        for text in texts:
            encoded = self.tokenizer(
                text,
                return_tensors="pt",
                truncation=True,
                return_special_tokens_mask=True,
            )
            special = encoded.pop("special_tokens_mask")[0].bool()
            with torch.no_grad():
                output = self.model(**encoded)
            keep = ~special
            ids = encoded["input_ids"][0][keep]
            tokens = self.tokenizer.convert_ids_to_tokens(ids.tolist())
            truncated = self._was_truncated(text, int(keep.sum()))
            per_layer = {
                layer: output.hidden_states[layer][0][keep].numpy().astype(np.float64)
                for layer in layers
            }
            results.append(TokenResult(tokens, per_layer, truncated))
        return results

    def _was_truncated(self, text: str, kept: int) -> bool:
        full = self.tokenizer(text, truncation=False, return_special_tokens_mask=True)
        specials = sum(full["special_tokens_mask"])
        return len(full["input_ids"]) - specials > kept


class SentenceTransformerModel(LoadedModel):
    def __init__(self, spec: ModelSpec):
        from sentence_transformers import SentenceTransformer

        self.model = SentenceTransformer(spec.hub_id)
        dim = int(self.model.get_sentence_embedding_dimension())
        super().__init__(spec, 0, dim, revision=spec.hub_id)

    def embed_sentence(self, texts: list[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim))
        vectors = self.model.encode(
            list(texts), convert_to_numpy=True, normalize_embeddings=True
        )
        return np.asarray(vectors, dtype=np.float64)


class CrossEncoderModel(LoadedModel):
    def __init__(self, spec: ModelSpec):
        from sentence_transformers import CrossEncoder

        self.model = CrossEncoder(spec.hub_id)
        super().__init__(spec, 0, 1, revision=spec.hub_id)

    def cross_score(self, pairs: list[tuple[str, str]]) -> list[float]:
        if not pairs:
            return []
        scores = self.model.predict([list(pair) for pair in pairs])
        return [float(score) for score in np.atleast_1d(scores)]


_SYNTHETIC_CLASSES = {
    ModelKind.TOKEN_ENCODER: SyntheticTokenModel,
    ModelKind.SENTENCE_ENCODER: SyntheticSentenceModel,
    ModelKind.CROSS_ENCODER: SyntheticCrossModel,
}
_HUB_CLASSES = {
    ModelKind.TOKEN_ENCODER: TransformerTokenModel,
    ModelKind.SENTENCE_ENCODER: SentenceTransformerModel,
    ModelKind.CROSS_ENCODER: CrossEncoderModel,
}


def load_model(spec: ModelSpec) -> LoadedModel:
    classes = _SYNTHETIC_CLASSES if spec.synthetic else _HUB_CLASSES
    return classes[spec.kind](spec)


def load_roster(specs: list[ModelSpec]) -> dict[str, LoadedModel]:
    seen = set()
    for spec in specs:
        if spec.alias in seen:
            raise ValueError(f"duplicate model alias {spec.alias!r}")
        seen.add(spec.alias)
    return {spec.alias: load_model(spec) for spec in specs}


#: Default roster: the models the evaluation toolkit expects by alias.
DEFAULT_MODELS = [
    {"alias": "sas-en", "kind": "cross_encoder",
     "hub_id": "cross-encoder/stsb-roberta-large"},
    {"alias": "sas-de", "kind": "cross_encoder",
     "hub_id": "deepset/gbert-large-sts"},
    {"alias": "bi-encoder", "kind": "sentence_encoder",
     "hub_id": "T-Systems-onsite/cross-en-de-roberta-sentence-transformer"},
    {"alias": "bertscore-trained", "kind": "token_encoder",
     "hub_id": "T-Systems-onsite/cross-en-de-roberta-sentence-transformer"},
    {"alias": "bertscore-vanilla-en", "kind": "token_encoder",
     "hub_id": "bert-base-uncased"},
    {"alias": "bertscore-vanilla-de", "kind": "token_encoder",
     "hub_id": "deepset/gelectra-base"},
]


def synthetic_roster_config(max_tokens: int | None = 64) -> list[dict]:
    """The default aliases backed by synthetic models (offline serving)."""
    out = []
    for entry in DEFAULT_MODELS:
        synthetic = {
            "alias": entry["alias"],
            "kind": entry["kind"],
            "synthetic": True,
        }
        if entry["kind"] == "token_encoder":
            synthetic.update({"num_layers": 4, "dim": 64, "max_tokens": max_tokens})
        elif entry["kind"] == "sentence_encoder":
            synthetic.update({"dim": 16})
        out.append(synthetic)
    return out


def parse_config(text: str) -> list[ModelSpec]:
    raw = json.loads(text)
    if not isinstance(raw, dict) or "models" not in raw:
        raise ValueError('server config must be a JSON object with a "models" list')
    return [ModelSpec.from_dict(entry) for entry in raw["models"]]
