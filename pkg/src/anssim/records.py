"""Core data model: answers, similarity labels, answer pairs, and metric scores.

All types are immutable value objects; instances can be shared freely between
worker threads. The canonical on-disk form of a pair is one JSON object per
line (see ``pair_to_json_dict`` / ``pair_fields_from_json_dict``).
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field


class SimilarityLabel(enum.IntEnum):
    """Ordinal human judgment of answer similarity; order is meaningful."""

    DISSIMILAR = 0
    APPROXIMATE = 1
    EQUIVALENT = 2


class LexicalSplit(enum.Enum):
    """Partition of pairs by token F1: zero overlap vs. some overlap."""

    F1_ZERO = "F1_ZERO"
    F1_POSITIVE = "F1_POSITIVE"


class Source(enum.Enum):
    SQUAD = "squad"
    GERMANQUAD = "germanquad"
    NQ_OPEN = "nq-open"
    OTHER = "other"

    @classmethod
    def from_string(cls, value: str) -> "Source":
        try:
            return cls(value.strip().lower())
        except ValueError:
            return cls.OTHER


#: Sources whose answers are normalized with the German profile.
GERMAN_SOURCES = frozenset({Source.GERMANQUAD})


@dataclass(frozen=True)
class Answer:
    """One answer string, optionally anchored to a context by character span."""

    text: str
    span: tuple[int, int] | None = None
    context_id: str | None = None

    def __post_init__(self):
        if self.text is None:
            raise ValueError("answer text must not be None (empty string is fine)")
        if self.span is not None:
            start, end = self.span
            if start < 0 or end < 0:
                raise ValueError(f"span offsets must be non-negative, got {self.span}")
            if not start < end:
                raise ValueError(f"span must satisfy start < end, got {self.span}")


@dataclass(frozen=True)
class AnswerPair:
    """Two answers plus provenance, per-annotator labels, and the merged label.

    ``annotator_labels`` preserves annotation order; when a tie-breaker was
    consulted its label is stored last. ``lexical_split`` is derived from the
    two texts under the normalization profile of ``source`` and is re-checked
    on ingest.
    """

    pair_id: str
    first: Answer
    second: Answer
    lexical_split: LexicalSplit
    source: Source = Source.OTHER
    annotator_labels: tuple[tuple[str, SimilarityLabel], ...] = ()
    majority_label: SimilarityLabel | None = None

    def __post_init__(self):
        if self.majority_label is not None and self.annotator_labels:
            labels = [label for _, label in self.annotator_labels]
            voted = majority_vote(labels)
            if voted is not None:
                if voted != self.majority_label:
                    raise ValueError(
                        f"majority_label {self.majority_label} contradicts the "
                        f"strict majority {voted} of {labels}"
                    )
            elif self.majority_label not in labels:
                # No strict majority: the stored label must be one an
                # annotator actually gave (the tie-breaker's).
                raise ValueError(
                    f"majority_label {self.majority_label} was given by no annotator"
                )

    @property
    def labels(self) -> list[SimilarityLabel]:
        return [label for _, label in self.annotator_labels]


@dataclass(frozen=True)
class MetricScore:
    """A named metric value attached to one pair; None encodes 'undefined'."""

    metric_name: str
    value: float | None
    pair_id: str
    model: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.value is not None and not 0.0 <= self.value <= 1.0:
            raise ValueError(
                f"{self.metric_name} value {self.value} outside [0, 1] for pair "
                f"{self.pair_id}"
            )


def majority_vote(labels: list[SimilarityLabel]) -> SimilarityLabel | None:
    """Label held by a strict majority of annotators, or None on a tie.

    Permutation-invariant; None tells the caller to consult a tie-breaker.
    """
    if not labels:
        raise ValueError("majority_vote requires at least one label")
    label, count = Counter(labels).most_common(1)[0]
    if count * 2 > len(labels):
        return SimilarityLabel(label)
    return None


def pair_to_json_dict(pair: AnswerPair) -> dict:
    """Canonical JSON object for one pair (plus the recomputable split tag)."""
    return {
        "id": pair.pair_id,
        "source": pair.source.value,
        "first": pair.first.text,
        "second": pair.second.text,
        "labels": [
            {"annotator": annotator, "label": int(label)}
            for annotator, label in pair.annotator_labels
        ],
        "majority": int(pair.majority_label) if pair.majority_label is not None else None,
        "lexical_split": pair.lexical_split.value,
    }


def pair_fields_from_json_dict(obj: dict) -> dict:
    """Parse one canonical pair object into constructor fields.

    Unknown fields are ignored. ``lexical_split`` is returned as a string or
    None; the caller recomputes it from the texts and checks any stored value
    (see datasets.read_pairs_jsonl).
    """
    if not isinstance(obj, dict):
        raise ValueError("pair record must be a JSON object")
    for key in ("id", "first", "second"):
        if key not in obj:
            raise ValueError(f"pair record missing required field {key!r}")
    labels = []
    for row in obj.get("labels") or []:
        labels.append((str(row["annotator"]), SimilarityLabel(int(row["label"]))))
    majority = obj.get("majority")
    return {
        "pair_id": str(obj["id"]),
        "first": Answer(text=str(obj["first"])),
        "second": Answer(text=str(obj["second"])),
        "source": Source.from_string(str(obj.get("source", "other"))),
        "annotator_labels": tuple(labels),
        "majority_label": SimilarityLabel(int(majority)) if majority is not None else None,
        "stored_split": obj.get("lexical_split"),
    }
