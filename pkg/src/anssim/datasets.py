"""Build annotated answer-pair datasets from raw QA corpora.

Three ingestion paths: multi-way annotated extractive corpora in the SQuAD
JSON layout (pairs of ground-truth answers per question), NQ-open style
prediction records (gold answer vs. model prediction with a correctness
class), and already-built pair records in the canonical JSON Lines schema.
A tolerant archive converter normalizes released data bundles into these.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import zipfile
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import MissingTieBreaker, UnknownPairId
from .lexical import lexical_split_of
from .records import (
    GERMAN_SOURCES,
    Answer,
    AnswerPair,
    LexicalSplit,
    SimilarityLabel,
    Source,
    majority_vote,
    pair_fields_from_json_dict,
    pair_to_json_dict,
)
from .textnorm import DE_PROFILE, EN_PROFILE, NormalizationProfile, normalize


def profile_for_source(source: Source) -> NormalizationProfile:
    return DE_PROFILE if source in GERMAN_SOURCES else EN_PROFILE


@dataclass(frozen=True)
class QaRecord:
    """One question with its multi-way annotated ground-truth answers."""

    question_id: str
    question: str
    answers: tuple[Answer, ...]
    context_id: str | None = None

    def __post_init__(self):
        if not self.answers:
            raise ValueError(f"question {self.question_id} has no answers")


class Correctness(enum.Enum):
    DEF_INCORRECT = 0
    POSSIBLY_CORRECT = 1
    DEF_CORRECT = 2

    @property
    def label(self) -> SimilarityLabel:
        return SimilarityLabel(self.value)

    @classmethod
    def parse(cls, value) -> "Correctness":
        if isinstance(value, cls):
            return value
        if isinstance(value, bool):
            raise ValueError(f"correctness must be 0/1/2 or a class name, got {value!r}")
        if isinstance(value, int):
            return cls(value)
        name = str(value).strip().upper().replace("-", "_").replace(" ", "_")
        aliases = {
            "DEFINITELY_INCORRECT": cls.DEF_INCORRECT,
            "POSSIBLY_CORRECT": cls.POSSIBLY_CORRECT,
            "DEFINITELY_CORRECT": cls.DEF_CORRECT,
        }
        if name in cls.__members__:
            return cls[name]
        if name in aliases:
            return aliases[name]
        raise ValueError(f"unrecognized correctness class {value!r}")


@dataclass(frozen=True)
class NqOpenRecord:
    """Gold answers and one model prediction with its correctness class."""

    question: str
    gold_answers: tuple[str, ...]
    prediction: str
    correctness: Correctness


def load_squad_json(path) -> list[QaRecord]:
    """Read the standard SQuAD layout (data -> paragraphs -> qas -> answers)."""
    with open(path, encoding="utf-8") as handle:
        payload = json.load(handle)
    return squad_records(payload)


def squad_records(payload: dict) -> list[QaRecord]:
    records = []
    for di, article in enumerate(payload.get("data", [])):
        for pi, paragraph in enumerate(article.get("paragraphs", [])):
            context_id = f"{article.get('title', di)}:{pi}"
            for qa in paragraph.get("qas", []):
                answers = []
                for raw in qa.get("answers", []):
                    text = raw.get("text", "")
                    start = raw.get("answer_start")
                    span = None
                    if isinstance(start, int) and start >= 0 and len(text) > 0:
                        span = (start, start + len(text))
                    answers.append(Answer(text=text, span=span, context_id=context_id))
                if not answers:
                    continue
                records.append(
                    QaRecord(
                        question_id=str(qa.get("id", f"{context_id}:{len(records)}")),
                        question=qa.get("question", ""),
                        answers=tuple(answers),
                        context_id=context_id,
                    )
                )
    return records


def extract_pairs(
    records: Iterable[QaRecord],
    profile: NormalizationProfile | None = None,
    source: Source = Source.OTHER,
) -> list[AnswerPair]:
    """All unordered pairs of lexically distinct answers, per question.

    Distinctness and within-question deduplication are judged on normalized
    text, so case-only or punctuation-only variants never form a pair.
    Emission order follows annotation order and is deterministic.
    """
    if profile is None:
        profile = profile_for_source(source)
    pairs = []
    for record in records:
        normalized = [normalize(ans.text, profile) for ans in record.answers]
        seen: set[frozenset[str]] = set()
        for i in range(len(record.answers)):
            for j in range(i + 1, len(record.answers)):
                if normalized[i] == normalized[j]:
                    continue
                key = frozenset((normalized[i], normalized[j]))
                if key in seen:
                    continue
                seen.add(key)
                first, second = record.answers[i], record.answers[j]
                pairs.append(
                    AnswerPair(
                        pair_id=f"{record.question_id}:{i}:{j}",
                        first=first,
                        second=second,
                        lexical_split=lexical_split_of(first.text, second.text, profile),
                        source=source,
                    )
                )
    return pairs


def load_label_rows(path) -> list[tuple[str, str, SimilarityLabel]]:
    """Read annotation rows: JSONL {"pair_id", "annotator", "label"}."""
    rows = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                rows.append(
                    (
                        str(obj["pair_id"]),
                        str(obj["annotator"]),
                        SimilarityLabel(int(obj["label"])),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad annotation row: {exc}") from exc
    return rows


def attach_labels(
    pairs: Sequence[AnswerPair],
    rows: Iterable[tuple[str, str, SimilarityLabel]],
) -> list[AnswerPair]:
    """Attach annotator labels and derive the majority label per pair.

    The first two rows for a pair are the primary annotators; when they
    disagree a third row (the tie-breaker, stored last) decides. Pairs with
    no rows pass through unlabeled.
    """
    by_pair: dict[str, AnswerPair] = {}
    for pair in pairs:
        by_pair[pair.pair_id] = pair
    grouped: dict[str, list[tuple[str, SimilarityLabel]]] = {}
    for pair_id, annotator, label in rows:
        if pair_id not in by_pair:
            raise UnknownPairId(f"annotation references unknown pair {pair_id!r}")
        grouped.setdefault(pair_id, []).append((annotator, SimilarityLabel(label)))
    out = []
    for pair in pairs:
        labels = grouped.get(pair.pair_id)
        if not labels:
            out.append(pair)
            continue
        if len(labels) > 3:
            raise ValueError(
                f"pair {pair.pair_id} has {len(labels)} annotation rows, expected <= 3"
            )
        primary = [label for _, label in labels[:2]]
        if len(primary) < 2:
            raise MissingTieBreaker(
                f"pair {pair.pair_id} has a single annotation; two are required"
            )
        majority = majority_vote(primary)
        if majority is None:
            if len(labels) < 3:
                raise MissingTieBreaker(
                    f"pair {pair.pair_id}: annotators disagree "
                    f"({int(primary[0])} vs {int(primary[1])}) and no tie-breaker "
                    "row is present"
                )
            majority = labels[2][1]
        out.append(
            replace(pair, annotator_labels=tuple(labels), majority_label=majority)
        )
    return out


def ingest_nq_open(
    records: Iterable[NqOpenRecord], source: Source = Source.NQ_OPEN
) -> list[AnswerPair]:
    """Pairs of (single gold answer, prediction) with the correctness label.

    Records with more than one gold answer are dropped; the correctness class
    maps one-to-one onto the similarity label.
    """
    profile = profile_for_source(source)
    pairs = []
    for index, record in enumerate(records):
        if len(record.gold_answers) != 1:
            continue
        gold = record.gold_answers[0]
        pairs.append(
            AnswerPair(
                pair_id=f"{source.value}:{index}",
                first=Answer(text=gold),
                second=Answer(text=record.prediction),
                lexical_split=lexical_split_of(gold, record.prediction, profile),
                source=source,
                majority_label=record.correctness.label,
            )
        )
    return pairs


def load_nq_open_jsonl(path) -> list[NqOpenRecord]:
    """Read NQ-open rows: JSONL {"question", "gold_answers", "prediction", "correctness"}."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(
                    NqOpenRecord(
                        question=str(obj.get("question", "")),
                        gold_answers=tuple(str(a) for a in obj["gold_answers"]),
                        prediction=str(obj["prediction"]),
                        correctness=Correctness.parse(obj["correctness"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad NQ-open row: {exc}") from exc
    return records


def pair_from_json_dict(obj: dict) -> AnswerPair:
    """Build an AnswerPair from one canonical record, re-deriving the split.

    A stored split tag must agree with the recomputation.
    """
    fields = pair_fields_from_json_dict(obj)
    stored_split = fields.pop("stored_split")
    source = fields["source"]
    split = lexical_split_of(
        fields["first"].text, fields["second"].text, profile_for_source(source)
    )
    if stored_split is not None and LexicalSplit(stored_split) is not split:
        raise ValueError(
            f"pair {fields['pair_id']}: stored lexical_split {stored_split} "
            f"contradicts recomputed {split.value}"
        )
    return AnswerPair(lexical_split=split, **fields)


def read_pairs_jsonl(path) -> list[AnswerPair]:
    """Read canonical pair records, verifying split tags; line-precise errors."""
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                pairs.append(pair_from_json_dict(json.loads(line)))
            except (ValueError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return pairs


def write_pairs_jsonl(pairs: Iterable[AnswerPair], path) -> None:
    """Write canonical pair records, one JSON object per line, keys sorted."""
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(
                json.dumps(pair_to_json_dict(pair), ensure_ascii=False, sort_keys=True)
            )
            handle.write("\n")


# --- released-archive conversion ------------------------------------------

_FIRST_COLUMNS = ("first", "answer1", "answer_1", "answer_a", "gold_answer", "gold")
_SECOND_COLUMNS = ("second", "answer2", "answer_2", "answer_b", "prediction", "pred")


def _dataset_key(member_name: str) -> str:
    name = Path(member_name).stem.lower()
    for key in ("germanquad", "german", "squad", "nq"):
        if key in name:
            return {"german": "germanquad", "nq": "nq-open"}.get(key, key)
    return name


def _source_for_key(key: str) -> Source:
    return Source.from_string(key)


def _convert_delimited(text: str, key: str) -> list[AnswerPair]:
    sample = text[:4096]
    delimiter = "\t" if "\t" in sample.splitlines()[0] else ","
    reader = csv.DictReader(io.StringIO(text), delimiter=delimiter)
    fieldnames = [name.strip().lower() for name in reader.fieldnames or []]
    first_col = next((c for c in _FIRST_COLUMNS if c in fieldnames), None)
    second_col = next((c for c in _SECOND_COLUMNS if c in fieldnames), None)
    if first_col is None or second_col is None:
        raise ValueError(
            f"cannot locate answer columns in header {reader.fieldnames!r}"
        )
    label_cols = [
        name
        for name in fieldnames
        if name.startswith(("label", "annotator", "vote", "score"))
    ]
    source = _source_for_key(key)
    profile = profile_for_source(source)
    pairs = []
    for index, row in enumerate(reader):
        row = {(k or "").strip().lower(): v for k, v in row.items()}
        first, second = row[first_col] or "", row[second_col] or ""
        labels = tuple(
            (col, SimilarityLabel(int(float(row[col]))))
            for col in label_cols
            if row.get(col) not in (None, "")
        )
        majority = majority_vote([l for _, l in labels]) if labels else None
        if majority is None and len(labels) == 3:
            majority = labels[2][1]
        pairs.append(
            AnswerPair(
                pair_id=f"{key}:{index}",
                first=Answer(text=first),
                second=Answer(text=second),
                lexical_split=lexical_split_of(first, second, profile),
                source=source,
                annotator_labels=labels,
                majority_label=majority,
            )
        )
    return pairs


def _convert_row_objects(name: str, key: str, objs: list) -> list[AnswerPair]:
    if not objs:
        return []
    keys = set(objs[0]) if isinstance(objs[0], dict) else set()
    if {"first", "second"} <= keys:
        return [pair_from_json_dict(obj) for obj in objs]
    if {"gold_answers", "prediction"} <= keys:
        records = [
            NqOpenRecord(
                question=str(obj.get("question", "")),
                gold_answers=tuple(str(a) for a in obj["gold_answers"]),
                prediction=str(obj["prediction"]),
                correctness=Correctness.parse(obj["correctness"]),
            )
            for obj in objs
        ]
        return ingest_nq_open(records, source=_source_for_key(key))
    raise ValueError(f"{name}: unrecognized record schema {sorted(keys)!r}")


def _convert_member(name: str, text: str) -> tuple[str, list[AnswerPair]] | None:
    key = _dataset_key(name)
    stripped = text.strip()
    if not stripped:
        return None
    if not stripped.startswith(("{", "[")):
        return key, _convert_delimited(text, key)
    try:
        payload = json.loads(stripped)
    except json.JSONDecodeError:
        payload = None
    if payload is None:
        # JSON Lines: one object per line
        objs = [json.loads(line) for line in stripped.splitlines() if line.strip()]
        return key, _convert_row_objects(name, key, objs)
    if isinstance(payload, dict) and "data" in payload:
        return key, extract_pairs(squad_records(payload), source=_source_for_key(key))
    if isinstance(payload, list):
        return key, _convert_row_objects(name, key, payload)
    if isinstance(payload, dict):
        return key, _convert_row_objects(name, key, [payload])
    raise ValueError(f"{name}: unrecognized JSON payload")


def convert_release_archive(zip_path) -> dict[str, list[AnswerPair]]:
    """Normalize a released data bundle into pair lists, keyed by dataset.

    Member layout is inferred per file: SQuAD-layout JSON, canonical pair
    JSONL, NQ-open JSONL, or a delimited table with a header. Members that
    carry multiple files for one dataset are concatenated in name order.
    """
    datasets: dict[str, list[AnswerPair]] = {}
    with zipfile.ZipFile(zip_path) as archive:
        for member in sorted(archive.namelist()):
            if member.endswith("/") or "__MACOSX" in member:
                continue
            if Path(member).name.startswith("."):
                continue
            raw = archive.read(member)
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError:
                continue
            converted = _convert_member(member, text)
            if converted is None:
                continue
            key, pairs = converted
            datasets.setdefault(key, []).extend(pairs)
    return datasets


def split_counts(pairs: Iterable[AnswerPair]) -> dict[str, int]:
    """Pair counts per lexical split plus the total."""
    counts = {LexicalSplit.F1_ZERO: 0, LexicalSplit.F1_POSITIVE: 0}
    total = 0
    for pair in pairs:
        counts[pair.lexical_split] += 1
        total += 1
    return {
        "total": total,
        "f1_zero": counts[LexicalSplit.F1_ZERO],
        "f1_positive": counts[LexicalSplit.F1_POSITIVE],
    }
