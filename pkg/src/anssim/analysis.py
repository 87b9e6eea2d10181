"""Correlation harness: metric scores vs. human judgment, plus the layer sweep.

Pearson r uses the two-pass product-moment form over float64 arrays (numpy's
pairwise summation keeps it stable and platform-deterministic). Kendall
tau-b uses Knight's O(n log n) algorithm: sort by (x, y), count discordant
pairs as mergesort inversions in y, and correct the denominator with
tie-group counts. Undefined cells (constant series or n < 2) are None,
rendered "-" in text and null in JSON.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .backends import ModelBackend
from .errors import (
    EmptyTokenizationWarning,
    LengthMismatch,
    MissingLabels,
    MissingScores,
)
from .records import AnswerPair, LexicalSplit, MetricScore
from .semantic import IdfTable, TokenEmbeddingMatrix, bertscore_from_matrices

HUMAN_BASELINE = "human"


def pearson_r(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Product-moment correlation; None when either series is constant."""
    if len(x) != len(y):
        raise LengthMismatch(f"series lengths differ: {len(x)} vs {len(y)}")
    if len(x) < 2:
        return None
    ax = np.asarray(x, dtype=np.float64)
    ay = np.asarray(y, dtype=np.float64)
    if np.all(ax == ax[0]) or np.all(ay == ay[0]):
        return None
    dx = ax - ax.mean()
    dy = ay - ay.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        return None
    r = float(dx @ dy) / np.sqrt(sxx * syy)
    return max(-1.0, min(1.0, float(r)))


def _tie_pair_count(sorted_values) -> int:
    """Sum of t*(t-1)/2 over runs of equal values in a sorted sequence."""
    total = 0
    run = 1
    for prev, current in zip(sorted_values, sorted_values[1:]):
        if current == prev:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    total += run * (run - 1) // 2
    return total


def _count_inversions(values: list) -> int:
    """Strict inversions (i < j with values[i] > values[j]) via mergesort."""
    if len(values) < 2:
        return 0
    mid = len(values) // 2
    left = values[:mid]
    right = values[mid:]
    inversions = _count_inversions(left) + _count_inversions(right)
    merged = []
    i = j = 0
    while i < len(left) and j < len(right):
        if right[j] < left[i]:
            inversions += len(left) - i
            merged.append(right[j])
            j += 1
        else:
            merged.append(left[i])
            i += 1
    merged.extend(left[i:])
    merged.extend(right[j:])
    values[:] = merged
    return inversions


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Tie-corrected rank correlation; None when a tie factor degenerates.

    tau_b = (C - D) / sqrt((C + D + Tx)(C + D + Ty)), with Tx/Ty the pairs
    tied only in x / only in y.
    """
    if len(x) != len(y):
        raise LengthMismatch(f"series lengths differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 2:
        return None
    order = sorted(range(n), key=lambda i: (x[i], y[i]))
    xs = [x[i] for i in order]
    ys = [y[i] for i in order]
    n0 = n * (n - 1) // 2
    ties_x = _tie_pair_count(xs)
    ties_y = _tie_pair_count(sorted(y))
    ties_xy = _tie_pair_count(list(zip(xs, ys)))
    discordant = _count_inversions(list(ys))
    concordant_plus_discordant = n0 - ties_x - ties_y + ties_xy
    numerator = concordant_plus_discordant - 2 * discordant
    denom_x = n0 - ties_x
    denom_y = n0 - ties_y
    if denom_x == 0 or denom_y == 0:
        return None
    tau = numerator / np.sqrt(float(denom_x) * float(denom_y))
    return max(-1.0, min(1.0, float(tau)))


class ReportSplit(enum.Enum):
    F1_ZERO = "F1_ZERO"
    F1_POSITIVE = "F1_POSITIVE"
    ALL = "ALL"

    @property
    def heading(self) -> str:
        return {"F1_ZERO": "F1=0", "F1_POSITIVE": "F1>0", "ALL": "all"}[self.value]


@dataclass(frozen=True)
class CorrelationCell:
    metric_name: str
    split: ReportSplit
    pearson_r: float | None
    kendall_tau_b: float | None
    n: int


@dataclass(frozen=True)
class CorrelationReport:
    """Per-metric, per-split correlation table, text- and JSON-renderable."""

    cells: tuple[CorrelationCell, ...]

    @property
    def metric_names(self) -> list[str]:
        names = []
        for cell in self.cells:
            if cell.metric_name not in names:
                names.append(cell.metric_name)
        return names

    def cell(self, metric_name: str, split: ReportSplit) -> CorrelationCell:
        for cell in self.cells:
            if cell.metric_name == metric_name and cell.split is split:
                return cell
        raise KeyError((metric_name, split))

    def to_json_dict(self) -> dict:
        table: dict[str, dict] = {}
        for cell in self.cells:
            table.setdefault(cell.metric_name, {})[cell.split.value] = {
                "pearson_r": _round6(cell.pearson_r),
                "kendall_tau_b": _round6(cell.kendall_tau_b),
                "n": cell.n,
            }
        return {"metrics": table}

    def to_text(self) -> str:
        splits = [ReportSplit.F1_ZERO, ReportSplit.F1_POSITIVE, ReportSplit.ALL]
        header = ["metric"]
        for split in splits:
            header += [f"{split.heading} r", f"{split.heading} tau", f"{split.heading} n"]
        rows = [header]
        for name in self.metric_names:
            row = [name]
            for split in splits:
                try:
                    cell = self.cell(name, split)
                except KeyError:
                    row += ["-", "-", "-"]
                    continue
                row += [_fmt3(cell.pearson_r), _fmt3(cell.kendall_tau_b), str(cell.n)]
            rows.append(row)
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        lines = []
        for index, row in enumerate(rows):
            lines.append(
                "  ".join(
                    cell.ljust(widths[i]) if i == 0 else cell.rjust(widths[i])
                    for i, cell in enumerate(row)
                ).rstrip()
            )
            if index == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _round6(value: float | None) -> float | None:
    if value is None:
        return None
    return float(format(value, ".6f"))


def _fmt3(value: float | None) -> str:
    return "-" if value is None else format(value, ".3f")


def _normalize_scores(
    scores: Iterable[MetricScore] | Mapping[str, Mapping[str, float]],
) -> dict[str, dict[str, float]]:
    if isinstance(scores, Mapping):
        return {metric: dict(by_pair) for metric, by_pair in scores.items()}
    table: dict[str, dict[str, float]] = {}
    for score in scores:
        table.setdefault(score.metric_name, {})[score.pair_id] = score.value
    return table


def _pair_splits(pair: AnswerPair) -> tuple[ReportSplit, ReportSplit]:
    own = (
        ReportSplit.F1_ZERO
        if pair.lexical_split is LexicalSplit.F1_ZERO
        else ReportSplit.F1_POSITIVE
    )
    return own, ReportSplit.ALL


def correlate(
    pairs: Sequence[AnswerPair],
    scores: Iterable[MetricScore] | Mapping[str, Mapping[str, float]],
    metrics: Sequence[str] | None = None,
    human_baseline: bool = True,
) -> CorrelationReport:
    """Correlate every metric with majority labels on each lexical split.

    Reads only pair ids, splits, and labels (never answer texts). The human
    baseline row correlates the first two annotators' labels and is emitted
    only when per-annotator labels exist.
    """
    table = _normalize_scores(scores)
    if metrics is None:
        metrics = sorted(table)
    cells: list[CorrelationCell] = []
    split_members: dict[ReportSplit, list[AnswerPair]] = {s: [] for s in ReportSplit}
    for pair in pairs:
        if pair.majority_label is None:
            raise MissingLabels(f"pair {pair.pair_id} has no majority label")
        for split in _pair_splits(pair):
            split_members[split].append(pair)
    for metric in metrics:
        by_pair = table.get(metric)
        if by_pair is None:
            raise MissingScores(f"no scores at all for metric {metric!r}")
        for split, members in split_members.items():
            values = []
            labels = []
            for pair in members:
                if pair.pair_id not in by_pair or by_pair[pair.pair_id] is None:
                    raise MissingScores(
                        f"pair {pair.pair_id} has no {metric!r} score"
                    )
                values.append(float(by_pair[pair.pair_id]))
                labels.append(float(pair.majority_label))
            cells.append(
                CorrelationCell(
                    metric_name=metric,
                    split=split,
                    pearson_r=pearson_r(values, labels) if values else None,
                    kendall_tau_b=kendall_tau_b(values, labels) if values else None,
                    n=len(values),
                )
            )
    if human_baseline:
        cells = _human_cells(split_members) + cells
    return CorrelationReport(cells=tuple(cells))


def _human_cells(
    split_members: dict[ReportSplit, list[AnswerPair]],
) -> list[CorrelationCell]:
    cells = []
    for split, members in split_members.items():
        first = []
        second = []
        for pair in members:
            if len(pair.annotator_labels) >= 2:
                first.append(float(pair.annotator_labels[0][1]))
                second.append(float(pair.annotator_labels[1][1]))
        if not first:
            continue
        cells.append(
            CorrelationCell(
                metric_name=HUMAN_BASELINE,
                split=split,
                pearson_r=pearson_r(first, second),
                kendall_tau_b=kendall_tau_b(first, second),
                n=len(first),
            )
        )
    return cells


@dataclass(frozen=True)
class LayerCorrelation:
    layer: int
    pearson_r: float | None
    n: int


def layer_sweep(
    pairs: Sequence[AnswerPair],
    backend: ModelBackend,
    model: str,
    layers: Sequence[int],
    idf: IdfTable | None = None,
) -> list[LayerCorrelation]:
    """Correlate BERTScore F1 with human labels at each requested layer.

    Token embeddings for each pair are fetched once for all layers. Pairs
    that tokenize to nothing on either side score 0 (flagged by the metric).
    """
    labels = []
    for pair in pairs:
        if pair.majority_label is None:
            raise MissingLabels(f"pair {pair.pair_id} has no majority label")
        labels.append(float(pair.majority_label))
    per_layer_scores: dict[int, list[float]] = {layer: [] for layer in layers}
    for pair in pairs:
        embeddings = backend.embed_tokens(
            [pair.first.text, pair.second.text], model, list(layers)
        )
        for layer in layers:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", EmptyTokenizationWarning)
                score = bertscore_from_matrices(
                    TokenEmbeddingMatrix.from_backend(embeddings[0], layer),
                    TokenEmbeddingMatrix.from_backend(embeddings[1], layer),
                    idf,
                )
            per_layer_scores[layer].append(score.f1)
    return [
        LayerCorrelation(
            layer=layer,
            pearson_r=pearson_r(per_layer_scores[layer], labels),
            n=len(labels),
        )
        for layer in layers
    ]
