"""How well does each metric track human judgment?

Scores every pair with the full metric battery, then correlates each metric
with majority human labels using Pearson's r and Kendall's tau-b, split by
lexical overlap (F1=0 vs F1>0). The F1=0 split is the interesting one: all
lexical metrics are constant zero there (undefined correlation, shown as
"-"), while semantic metrics still rank pairs.
"""

from pathlib import Path

from anssim import (
    SyntheticBackend,
    attach_labels,
    bertscore,
    correlate,
    extract_pairs,
    load_label_rows,
    load_squad_json,
    sas_score,
)
from anssim.cli import RunConfig, score_pairs
from anssim.records import MetricScore, Source

fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
records = load_squad_json(fixtures / "squad_synthetic.json")
pairs = attach_labels(
    extract_pairs(records, source=Source.SQUAD),
    load_label_rows(fixtures / "squad_synthetic_labels.jsonl"),
)

# lexical battery via the scoring pipeline (offline)
scores = score_pairs(pairs, RunConfig())

# plus two semantic metrics through the synthetic backend
backend = SyntheticBackend()
for pair in pairs:
    scores.append(
        MetricScore(
            "sas",
            sas_score(pair.first.text, pair.second.text, backend, "synthetic-cross"),
            pair.pair_id,
        )
    )
    score = bertscore(
        pair.first.text, pair.second.text, backend, "synthetic-token", layer=1
    )
    scores.append(MetricScore("bertscore", score.f1, pair.pair_id))

report = correlate(pairs, scores)
print(report.to_text())
print("The human row correlates the first two annotators with each other;")
print('"-" marks undefined cells (a constant series, e.g. every lexical')
print("metric on the no-overlap split).")
print()
print("CLI equivalent:")
print("  anssim score --pairs pairs.jsonl --out scores.jsonl")
print("  anssim correlate --pairs pairs.jsonl --scores scores.jsonl "
      "--out report.txt --out report.json")
