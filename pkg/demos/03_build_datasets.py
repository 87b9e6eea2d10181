"""Building annotated answer-pair datasets from raw QA corpora.

Three ingestion paths, shown on the bundled synthetic fixtures:
  1. multi-way annotated extractive data (SQuAD JSON layout) -> answer pairs
  2. annotation rows -> per-annotator labels + majority vote with tie-breaks
  3. NQ-open style records (gold answer, prediction, correctness class)
"""

from pathlib import Path

from anssim import (
    Source,
    attach_labels,
    extract_pairs,
    ingest_nq_open,
    load_label_rows,
    load_nq_open_jsonl,
    load_squad_json,
    split_counts,
    write_pairs_jsonl,
)

fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

# 1. pairs of ground-truth answers from multi-way annotations
records = load_squad_json(fixtures / "squad_synthetic.json")
print(f"{len(records)} questions loaded")
for record in records:
    print(f"  {record.question_id}: {[a.text for a in record.answers]}")

pairs = extract_pairs(records, source=Source.SQUAD)
counts = split_counts(pairs)
print(f"\n{counts['total']} pairs "
      f"(F1=0: {counts['f1_zero']}, F1>0: {counts['f1_positive']})")
print("identical answers never pair up; case-only variants do not either.")

# 2. human labels: two annotators, a third breaks disagreements
rows = load_label_rows(fixtures / "squad_synthetic_labels.jsonl")
labeled = attach_labels(pairs, rows)
print("\nlabels (0 dissimilar / 1 approximately similar / 2 equivalent):")
for pair in labeled:
    votes = ", ".join(f"{who}={int(label)}" for who, label in pair.annotator_labels)
    tie = "  <- tie-break" if len(pair.annotator_labels) == 3 else ""
    print(f"  {pair.pair_id}: {pair.first.text!r} / {pair.second.text!r} "
          f"[{votes}] -> {int(pair.majority_label)}{tie}")

# 3. NQ-open records: gold answer vs model prediction, correctness class
nq_records = load_nq_open_jsonl(fixtures / "nq_synthetic.jsonl")
nq_pairs = ingest_nq_open(nq_records)
dropped = len(nq_records) - len(nq_pairs)
print(f"\nNQ-open ingest: {len(nq_pairs)} pairs "
      f"({dropped} records dropped for not having exactly one gold answer)")

out = Path("/tmp/anssim_demo_pairs.jsonl")
write_pairs_jsonl(labeled, out)
print(f"\ncanonical pair records written to {out}")
print("same result via the CLI:")
print("  anssim pairs --source squad --input <squad.json> "
      "--labels <labels.jsonl> --out pairs.jsonl")
