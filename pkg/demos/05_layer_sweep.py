"""BERTScore layer sweep: which transformer layer tracks human judgment best?

Token embeddings can be read from any layer of the encoder. This sweeps all
layers, correlating BERTScore F1 with human labels per layer, and writes a
gnuplot-friendly CSV. With the synthetic backend every layer encodes the
same one-hot geometry, so the curve is flat; with a real sidecar
(ANSSIM_BACKEND_URL) trained STS models typically peak at the last layer
while task-agnostic ones peak in the early layers.
"""

import os
from pathlib import Path

from anssim import (
    HttpBackend,
    SyntheticBackend,
    attach_labels,
    extract_pairs,
    layer_sweep,
    load_label_rows,
    load_squad_json,
)
from anssim.records import Source

fixtures = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
records = load_squad_json(fixtures / "squad_synthetic.json")
pairs = attach_labels(
    extract_pairs(records, source=Source.SQUAD),
    load_label_rows(fixtures / "squad_synthetic_labels.jsonl"),
)

url = os.environ.get("ANSSIM_BACKEND_URL")
if url:
    backend = HttpBackend(url)
    model = "bertscore-trained"
else:
    backend = SyntheticBackend(num_layers=4)
    model = "synthetic-token"
    print("synthetic backend: expect a flat curve "
          "(set ANSSIM_BACKEND_URL for a real one)")

num_layers = backend.models()[model].num_layers
layers = list(range(num_layers + 1))
sweep = layer_sweep(pairs, backend, model, layers)

print(f"\n{model}: Pearson r vs human labels per layer")
for point in sweep:
    r = "undefined" if point.pearson_r is None else f"{point.pearson_r:+.3f}"
    bar = "" if point.pearson_r is None else "#" * max(0, int(20 * abs(point.pearson_r)))
    print(f"  layer {point.layer:>2}: {r:>10}  {bar}")

out = Path("/tmp/anssim_demo_sweep.csv")
with open(out, "w", encoding="utf-8") as handle:
    handle.write("layer,pearson_r,n\n")
    for point in sweep:
        r = "" if point.pearson_r is None else f"{point.pearson_r:.6f}"
        handle.write(f"{point.layer},{r},{point.n}\n")
print(f"\nCSV written to {out}")
print("CLI equivalent: anssim layer-sweep --pairs pairs.jsonl "
      f"--model {model} --layers 0..{num_layers} --out sweep.csv")
