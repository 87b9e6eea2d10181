"""Semantic answer-similarity metrics against a model backend.

By default this uses the bundled synthetic backend, which is deterministic
and needs no downloads: token vectors are one-hot (so BERTScore reduces to
exact token overlap) and cross scores are token-set overlap. Point
ANSSIM_BACKEND_URL at a running sidecar serving real models to see the
metrics pick up semantic similarity that lexical overlap misses.
"""

import os

from anssim import (
    HttpBackend,
    SyntheticBackend,
    bertscore,
    bi_encoder_score,
    build_idf_table,
    sas_score,
)

url = os.environ.get("ANSSIM_BACKEND_URL")
if url:
    backend = HttpBackend(url)
    roster = backend.models()
    token_model = "bertscore-trained" if "bertscore-trained" in roster else None
    sent_model = "bi-encoder" if "bi-encoder" in roster else None
    cross_model = "sas-en" if "sas-en" in roster else None
    print(f"using sidecar at {url} ({len(roster)} models)")
else:
    backend = SyntheticBackend()
    token_model, sent_model, cross_model = (
        "synthetic-token", "synthetic-sentence", "synthetic-cross",
    )
    print("using the in-process synthetic backend (set ANSSIM_BACKEND_URL for real models)")

pairs = [
    ("40,000", "tens of thousands"),   # no lexical overlap, similar meaning
    ("UV", "ultraviolet"),             # equivalent answers
    ("power steering", "air conditioning"),  # dissimilar answers
    ("Joseph Priestley", "Priestley"),
]

print()
if token_model:
    info = backend.models()[token_model]
    layer = info.num_layers  # trained-style usage reads the last layer
    print(f"BERTScore F1 ({token_model}, layer {layer}):")
    for a, b in pairs:
        score = bertscore(a, b, backend, token_model, layer)
        print(f"  {a!r:22} vs {b!r:22} -> {score.f1:.3f}")

if sent_model:
    print(f"\nbi-encoder cosine ({sent_model}):")
    for a, b in pairs:
        print(f"  {a!r:22} vs {b!r:22} -> "
              f"{bi_encoder_score(a, b, backend, sent_model):.3f}")

if cross_model:
    print(f"\nSAS cross-encoder ({cross_model}):")
    for a, b in pairs:
        print(f"  {a!r:22} vs {b!r:22} -> "
              f"{sas_score(a, b, backend, cross_model):.3f}")

# IDF weighting is available for BERTScore but off by default: frequent
# tokens can be down-weighted when computing the matched-token averages.
if token_model:
    corpus = [a for a, _ in pairs] + [b for _, b in pairs]
    idf = build_idf_table(corpus, str.split)
    a, b = "the 40,000 species", "the tens of thousands"
    layer = backend.models()[token_model].num_layers
    plain = bertscore(a, b, backend, token_model, layer)
    weighted = bertscore(a, b, backend, token_model, layer, idf=idf)
    print(f"\nIDF weighting ({a!r} vs {b!r}):")
    print(f"  unweighted F1: {plain.f1:.3f}")
    print(f"  idf-weighted F1: {weighted.f1:.3f}")
