"""anssim: answer-similarity metrics, pair datasets, and correlation reports.

Lexical metrics (exact match, token F1, top-n accuracy, BLEU, ROUGE-L,
METEOR) run offline; semantic metrics (BERTScore greedy matching,
bi-encoder cosine, SAS cross-encoder) are computed against a model backend,
either the bundled deterministic synthetic one or an HTTP inference sidecar.
"""

from .analysis import (
    CorrelationCell,
    CorrelationReport,
    LayerCorrelation,
    ReportSplit,
    correlate,
    kendall_tau_b,
    layer_sweep,
    pearson_r,
)
from .backends import (
    HttpBackend,
    ModelBackend,
    ModelInfo,
    ModelKind,
    SyntheticBackend,
    TokenEmbeddings,
)
from .datasets import (
    Correctness,
    NqOpenRecord,
    QaRecord,
    attach_labels,
    convert_release_archive,
    extract_pairs,
    ingest_nq_open,
    load_label_rows,
    load_nq_open_jsonl,
    load_squad_json,
    read_pairs_jsonl,
    split_counts,
    write_pairs_jsonl,
)
from .lexical import (
    MeteorParams,
    MeteorStage,
    SpanPrediction,
    bleu,
    exact_match,
    lexical_split_of,
    load_synonym_lexicon,
    max_over_references,
    meteor,
    rouge_l,
    token_f1,
    top_n_accuracy,
)
from .records import (
    Answer,
    AnswerPair,
    LexicalSplit,
    MetricScore,
    SimilarityLabel,
    Source,
    majority_vote,
)
from .semantic import (
    BertScore,
    IdfTable,
    SentenceEmbedding,
    TokenEmbeddingMatrix,
    bertscore,
    bi_encoder_score,
    build_idf_table,
    cosine,
    sas_score,
)
from .stemming import porter_stem
from .textnorm import (
    DE_PROFILE,
    EN_PROFILE,
    Language,
    NormalizationProfile,
    ngrams,
    normalize,
    profile_for,
    tokenize,
)

__version__ = "0.1.0"
