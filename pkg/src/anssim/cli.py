"""Command-line entry point.

Subcommands: ``pairs`` (build pair datasets), ``score`` (run metrics over a
pair file), ``correlate`` (correlation report), ``layer-sweep`` (per-layer
BERTScore correlation), ``check-backend`` (sidecar health check).

Configuration precedence: flags > ANSSIM_* environment variables > JSON
config file > defaults. Exit codes: 0 success, 1 failed checks, 2 config
error, 3 backend unreachable, 4 malformed input. All serialized floats are
fixed at 6 decimal digits and JSON keys are sorted, so outputs are
byte-stable across runs and platforms.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

from . import analysis, datasets, lexical, semantic
from .backends import HttpBackend, ModelBackend, ModelKind, SyntheticBackend
from .errors import (
    AnssimError,
    BackendError,
    ConfigError,
    MissingLabels,
    MissingScores,
)
from .records import AnswerPair, MetricScore, Source
from .textnorm import Language, NormalizationProfile, UnicodeForm, profile_for

LEXICAL_METRICS = ("exact_match", "f1", "bleu", "rouge_l", "meteor")
SEMANTIC_METRICS = ("sas", "bi_encoder", "bertscore_vanilla", "bertscore_trained")

_METRIC_KINDS = {
    "sas": ModelKind.CROSS_ENCODER,
    "bi_encoder": ModelKind.SENTENCE_ENCODER,
    "bertscore_vanilla": ModelKind.TOKEN_ENCODER,
    "bertscore_trained": ModelKind.TOKEN_ENCODER,
}

#: Vanilla BERTScore reads an early layer; the trained variant reads the last.
VANILLA_BERTSCORE_LAYER = 2

_DEFAULT_ALIASES = {
    Language.EN: {
        "sas": "sas-en",
        "bi_encoder": "bi-encoder",
        "bertscore_vanilla": "bertscore-vanilla-en",
        "bertscore_trained": "bertscore-trained",
    },
    Language.DE: {
        "sas": "sas-de",
        "bi_encoder": "bi-encoder",
        "bertscore_vanilla": "bertscore-vanilla-de",
        "bertscore_trained": "bertscore-trained",
    },
}

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_BACKEND = 3
EXIT_INPUT = 4


@dataclass(frozen=True)
class RunConfig:
    backend_url: str | None = None
    language: Language = Language.EN
    metrics: tuple[str, ...] = ()
    model_aliases: dict[str, str] = field(default_factory=dict)
    normalization: dict = field(default_factory=dict)
    cache_dir: Path | None = None
    workers: int = 4
    synonyms: Path | None = None

    def alias_for(self, metric: str) -> str:
        defaults = _DEFAULT_ALIASES[self.language]
        alias = self.model_aliases.get(metric, defaults.get(metric))
        if alias is None:
            raise ConfigError(f"no model alias configured for metric {metric!r}")
        return alias

    def profile(self) -> NormalizationProfile:
        profile = profile_for(self.language)
        overrides = dict(self.normalization)
        if not overrides:
            return profile
        if "article_list" in overrides:
            overrides["article_list"] = tuple(overrides["article_list"])
        if "unicode_form" in overrides:
            overrides["unicode_form"] = UnicodeForm(overrides["unicode_form"].upper())
        try:
            return profile.replace(**overrides)
        except TypeError as exc:
            raise ConfigError(f"bad normalization override: {exc}") from exc


def load_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file, environment, and flags (in that order)."""
    config = RunConfig()
    path = getattr(args, "config", None)
    if path:
        try:
            with open(path, encoding="utf-8") as handle:
                raw = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        config = _apply_config_dict(config, raw, origin=str(path))
    env = os.environ
    if env.get("ANSSIM_BACKEND_URL"):
        config = replace(config, backend_url=env["ANSSIM_BACKEND_URL"])
    if env.get("ANSSIM_LANG"):
        config = replace(config, language=_parse_language(env["ANSSIM_LANG"]))
    if env.get("ANSSIM_CACHE_DIR"):
        config = replace(config, cache_dir=Path(env["ANSSIM_CACHE_DIR"]))
    if env.get("ANSSIM_WORKERS"):
        config = replace(config, workers=_parse_workers(env["ANSSIM_WORKERS"]))
    if getattr(args, "backend_url", None):
        config = replace(config, backend_url=args.backend_url)
    if getattr(args, "lang", None):
        config = replace(config, language=_parse_language(args.lang))
    if getattr(args, "cache_dir", None):
        config = replace(config, cache_dir=Path(args.cache_dir))
    if getattr(args, "workers", None):
        config = replace(config, workers=_parse_workers(args.workers))
    if getattr(args, "metrics", None):
        config = replace(
            config, metrics=tuple(m.strip() for m in args.metrics.split(",") if m.strip())
        )
    if getattr(args, "synonyms", None):
        config = replace(config, synonyms=Path(args.synonyms))
    return config


def _apply_config_dict(config: RunConfig, raw: dict, origin: str) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError(f"{origin}: config must be a JSON object")
    known = {
        "backend_url",
        "language",
        "metrics",
        "model_aliases",
        "normalization",
        "cache_dir",
        "workers",
        "synonyms",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{origin}: unknown config keys {sorted(unknown)}")
    updates: dict = {}
    if "backend_url" in raw:
        updates["backend_url"] = str(raw["backend_url"])
    if "language" in raw:
        updates["language"] = _parse_language(raw["language"])
    if "metrics" in raw:
        updates["metrics"] = tuple(str(m) for m in raw["metrics"])
    if "model_aliases" in raw:
        updates["model_aliases"] = {str(k): str(v) for k, v in raw["model_aliases"].items()}
    if "normalization" in raw:
        updates["normalization"] = dict(raw["normalization"])
    if "cache_dir" in raw:
        updates["cache_dir"] = Path(raw["cache_dir"])
    if "workers" in raw:
        updates["workers"] = _parse_workers(raw["workers"])
    if "synonyms" in raw:
        updates["synonyms"] = Path(raw["synonyms"])
    return replace(config, **updates)


def _parse_language(value) -> Language:
    try:
        return Language(str(value).lower())
    except ValueError as exc:
        raise ConfigError(f"unknown language {value!r} (expected en or de)") from exc


def _parse_workers(value) -> int:
    try:
        workers = int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"workers must be an integer, got {value!r}") from exc
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    return workers


def format_score(value: float) -> float:
    """Fix serialized floats at 6 decimal digits (round-half-even)."""
    return float(format(value, ".6f"))


def make_backend(config: RunConfig) -> ModelBackend:
    """Backend from config; the synthetic:// scheme selects the offline stub."""
    url = config.backend_url
    if url is None:
        raise ConfigError(
            "semantic metrics need a backend: set --backend-url, "
            "ANSSIM_BACKEND_URL, or backend_url in the config file"
        )
    if url.startswith("synthetic:"):
        return SyntheticBackend()
    return HttpBackend(base_url=url)


# --- scoring ----------------------------------------------------------------


class _ScoreCache:
    """Semantic score cache keyed by (model revision, metric, pair texts)."""

    def __init__(self, root: Path):
        self.root = root
        root.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    @staticmethod
    def key(metric: str, model: str, revision: str, layer: int | None, a: str, b: str) -> str:
        payload = json.dumps(
            {
                "metric": metric,
                "model": model,
                "revision": revision,
                "layer": layer,
                "first": a,
                "second": b,
            },
            sort_keys=True,
            ensure_ascii=False,
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def get(self, key: str) -> float | None:
        path = self._path(key)
        try:
            with open(path, encoding="utf-8") as handle:
                return float(json.load(handle)["value"])
        except (OSError, ValueError, KeyError):
            return None

    def put(self, key: str, value: float) -> None:
        path = self._path(key)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump({"value": value}, handle)
        os.replace(tmp, path)


def _lexical_scorer(
    metric: str, profile: NormalizationProfile, params: lexical.MeteorParams
) -> Callable[[str, str], float]:
    if metric == "exact_match":
        return lambda a, b: lexical.exact_match(a, b, profile)
    if metric == "f1":
        return lambda a, b: lexical.token_f1(a, b, profile)
    if metric == "bleu":
        return lambda a, b: lexical.bleu(a, b, profile)
    if metric == "rouge_l":
        return lambda a, b: lexical.rouge_l(a, b, profile)
    if metric == "meteor":
        return lambda a, b: lexical.meteor(a, b, profile, params)
    raise ConfigError(f"unknown metric {metric!r}")


def _default_metrics(config: RunConfig) -> tuple[str, ...]:
    if config.metrics:
        return config.metrics
    metrics = ["exact_match", "f1", "bleu", "rouge_l"]
    if config.language is Language.EN:
        metrics.append("meteor")
    return tuple(metrics)


def score_pairs(
    pairs: Sequence[AnswerPair], config: RunConfig, backend: ModelBackend | None = None
) -> list[MetricScore]:
    """Score every pair with every configured metric, input order preserved.

    Lexical metrics run fully offline; semantic metrics go through the
    backend with a bounded worker pool and an optional on-disk cache.
    """
    metrics = _default_metrics(config)
    unknown = [m for m in metrics if m not in LEXICAL_METRICS + SEMANTIC_METRICS]
    if unknown:
        raise ConfigError(f"unknown metrics: {', '.join(unknown)}")
    if config.language is Language.DE and "meteor" in metrics:
        raise ConfigError("meteor is not available for de")
    profile = config.profile()
    meteor_params = lexical.DEFAULT_METEOR_PARAMS
    if config.synonyms is not None:
        meteor_params = lexical.MeteorParams(
            stages=(
                lexical.MeteorStage.EXACT,
                lexical.MeteorStage.STEM,
                lexical.MeteorStage.SYNONYM,
            ),
            synonym_lexicon=lexical.load_synonym_lexicon(config.synonyms),
        )
    semantic_requested = [m for m in metrics if m in SEMANTIC_METRICS]
    if semantic_requested and backend is None:
        backend = make_backend(config)
    cache = _ScoreCache(config.cache_dir) if config.cache_dir else None
    roster = backend.models() if semantic_requested else {}
    layer_by_metric: dict[str, int] = {}
    for metric in semantic_requested:
        alias = config.alias_for(metric)
        info = roster.get(alias)
        if info is None:
            raise BackendError(
                f"backend roster is missing model {alias!r} for metric {metric!r}",
                model=alias,
            )
        if info.kind is not _METRIC_KINDS[metric]:
            raise BackendError(
                f"model {alias!r} has kind {info.kind.value}, metric {metric!r} "
                f"needs {_METRIC_KINDS[metric].value}",
                model=alias,
            )
        if metric == "bertscore_vanilla":
            layer_by_metric[metric] = min(VANILLA_BERTSCORE_LAYER, info.num_layers)
        elif metric == "bertscore_trained":
            layer_by_metric[metric] = info.num_layers

    def score_one(pair: AnswerPair) -> list[MetricScore]:
        row = []
        for metric in metrics:
            if metric in LEXICAL_METRICS:
                value = _lexical_scorer(metric, profile, meteor_params)(
                    pair.first.text, pair.second.text
                )
                model = None
            else:
                alias = config.alias_for(metric)
                layer = layer_by_metric.get(metric)
                key = None
                value = None
                if cache is not None:
                    key = cache.key(
                        metric,
                        alias,
                        roster[alias].revision,
                        layer,
                        pair.first.text,
                        pair.second.text,
                    )
                    value = cache.get(key)
                if value is None:
                    if metric == "sas":
                        value = semantic.sas_score(
                            pair.first.text, pair.second.text, backend, alias
                        )
                    elif metric == "bi_encoder":
                        value = semantic.bi_encoder_score(
                            pair.first.text, pair.second.text, backend, alias
                        )
                    else:
                        value = semantic.bertscore(
                            pair.first.text, pair.second.text, backend, alias, layer
                        ).f1
                    if cache is not None:
                        cache.put(key, value)
                model = alias
            row.append(
                MetricScore(
                    metric_name=metric,
                    value=format_score(value),
                    pair_id=pair.pair_id,
                    model=model,
                )
            )
        return row

    if semantic_requested:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(score_one, pairs))
    else:
        rows = [score_one(pair) for pair in pairs]
    return [score for row in rows for score in row]


def read_scores_jsonl(path) -> list[MetricScore]:
    scores = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                scores.append(
                    MetricScore(
                        metric_name=str(obj["metric"]),
                        value=None if obj["value"] is None else float(obj["value"]),
                        pair_id=str(obj["pair_id"]),
                        model=obj.get("model"),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad score record: {exc}") from exc
    return scores


def write_scores_jsonl(scores: Sequence[MetricScore], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for score in scores:
            record = {
                "metric": score.metric_name,
                "model": score.model,
                "pair_id": score.pair_id,
                "value": None if score.value is None else format_score(score.value),
            }
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True))
            handle.write("\n")


# --- subcommands ------------------------------------------------------------


def _cmd_pairs(args: argparse.Namespace) -> int:
    source = Source.from_string(args.source)
    input_path = Path(args.input)
    if input_path.suffix == ".zip":
        converted = datasets.convert_release_archive(input_path)
        key = source.value
        if key not in converted:
            raise ValueError(
                f"{input_path}: archive has no {key!r} dataset "
                f"(found {sorted(converted)})"
            )
        pairs = converted[key]
    elif source is Source.NQ_OPEN:
        pairs = datasets.ingest_nq_open(datasets.load_nq_open_jsonl(input_path))
    else:
        records = datasets.load_squad_json(input_path)
        pairs = datasets.extract_pairs(records, source=source)
    if args.labels:
        pairs = datasets.attach_labels(pairs, datasets.load_label_rows(args.labels))
    datasets.write_pairs_jsonl(pairs, args.out)
    counts = datasets.split_counts(pairs)
    print(
        f"{counts['total']} pairs written to {args.out} "
        f"(F1=0: {counts['f1_zero']}, F1>0: {counts['f1_positive']})"
    )
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    config = load_config(args)
    pairs = datasets.read_pairs_jsonl(args.pairs)
    scores = score_pairs(pairs, config)
    write_scores_jsonl(scores, args.out)
    print(f"{len(scores)} scores written to {args.out}")
    return 0


def _cmd_correlate(args: argparse.Namespace) -> int:
    config = load_config(args)
    pairs = datasets.read_pairs_jsonl(args.pairs)
    scores = read_scores_jsonl(args.scores)
    metrics = list(config.metrics) or None
    report = analysis.correlate(pairs, scores, metrics=metrics)
    outputs = args.out or []
    if not outputs:
        sys.stdout.write(report.to_text())
        return 0
    for out in outputs:
        out_path = Path(out)
        if out_path.suffix == ".json":
            with open(out_path, "w", encoding="utf-8") as handle:
                json.dump(report.to_json_dict(), handle, indent=2, sort_keys=True)
                handle.write("\n")
        else:
            with open(out_path, "w", encoding="utf-8") as handle:
                handle.write(report.to_text())
        print(f"report written to {out_path}")
    return 0


def _parse_layers(spec: str, num_layers: int) -> list[int]:
    spec = spec.strip().lower().replace("last", str(num_layers))
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(part) for part in spec.split(",") if part.strip()]


def _cmd_layer_sweep(args: argparse.Namespace) -> int:
    config = load_config(args)
    pairs = datasets.read_pairs_jsonl(args.pairs)
    backend = make_backend(config)
    roster = backend.models()
    info = roster.get(args.model)
    if info is None:
        raise BackendError(f"backend roster is missing model {args.model!r}", model=args.model)
    layers = _parse_layers(args.layers, info.num_layers)
    sweep = analysis.layer_sweep(pairs, backend, args.model, layers)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write("layer,pearson_r,n\n")
        for point in sweep:
            r = "" if point.pearson_r is None else format(point.pearson_r, ".6f")
            handle.write(f"{point.layer},{r},{point.n}\n")
    print(f"sweep written to {args.out}")
    if args.plot:
        _write_plot(sweep, args.plot)
        print(f"plot written to {args.plot}")
    return 0


def _write_plot(sweep, path) -> None:
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise ConfigError(
            "matplotlib is required for --plot (pip install anssim[plot])"
        ) from exc
    xs = [point.layer for point in sweep]
    ys = [point.pearson_r if point.pearson_r is not None else float("nan") for point in sweep]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, ys, marker="o")
    ax.set_xlabel("layer")
    ax.set_ylabel("Pearson r vs. human labels")
    ax.set_title("BERTScore layer sweep")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _cmd_check_backend(args: argparse.Namespace) -> int:
    config = load_config(args)
    if config.backend_url is None:
        config = replace(config, backend_url="http://127.0.0.1:8765")
    backend = make_backend(config)
    roster = backend.models()
    print(f"backend at {config.backend_url}: {len(roster)} models")
    failures = 0
    for metric in SEMANTIC_METRICS:
        alias = config.alias_for(metric)
        info = roster.get(alias)
        if info is None:
            print(f"FAIL {metric}: model {alias!r} missing from roster")
            failures += 1
            continue
        if info.kind is not _METRIC_KINDS[metric]:
            print(
                f"FAIL {metric}: model {alias!r} has kind {info.kind.value}, "
                f"expected {_METRIC_KINDS[metric].value}"
            )
            failures += 1
            continue
        if metric == "bertscore_vanilla" and info.num_layers < 1:
            print(f"FAIL {metric}: model {alias!r} reports {info.num_layers} layers")
            failures += 1
            continue
        try:
            if info.kind is ModelKind.TOKEN_ENCODER:
                result = backend.embed_tokens(["ping"], alias, [0, info.num_layers])
                detail = f"{len(result[0].tokens)} tokens, dim {info.dim}"
            elif info.kind is ModelKind.SENTENCE_ENCODER:
                vectors = backend.embed_sentence(["ping"], alias)
                detail = f"vector dim {vectors.shape[1]}"
            else:
                scores = backend.cross_score([("ping", "ping")], alias)
                detail = f"self-score {scores[0]:.3f}"
        except AnssimError as exc:
            print(f"FAIL {metric}: round-trip failed: {exc}")
            failures += 1
            continue
        print(f"OK   {metric}: {alias} ({info.kind.value}, {detail})")
    return EXIT_CHECK_FAILED if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anssim",
        description="Answer-similarity metrics, datasets, and correlation reports.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--lang", choices=["en", "de"], help="normalization language")
    common.add_argument("--backend-url", help="model backend base URL (or synthetic://)")
    common.add_argument("--cache-dir", help="directory for the semantic score cache")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pairs = sub.add_parser(
        "pairs", parents=[common], help="build an answer-pair dataset"
    )
    p_pairs.add_argument(
        "--source", required=True, choices=["squad", "germanquad", "nq-open"]
    )
    p_pairs.add_argument("--input", required=True, help="corpus file or release zip")
    p_pairs.add_argument("--labels", help="annotation rows (JSONL)")
    p_pairs.add_argument("--out", required=True, help="output pair file (JSONL)")
    p_pairs.set_defaults(func=_cmd_pairs)

    p_score = sub.add_parser("score", parents=[common], help="score a pair file")
    p_score.add_argument("--pairs", required=True)
    p_score.add_argument("--out", required=True, help="output score file (JSONL)")
    p_score.add_argument("--metrics", help="comma-separated metric names")
    p_score.add_argument("--workers", help="max in-flight backend requests")
    p_score.add_argument("--synonyms", help="synonym lexicon for METEOR (TSV)")
    p_score.set_defaults(func=_cmd_score)

    p_corr = sub.add_parser(
        "correlate", parents=[common], help="correlate scores with human labels"
    )
    p_corr.add_argument("--pairs", required=True)
    p_corr.add_argument("--scores", required=True)
    p_corr.add_argument("--metrics", help="comma-separated metric names")
    p_corr.add_argument(
        "--out",
        action="append",
        help="report path (.txt or .json); repeat for both formats",
    )
    p_corr.set_defaults(func=_cmd_correlate)

    p_sweep = sub.add_parser(
        "layer-sweep", parents=[common], help="BERTScore correlation per layer"
    )
    p_sweep.add_argument("--pairs", required=True)
    p_sweep.add_argument("--model", required=True, help="token-encoder model alias")
    p_sweep.add_argument(
        "--layers", required=True, help="e.g. 0..12, or 0,2,4, or last"
    )
    p_sweep.add_argument("--out", required=True, help="output CSV")
    p_sweep.add_argument("--plot", help="optional plot image path")
    p_sweep.set_defaults(func=_cmd_layer_sweep)

    p_check = sub.add_parser(
        "check-backend", parents=[common], help="verify the backend roster"
    )
    p_check.set_defaults(func=_cmd_check_backend)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (MissingScores, MissingLabels) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
