"""Command-line entry point for reproducible attribution runs.

Subcommands: ``attribute`` (per-sentence scores + heatmaps),
``evaluate`` (deletion curves, IoT, neutral audit, summary JSON), and
``ablate`` (truncation-rule sweep against full marginalization). Every
output file embeds or sits next to the fully resolved run configuration
so runs can be replayed; with a fixed seed, outputs are byte-identical
across runs.

Exit codes: 0 success, 1 configuration/validation error, 2 oracle or
transport failure, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import evaluation, report
from .engine import AttributionMap, MarginalizationConfig
from .errors import ConfigError, EngineError, MargattrError, OracleError
from .oracles import (
    prior_likelihood,
    train_naive_bayes,
    train_ngram_lm,
    uniform_likelihood,
)
from .remote import remote_oracle
from .vocab import TaggedCorpus, Vocabulary, load_corpus, load_vocabulary

ENDPOINT_ENV_VAR = "MARGIN_ATTR_ENDPOINT"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_ORACLE = 2
EXIT_INTERNAL = 3

_FORMATS = ("json", "csv", "html", "ansi")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for one CLI run."""

    subcommand: str
    corpus: str
    vocab: str
    classifier: str
    likelihood: str
    sigma: float
    top_n: int | None
    methods: tuple[str, ...]
    target_class: int | None
    seed: int
    out: str
    formats: tuple[str, ...]
    smoothing: float
    prob_clamp: float
    batch_size: int
    jobs: int
    timeout: float = 10.0
    retries: int = 2
    max_fraction: float = 0.2
    iot: bool = False
    neutral: bool = False
    top_k: int = 10
    polarity: str = "pos"
    sigma_grid: tuple[float, ...] = ()
    top_n_grid: tuple[int, ...] = ()
    vocab_cap: int = 5000

    def provenance(self) -> dict:
        doc = {
            "subcommand": self.subcommand,
            "corpus": self.corpus,
            "vocab": self.vocab,
            "classifier": self.classifier,
            "likelihood": self.likelihood,
            "sigma": self.sigma,
            "top_n": self.top_n,
            "methods": list(self.methods),
            "target_class": self.target_class,
            "seed": self.seed,
            "out": self.out,
            "formats": list(self.formats),
            "smoothing": self.smoothing,
            "prob_clamp": self.prob_clamp,
            "batch_size": self.batch_size,
            "jobs": self.jobs,
        }
        if self.subcommand == "evaluate":
            doc.update(
                max_fraction=self.max_fraction,
                iot=self.iot,
                neutral=self.neutral,
                top_k=self.top_k,
                polarity=self.polarity,
            )
        if self.subcommand == "ablate":
            doc.update(
                sigma_grid=list(self.sigma_grid),
                top_n_grid=list(self.top_n_grid),
                vocab_cap=self.vocab_cap,
            )
        return doc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margattr",
        description="Token attribution for text classifiers via input marginalization.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--corpus", required=True, help="JSONL corpus file")
        p.add_argument("--vocab", required=True, help="one-token-per-line vocabulary file")
        p.add_argument("--classifier", default="toy:nb", help="toy:nb or remote[:URI]")
        p.add_argument(
            "--likelihood",
            default="toy:unigram",
            help="toy:unigram, toy:bigram, uniform, prior, or remote[:URI]",
        )
        p.add_argument("--sigma", type=float, default=1e-5, help="likelihood threshold")
        p.add_argument("--top-n", type=int, default=None, help="fixed top-n truncation instead of sigma")
        p.add_argument("--class", dest="target_class", type=int, default=None,
                       help="target class id (default: each sentence's label)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", default="json,html", help="comma list of json,csv,html,ansi")
        p.add_argument("--smoothing", type=float, default=1.0, help="toy-oracle smoothing")
        p.add_argument("--clamp", type=float, default=1e-7, help="probability clamp for odds")
        p.add_argument("--batch-size", type=int, default=32)
        p.add_argument("--jobs", type=int, default=1, help="sentence-level parallelism")
        p.add_argument("--timeout", type=float, default=10.0, help="remote oracle timeout, seconds")
        p.add_argument("--retries", type=int, default=2, help="remote oracle retries")

    p_attr = sub.add_parser("attribute", help="write per-sentence attribution maps")
    add_common(p_attr)
    p_attr.add_argument("--method", action="append", choices=evaluation.METHODS,
                        help="repeatable; default marg")

    p_eval = sub.add_parser("evaluate", help="deletion curves and summary metrics")
    add_common(p_eval)
    p_eval.add_argument("--method", action="append", choices=evaluation.METHODS,
                        help="repeatable; default marg,zero,unk")
    p_eval.add_argument("--max-fraction", type=float, default=0.2)
    p_eval.add_argument("--iot", action="store_true", help="report tag-overlap metric")
    p_eval.add_argument("--neutral", action="store_true", help="report neutral-token mean score")
    p_eval.add_argument("--top-k", type=int, default=10)
    p_eval.add_argument("--polarity", choices=("pos", "neg"), default="pos")

    p_abl = sub.add_parser("ablate", help="truncation sweep vs full marginalization")
    add_common(p_abl)
    p_abl.add_argument("--sigma-grid", default="", help="comma list of sigma values")
    p_abl.add_argument("--top-n-grid", default="", help="comma list of fixed-n values")
    p_abl.add_argument("--vocab-cap", type=int, default=5000,
                       help="refuse full marginalization above this vocabulary size")
    return parser


def _parse_grid(raw: str, cast):
    return tuple(cast(item) for item in raw.split(",") if item.strip())


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
    for f in formats:
        if f not in _FORMATS:
            raise ConfigError(f"unknown format {f!r}")
    methods = getattr(args, "method", None)
    if methods is None:
        methods = ["marg"] if args.subcommand == "attribute" else list(evaluation.METHODS)
    return RunConfig(
        subcommand=args.subcommand,
        corpus=args.corpus,
        vocab=args.vocab,
        classifier=args.classifier,
        likelihood=args.likelihood,
        sigma=args.sigma,
        top_n=args.top_n,
        methods=tuple(methods),
        target_class=args.target_class,
        seed=args.seed,
        out=args.out,
        formats=formats,
        smoothing=args.smoothing,
        prob_clamp=args.clamp,
        batch_size=args.batch_size,
        jobs=args.jobs,
        timeout=args.timeout,
        retries=args.retries,
        max_fraction=getattr(args, "max_fraction", 0.2),
        iot=getattr(args, "iot", False),
        neutral=getattr(args, "neutral", False),
        top_k=getattr(args, "top_k", 10),
        polarity=getattr(args, "polarity", "pos"),
        sigma_grid=_parse_grid(getattr(args, "sigma_grid", ""), float),
        top_n_grid=_parse_grid(getattr(args, "top_n_grid", ""), int),
        vocab_cap=getattr(args, "vocab_cap", 5000),
    )


def _resolve_endpoint(spec: str) -> str:
    if ":" in spec:
        return spec.split(":", 1)[1]
    endpoint = os.environ.get(ENDPOINT_ENV_VAR)
    if not endpoint:
        raise ConfigError(
            f"remote oracle requested but no URI given and {ENDPOINT_ENV_VAR} is unset"
        )
    return endpoint


def _resolve_oracles(cfg: RunConfig, corpus: TaggedCorpus, vocab: Vocabulary):
    remote_cache: dict[str, tuple] = {}

    def is_remote(spec: str) -> bool:
        return spec == "remote" or spec.startswith("remote:")

    def remote_pair(spec: str):
        endpoint = _resolve_endpoint(spec)
        if endpoint not in remote_cache:
            remote_cache[endpoint] = remote_oracle(
                endpoint,
                timeout=cfg.timeout,
                retries=cfg.retries,
                vocab=vocab,
                batch_size=cfg.batch_size,
            )
        return remote_cache[endpoint]

    if cfg.classifier == "toy:nb":
        clf = train_naive_bayes(corpus, vocab, smoothing=cfg.smoothing)
    elif is_remote(cfg.classifier):
        clf = remote_pair(cfg.classifier)[0]
    else:
        raise ConfigError(f"unknown classifier spec {cfg.classifier!r}")

    if cfg.likelihood == "toy:unigram":
        lm = train_ngram_lm(corpus, vocab, order=1, smoothing=cfg.smoothing)
    elif cfg.likelihood == "toy:bigram":
        lm = train_ngram_lm(corpus, vocab, order=2, smoothing=cfg.smoothing)
    elif cfg.likelihood == "uniform":
        lm = uniform_likelihood(vocab)
    elif cfg.likelihood == "prior":
        lm = prior_likelihood(corpus, vocab, smoothing=cfg.smoothing)
    elif is_remote(cfg.likelihood):
        lm = remote_pair(cfg.likelihood)[1]
    else:
        raise ConfigError(f"unknown likelihood spec {cfg.likelihood!r}")
    return clf, lm


def _write_atomic(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _json_bytes(doc: dict) -> bytes:
    return (json.dumps(doc, sort_keys=True, indent=2) + "\n").encode("utf-8")


def _attribution_doc(attr: AttributionMap, tokens: list[str], provenance: dict) -> dict:
    return {
        "tokens": tokens,
        "scores": list(attr.scores),
        "method": attr.method,
        "target_class": attr.target_class,
        "config": provenance,
    }


def _sentence_configs(cfg: RunConfig, corpus: TaggedCorpus) -> list[MarginalizationConfig]:
    sigma = 0.0 if cfg.top_n is not None else cfg.sigma
    return [
        MarginalizationConfig(
            target_class=cfg.target_class if cfg.target_class is not None else corpus.labels[idx],
            sigma=sigma,
            fixed_n=cfg.top_n,
            prob_clamp=cfg.prob_clamp,
            batch_size=cfg.batch_size,
        )
        for idx in range(len(corpus.sentences))
    ]


def _map_sentences(cfg: RunConfig, corpus, clf, lm, worker) -> list:
    """Apply ``worker(idx)`` over sentence indices, in parallel when the
    oracles allow it; results are returned in sentence order either way."""
    indices = range(len(corpus.sentences))
    if cfg.jobs > 1 and clf.thread_safe and lm.thread_safe:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            return list(pool.map(worker, indices))
    return [worker(idx) for idx in indices]


def cmd_attribute(cfg: RunConfig) -> int:
    vocab = load_vocabulary(cfg.vocab)
    corpus = load_corpus(cfg.corpus, vocab)
    clf, lm = _resolve_oracles(cfg, corpus, vocab)
    provenance = cfg.provenance()
    out = Path(cfg.out)
    sentence_cfgs = _sentence_configs(cfg, corpus)

    for method in cfg.methods:
        def worker(idx: int, method=method) -> AttributionMap:
            return evaluation.attribute_by_method(
                method, corpus.sentences[idx], sentence_cfgs[idx], clf, lm, vocab
            )

        maps = _map_sentences(cfg, corpus, clf, lm, worker)
        for idx, attr in enumerate(maps):
            tokens = vocab.decode(corpus.sentences[idx].ids)
            stem = out / "attributions" / method / f"sentence_{idx:04d}"
            if "json" in cfg.formats:
                _write_atomic(stem.with_suffix(".json"),
                              _json_bytes(_attribution_doc(attr, tokens, provenance)))
            if "html" in cfg.formats:
                _write_atomic(stem.with_suffix(".html"), report.render_heatmap(attr, tokens, "html"))
            if "ansi" in cfg.formats:
                _write_atomic(stem.with_suffix(".ansi"), report.render_heatmap(attr, tokens, "ansi"))
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    vocab = load_vocabulary(cfg.vocab)
    corpus = load_corpus(cfg.corpus, vocab)
    clf, lm = _resolve_oracles(cfg, corpus, vocab)
    provenance = cfg.provenance()
    out = Path(cfg.out)

    result = evaluation.evaluate_corpus(
        corpus,
        vocab,
        clf,
        lm,
        methods=cfg.methods,
        sigma=0.0 if cfg.top_n is not None else cfg.sigma,
        fixed_n=cfg.top_n,
        target_class=cfg.target_class,
        max_fraction=cfg.max_fraction,
        seed=cfg.seed,
        top_k=cfg.top_k,
        polarity=cfg.polarity,
        with_iot=cfg.iot,
        with_neutral=cfg.neutral,
        prob_clamp=cfg.prob_clamp,
        batch_size=cfg.batch_size,
    )

    summary = dict(result["summary"])
    summary["config"] = provenance
    _write_atomic(out / "summary.json", _json_bytes(summary))

    for method, artifacts in result["artifacts"].items():
        for idx, curve in enumerate(artifacts["curves"]):
            stem = out / "curves" / method / f"sentence_{idx:04d}"
            _write_atomic(stem.with_suffix(".csv"), evaluation.curve_csv_bytes(curve))
            _write_atomic(stem.with_suffix(".json"), evaluation.curve_sidecar_bytes(curve))
    if "html" in cfg.formats:
        for idx, sent in enumerate(corpus.sentences):
            maps = [result["artifacts"][m]["maps"][idx] for m in cfg.methods]
            tokens = vocab.decode(sent.ids)
            _write_atomic(out / "comparisons" / f"sentence_{idx:04d}.html",
                          report.render_comparison(maps, tokens, "html"))
    return EXIT_OK


def cmd_ablate(cfg: RunConfig) -> int:
    vocab = load_vocabulary(cfg.vocab)
    if vocab.size > cfg.vocab_cap:
        raise ConfigError(
            f"full marginalization infeasible: vocabulary size {vocab.size} exceeds cap "
            f"{cfg.vocab_cap} (raise --vocab-cap to override)"
        )
    if not cfg.sigma_grid and not cfg.top_n_grid:
        raise ConfigError("ablation grid is empty: pass --sigma-grid and/or --top-n-grid")
    corpus = load_corpus(cfg.corpus, vocab)
    clf, lm = _resolve_oracles(cfg, corpus, vocab)
    rows = evaluation.truncation_ablation(
        corpus,
        clf,
        lm,
        sigmas=cfg.sigma_grid,
        fixed_ns=cfg.top_n_grid,
        target_class=cfg.target_class,
        prob_clamp=cfg.prob_clamp,
        batch_size=cfg.batch_size,
    )
    out = Path(cfg.out)
    _write_atomic(out / "ablation.csv", evaluation.ablation_csv_bytes(rows))
    sidecar = {
        "rows": [{"rule": r.rule, "pearson": r.pearson, "avg_candidates": r.avg_candidates}
                 for r in rows],
        "config": cfg.provenance(),
    }
    _write_atomic(out / "ablation.json", _json_bytes(sidecar))
    return EXIT_OK


_DISPATCH = {"attribute": cmd_attribute, "evaluate": cmd_evaluate, "ablate": cmd_ablate}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold into the config exit code
        return EXIT_OK if not exc.code else EXIT_CONFIG
    try:
        cfg = _config_from_args(args)
        return _DISPATCH[cfg.subcommand](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"margattr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleError as exc:
        print(f"margattr: oracle error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (EngineError, MargattrError) as exc:
        print(f"margattr: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
