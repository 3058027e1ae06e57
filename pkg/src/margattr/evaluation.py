"""Quantitative assessment of attribution maps.

The headline faithfulness metric is the area under the deletion curve:
starting from the intact sentence, the highest-attributed tokens are
replaced one at a time with tokens sampled from the likelihood oracle,
and the predicted probability is recorded after each replacement. A
faithful attribution map makes the curve drop fast, so lower area is
better. Tag overlap (IoT), the neutral-token score audit, and a Pearson
ablation of truncation rules round out the suite.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .engine import (
    AttributionMap,
    MarginalizationConfig,
    attribute,
    erasure_attribution,
)
from .errors import ConfigError, EngineError
from .oracles import ClassifierOracle, LikelihoodOracle
from .vocab import Sentence, TaggedCorpus, Vocabulary

#: RNG used for replacement sampling, recorded in curve sidecars.
RNG_ALGORITHM = "numpy.PCG64"


@dataclass(frozen=True)
class DeletionCurve:
    """Ordered (fraction-replaced, predicted-probability) points.

    The first point is always the unperturbed prediction at fraction 0;
    ``auc`` is the trapezoidal integral normalized by the final fraction.
    """

    points: tuple[tuple[float, float], ...]
    auc: float
    seed: int
    method: str

    def __post_init__(self) -> None:
        fractions = [f for f, _ in self.points]
        if not fractions or fractions[0] != 0.0:
            raise EngineError("deletion curve must start at fraction 0")
        for a, b in zip(fractions, fractions[1:]):
            if b <= a:
                raise EngineError("deletion curve fractions must strictly increase")


@dataclass(frozen=True)
class AblationRow:
    """One truncation rule compared against full marginalization."""

    rule: str
    pearson: float
    avg_candidates: float


def auc(points: Sequence[tuple[float, float]]) -> float:
    """Trapezoidal area under the curve, normalized by the fraction span
    so a constant-probability curve integrates to that constant."""
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    area = 0.0
    for (f0, p0), (f1, p1) in zip(points, points[1:]):
        if f1 <= f0:
            raise ValueError("fractions must be strictly increasing")
        area += (f1 - f0) * (p0 + p1) * 0.5
    return area / (points[-1][0] - points[0][0])


def _sample_token(dist, rng: np.random.Generator) -> int:
    # fixed ascending-id iteration keeps sampling reproducible
    ids = sorted(dist.entries)
    weights = np.array([dist.entries[t] for t in ids], dtype=np.float64)
    cumulative = np.cumsum(weights)
    draw = rng.random() * cumulative[-1]
    return ids[int(np.searchsorted(cumulative, draw, side="right").clip(0, len(ids) - 1))]


def deletion_curve(
    sentence: Sentence,
    attributions: AttributionMap,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
    max_fraction: float = 0.2,
    seed: int = 0,
) -> DeletionCurve:
    """Replace the top-attributed tokens one by one and track the
    predicted probability of the attribution's target class.

    Replacement is sequential: each step re-masks a position of the
    current, partially replaced sentence and samples the substitute from
    the likelihood oracle's distribution with a seeded RNG. The budget is
    ``ceil(max_fraction * length)`` replacements. The input sentence is
    never mutated.
    """
    if len(attributions) != len(sentence.ids):
        raise ConfigError("attribution map does not align with sentence")
    if not 0.0 < max_fraction <= 1.0:
        raise ConfigError("max_fraction must lie in (0, 1]")
    length = len(sentence.ids)
    budget = math.ceil(max_fraction * length)
    order = sorted(range(length), key=lambda i: (-attributions.scores[i], i))
    rng = np.random.default_rng(seed)
    target = attributions.target_class

    current = sentence
    p0 = clf.classify_batch([current])[0].probs[target]
    points = [(0.0, p0)]
    for step, position in enumerate(order[:budget], start=1):
        masked = current.with_token(position, lm.mask_id)
        dist = lm.fill_mask(masked, [position])[0]
        replacement = _sample_token(dist, rng)
        current = current.with_token(position, replacement)
        prob = clf.classify_batch([current])[0].probs[target]
        points.append((step / length, prob))
    return DeletionCurve(
        points=tuple(points),
        auc=auc(points),
        seed=seed,
        method=attributions.method,
    )


def iot(
    attributions: AttributionMap,
    tags: Sequence[str],
    top_k: int = 10,
    polarity: str = "pos",
) -> float:
    """Intersection-of-tokens: fraction of polarity-tagged positions that
    rank among the ``top_k`` attributed positions.

    Depends only on the ranking of scores, so any strictly monotone
    transformation of the scores leaves it unchanged.
    """
    if len(tags) != len(attributions):
        raise ValueError("tags must align with attribution scores")
    tagged = {i for i, t in enumerate(tags) if t == polarity}
    if not tagged:
        raise ValueError(f"no tagged tokens with polarity {polarity!r}")
    order = sorted(range(len(tags)), key=lambda i: (-attributions.scores[i], i))
    top = set(order[:top_k])
    return len(tagged & top) / len(tagged)


def neutral_mean_score(
    maps: Sequence[AttributionMap],
    tags: Sequence[Sequence[str]],
) -> float:
    """Mean attribution score over all neut-tagged positions in a corpus."""
    values = []
    for attr, sent_tags in zip(maps, tags):
        if len(sent_tags) != len(attr):
            raise ValueError("tags must align with attribution scores")
        values.extend(attr.scores[i] for i, t in enumerate(sent_tags) if t == "neut")
    if not values:
        raise ValueError("no neutral tokens")
    return float(sum(values) / len(values))


def pearson(a: Sequence[float], b: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("inputs must be equal-length vectors")
    if x.size < 2:
        raise ValueError("need at least 2 values")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValueError("zero variance")
    if np.array_equal(x, y):
        # identical vectors correlate exactly; skip the float round trip
        # so the full-marginalization ablation row reports exactly 1.0
        return 1.0
    dx = x - x.mean()
    dy = y - y.mean()
    r = float(dx @ dy) / math.sqrt(float(dx @ dx) * float(dy @ dy))
    return min(1.0, max(-1.0, r))


def _attribute_corpus(
    corpus: TaggedCorpus,
    cfg_for: Mapping[int, MarginalizationConfig],
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
) -> list[AttributionMap]:
    return [
        attribute(sent, cfg_for[idx], clf, lm)
        for idx, sent in enumerate(corpus.sentences)
    ]


def _rule_label(sigma: float | None, fixed_n: int | None) -> str:
    if fixed_n is not None:
        return f"n={fixed_n}"
    return f"sigma={sigma:g}"


def truncation_ablation(
    corpus: TaggedCorpus,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
    sigmas: Sequence[float] = (),
    fixed_ns: Sequence[int] = (),
    target_class: int | None = None,
    prob_clamp: float = 1e-7,
    batch_size: int = 32,
) -> list[AblationRow]:
    """Pearson correlation of truncated against full attributions.

    Every sentence is attributed under each rule in the grid; scores are
    concatenated corpus-wide and correlated with the sigma=0 (full
    marginalization) scores. ``target_class=None`` attributes each
    sentence toward its own label.
    """
    if not sigmas and not fixed_ns:
        raise ConfigError("ablation grid is empty")

    def configs(sigma: float = 0.0, fixed_n: int | None = None) -> dict[int, MarginalizationConfig]:
        return {
            idx: MarginalizationConfig(
                target_class=target_class if target_class is not None else corpus.labels[idx],
                sigma=sigma,
                fixed_n=fixed_n,
                prob_clamp=prob_clamp,
                batch_size=batch_size,
            )
            for idx in range(len(corpus.sentences))
        }

    full_maps = _attribute_corpus(corpus, configs(sigma=0.0), clf, lm)
    full_scores = np.concatenate([np.asarray(m.scores) for m in full_maps])

    rows = []
    for sigma in sigmas:
        maps = (
            full_maps
            if sigma == 0.0
            else _attribute_corpus(corpus, configs(sigma=sigma), clf, lm)
        )
        rows.append(_ablation_row(_rule_label(sigma, None), maps, full_scores))
    for fixed_n in fixed_ns:
        maps = _attribute_corpus(corpus, configs(fixed_n=fixed_n), clf, lm)
        rows.append(_ablation_row(_rule_label(None, fixed_n), maps, full_scores))
    return rows


def _ablation_row(rule: str, maps: Sequence[AttributionMap], full_scores: np.ndarray) -> AblationRow:
    scores = np.concatenate([np.asarray(m.scores) for m in maps])
    counts = [c for m in maps for c in (m.candidate_counts or ())]
    return AblationRow(
        rule=rule,
        pearson=pearson(scores, full_scores),
        avg_candidates=float(sum(counts) / len(counts)),
    )


#: Canonical attribution method names used by corpus evaluation.
METHODS = ("marg", "zero", "unk")


def attribute_by_method(
    method: str,
    sentence: Sentence,
    cfg: MarginalizationConfig,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
    vocab: Vocabulary,
) -> AttributionMap:
    """Dispatch one sentence to marginalization or an erasure baseline."""
    if method == "marg":
        return attribute(sentence, cfg, clf, lm)
    if method == "zero":
        return erasure_attribution(
            sentence, vocab.pad_id, cfg.target_class, cfg.prob_clamp, clf,
            method="zero_erasure", batch_size=cfg.batch_size,
        )
    if method == "unk":
        return erasure_attribution(
            sentence, vocab.unk_id, cfg.target_class, cfg.prob_clamp, clf,
            method="unk_erasure", batch_size=cfg.batch_size,
        )
    raise ConfigError(f"unknown attribution method {method!r}")


def evaluate_corpus(
    corpus: TaggedCorpus,
    vocab: Vocabulary,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
    methods: Sequence[str] = METHODS,
    sigma: float = 1e-5,
    fixed_n: int | None = None,
    target_class: int | None = None,
    max_fraction: float = 0.2,
    seed: int = 0,
    top_k: int = 10,
    polarity: str = "pos",
    with_iot: bool = False,
    with_neutral: bool = False,
    prob_clamp: float = 1e-7,
    batch_size: int = 32,
) -> dict:
    """Run the evaluation suite and return the per-method summary.

    Per method: mean deletion-curve area over the corpus, plus mean IoT
    and the neutral-token mean score when requested (both need tags).
    Per-sentence RNG streams are derived as ``seed ^ index`` so parallel
    and serial corpus runs agree. The returned dict also carries the
    per-sentence maps and curves for rendering or export.
    """
    has_tags = all(s.tags is not None for s in corpus.sentences)
    if (with_iot or with_neutral) and not has_tags:
        raise ConfigError("tags required")

    summary: dict = {"methods": {}}
    artifacts: dict = {}
    for method in methods:
        maps = []
        curves = []
        for idx, sent in enumerate(corpus.sentences):
            cfg = MarginalizationConfig(
                target_class=target_class if target_class is not None else corpus.labels[idx],
                sigma=sigma,
                fixed_n=fixed_n,
                prob_clamp=prob_clamp,
                batch_size=batch_size,
            )
            attr = attribute_by_method(method, sent, cfg, clf, lm, vocab)
            maps.append(attr)
            curves.append(
                deletion_curve(sent, attr, clf, lm, max_fraction=max_fraction, seed=seed ^ idx)
            )
        entry: dict = {"auc_rep": sum(c.auc for c in curves) / len(curves)}
        if with_iot:
            per_sentence = []
            for attr, sent in zip(maps, corpus.sentences):
                if any(t == polarity for t in sent.tags):
                    per_sentence.append(iot(attr, sent.tags, top_k=top_k, polarity=polarity))
            if not per_sentence:
                raise ConfigError(f"tags required: no sentence carries a {polarity!r} tag")
            entry["iot"] = sum(per_sentence) / len(per_sentence)
        if with_neutral:
            entry["neutral_mean"] = neutral_mean_score(maps, [s.tags for s in corpus.sentences])
        summary["methods"][method] = entry
        artifacts[method] = {"maps": maps, "curves": curves}
    summary["seed"] = seed
    summary["rng"] = RNG_ALGORITHM
    return {"summary": summary, "artifacts": artifacts}


def curve_csv_bytes(curve: DeletionCurve) -> bytes:
    """CSV serialization: header ``fraction,probability``, one row per point."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["fraction", "probability"])
    for fraction, probability in curve.points:
        writer.writerow([repr(fraction), repr(probability)])
    return buf.getvalue().encode("utf-8")


def curve_sidecar_bytes(curve: DeletionCurve) -> bytes:
    """JSON sidecar carrying the area, seed, method, and RNG identifier."""
    doc = {"auc": curve.auc, "seed": curve.seed, "method": curve.method, "rng": RNG_ALGORITHM}
    return (json.dumps(doc, sort_keys=True) + "\n").encode("utf-8")


def ablation_csv_bytes(rows: Sequence[AblationRow]) -> bytes:
    """CSV serialization: ``rule,pearson,avg_candidates``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rule", "pearson", "avg_candidates"])
    for row in rows:
        writer.writerow([row.rule, repr(row.pearson), repr(row.avg_candidates)])
    return buf.getvalue().encode("utf-8")
