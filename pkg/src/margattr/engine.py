"""Core attribution math.

A token's contribution is the weight of evidence: the log2 odds of the
target class on the intact sentence minus the log2 odds after the token
is marginalized out. Marginalization replaces the token with every
candidate the likelihood oracle deems plausible, weights the classifier's
response by those likelihoods, and normalizes by the kept mass, so the
result stays a probability even when the candidate set is truncated.
Predefined-value erasure (pad or unk substitution) is provided as the
baseline this approach improves on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConfigError, EngineError
from .oracles import ClassifierOracle, LikelihoodOracle
from .vocab import Sentence

DEFAULT_SIGMA = 1e-5
DEFAULT_PROB_CLAMP = 1e-7
DEFAULT_BATCH_SIZE = 32
DEFAULT_JOINT_CAP = 10**6


@dataclass(frozen=True)
class MarginalizationConfig:
    """Truncation rule, target class, and numeric knobs for one run.

    Exactly one truncation rule applies: a likelihood threshold ``sigma``
    (candidates with likelihood strictly above it are kept) or a fixed
    ``fixed_n`` top-candidate cap. ``sigma=0`` with ``fixed_n`` unset is
    full marginalization over the oracle's whole support.
    """

    target_class: int
    sigma: float = DEFAULT_SIGMA
    fixed_n: int | None = None
    prob_clamp: float = DEFAULT_PROB_CLAMP
    include_original: bool = False
    batch_size: int = DEFAULT_BATCH_SIZE

    def __post_init__(self) -> None:
        if self.target_class < 0:
            raise ConfigError("target_class must be a class id")
        if not 0.0 <= self.sigma < 1.0:
            raise ConfigError("sigma must lie in [0, 1)")
        if self.fixed_n is not None:
            if self.fixed_n < 1:
                raise ConfigError("fixed_n must be at least 1")
            if self.sigma > 0.0:
                raise ConfigError("choose one truncation rule: sigma or fixed_n, not both")
        if not 0.0 < self.prob_clamp < 0.5:
            raise ConfigError("prob_clamp must lie in (0, 0.5)")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be positive")


@dataclass(frozen=True)
class AttributionMap:
    """Per-position attribution scores in bits for one target class.

    ``candidate_counts`` records how many replacement candidates survived
    truncation at each position (marginalization methods only).
    """

    scores: tuple[float, ...]
    target_class: int
    method: str
    candidate_counts: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        for s in self.scores:
            if not math.isfinite(s):
                raise EngineError(f"non-finite attribution score {s}")
        if self.candidate_counts is not None:
            object.__setattr__(self, "candidate_counts", tuple(self.candidate_counts))
            if len(self.candidate_counts) != len(self.scores):
                raise EngineError("candidate_counts must align with scores")

    def __len__(self) -> int:
        return len(self.scores)


def _log_odds(p: float) -> float:
    # odds via the reciprocal so round decimal inputs stay exact
    # (1/0.8 - 1 == 0.25 while 0.8/0.2 != 4 in binary floats)
    return -math.log2(1.0 / p - 1.0)


def _clamp(p: float, eps: float) -> float:
    return min(max(p, eps), 1.0 - eps)


def weight_of_evidence(p_full: float, p_without: float, clamp: float = DEFAULT_PROB_CLAMP) -> float:
    """log2 odds difference between two probabilities, in bits.

    Both inputs are clamped into ``[clamp, 1 - clamp]`` before the odds
    are taken, so boundary probabilities stay finite.
    """
    return _log_odds(_clamp(p_full, clamp)) - _log_odds(_clamp(p_without, clamp))


def _query_lm(
    lm: LikelihoodOracle,
    sentence: Sentence,
    position: int,
    memo: dict | None,
):
    masked = sentence.with_token(position, lm.mask_id)
    if memo is None:
        return lm.fill_mask(masked, [position])[0]
    key = (masked.ids, position)
    dist = memo.get(key)
    if dist is None:
        dist = lm.fill_mask(masked, [position])[0]
        memo[key] = dist
    return dist


def _kept_candidates(
    dist,
    cfg: MarginalizationConfig,
    original_id: int,
) -> dict[int, float]:
    if cfg.fixed_n is not None:
        # boundary ties broken by ascending token id
        ranked = sorted(dist.entries.items(), key=lambda kv: (-kv[1], kv[0]))
        kept = dict(ranked[: cfg.fixed_n])
    else:
        kept = {t: p for t, p in dist.entries.items() if p > cfg.sigma}
    if cfg.include_original and original_id not in kept:
        p = dist.entries.get(original_id)
        if p is not None:
            kept[original_id] = p
    return kept


def _classify_probs(
    sentences: list[Sentence],
    clf: ClassifierOracle,
    target_class: int,
    batch_size: int,
) -> list[float]:
    probs: list[float] = []
    for start in range(0, len(sentences), batch_size):
        batch = sentences[start : start + batch_size]
        for dist in clf.classify_batch(batch):
            probs.append(dist.probs[target_class])
    return probs


def _marginalize_position(
    sentence: Sentence,
    position: int,
    cfg: MarginalizationConfig,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
    memo: dict | None = None,
) -> tuple[float, int]:
    """Marginalized target-class probability and kept-candidate count."""
    dist = _query_lm(lm, sentence, position, memo)
    kept = _kept_candidates(dist, cfg, sentence.ids[position])
    if not kept:
        raise EngineError("no candidates above threshold")
    candidate_ids = sorted(kept)
    substituted = [sentence.with_token(position, tid) for tid in candidate_ids]
    class_probs = _classify_probs(substituted, clf, cfg.target_class, cfg.batch_size)
    # accumulate in ascending token-id order so results are independent
    # of oracle batching and candidate scheduling
    numerator = 0.0
    kept_mass = 0.0
    for tid, class_prob in zip(candidate_ids, class_probs):
        likelihood = kept[tid]
        numerator += likelihood * class_prob
        kept_mass += likelihood
    return numerator / kept_mass, len(candidate_ids)


def marginalized_probability(
    sentence: Sentence,
    position: int,
    cfg: MarginalizationConfig,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
) -> float:
    """Likelihood-weighted expected target-class probability with the
    token at ``position`` replaced by candidate tokens.

    Candidates are whatever survives the config's truncation rule; the
    weighted sum is normalized by the kept likelihood mass, which makes
    the result invariant under positive rescaling of the likelihoods.
    """
    if not 0 <= position < len(sentence.ids):
        raise ConfigError(f"position {position} outside sentence of length {len(sentence.ids)}")
    prob, _ = _marginalize_position(sentence, position, cfg, clf, lm)
    return prob


def attribute(
    sentence: Sentence,
    cfg: MarginalizationConfig,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
) -> AttributionMap:
    """Marginalization attribution scores for every position."""
    p_full = clf.classify_batch([sentence])[0].probs[cfg.target_class]
    memo: dict = {}
    scores = []
    counts = []
    for position in range(len(sentence.ids)):
        try:
            prob, kept = _marginalize_position(sentence, position, cfg, clf, lm, memo)
        except EngineError as exc:
            raise EngineError(f"position {position}: {exc}") from None
        scores.append(weight_of_evidence(p_full, prob, cfg.prob_clamp))
        counts.append(kept)
    return AttributionMap(
        scores=tuple(scores),
        target_class=cfg.target_class,
        method="marginalization",
        candidate_counts=tuple(counts),
    )


def attribute_joint(
    sentence: Sentence,
    positions: Sequence[int],
    cfg: MarginalizationConfig,
    clf: ClassifierOracle,
    lm: LikelihoodOracle,
    candidate_cap: int = DEFAULT_JOINT_CAP,
) -> float:
    """Joint contribution of several tokens, in bits.

    All listed positions are masked at once; candidate assignments are
    enumerated left to right, re-querying the likelihood oracle with the
    earlier positions filled in (chain-rule factorization of the joint
    likelihood). Truncation applies per position. The enumeration aborts
    once the number of full assignments exceeds ``candidate_cap``.
    """
    order = sorted(positions)
    if len(order) < 2:
        raise ConfigError("joint attribution needs at least two positions")
    if len(set(order)) != len(order):
        raise ConfigError("positions must be distinct")
    for pos in order:
        if not 0 <= pos < len(sentence.ids):
            raise ConfigError(f"position {pos} outside sentence of length {len(sentence.ids)}")

    p_full = clf.classify_batch([sentence])[0].probs[cfg.target_class]
    base = sentence
    for pos in order:
        base = base.with_token(pos, lm.mask_id)

    memo: dict = {}
    assignments: list[tuple[Sentence, float]] = []

    def expand(level: int, current: Sentence, weight: float) -> None:
        pos = order[level]
        dist = _query_lm(lm, current, pos, memo)
        kept = _kept_candidates(dist, cfg, sentence.ids[pos])
        if not kept:
            raise EngineError(f"position {pos}: no candidates above threshold")
        for tid in sorted(kept):
            branch_weight = weight * kept[tid]
            branch = current.with_token(pos, tid)
            if level == len(order) - 1:
                if len(assignments) >= candidate_cap:
                    raise EngineError("joint marginalization too large")
                assignments.append((branch, branch_weight))
            else:
                expand(level + 1, branch, branch_weight)

    expand(0, base, 1.0)
    class_probs = _classify_probs(
        [s for s, _ in assignments], clf, cfg.target_class, cfg.batch_size
    )
    numerator = 0.0
    kept_mass = 0.0
    for (_, weight), class_prob in zip(assignments, class_probs):
        numerator += weight * class_prob
        kept_mass += weight
    return weight_of_evidence(p_full, numerator / kept_mass, cfg.prob_clamp)


def erasure_attribution(
    sentence: Sentence,
    replacement: int,
    target_class: int,
    clamp: float,
    clf: ClassifierOracle,
    method: str | None = None,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> AttributionMap:
    """Baseline attribution by substituting one predefined token.

    Pass the vocabulary's pad id for zero erasure or its unk id for
    "[UNK]" erasure; ``method`` labels the map accordingly (defaults to a
    generic tag naming the replacement id).
    """
    if replacement < 0:
        raise ConfigError(f"invalid replacement token id {replacement}")
    p_full = clf.classify_batch([sentence])[0].probs[target_class]
    substituted = [sentence.with_token(i, replacement) for i in range(len(sentence.ids))]
    class_probs = _classify_probs(substituted, clf, target_class, batch_size)
    scores = tuple(weight_of_evidence(p_full, p, clamp) for p in class_probs)
    return AttributionMap(
        scores=scores,
        target_class=target_class,
        method=method or f"erasure[{replacement}]",
    )
