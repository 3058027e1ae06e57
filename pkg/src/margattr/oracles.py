"""Classifier and likelihood oracle contracts plus in-process implementations.

The deterministic toy oracles (multinomial naive Bayes, n-gram language
models, uniform and prior likelihoods) stand in for trained classifiers
and masked-language models so the attribution math can be exercised and
verified at desk scale. Real models plug in through the same interfaces
via :mod:`margattr.remote`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Protocol, Sequence

import numpy as np

from .errors import ConfigError, InvalidDistributionError
from .vocab import Sentence, TaggedCorpus, Vocabulary

_SUM_TOL = 1e-6
_MASS_TOL = 1e-6


@dataclass(frozen=True)
class ClassDistribution:
    """Probability vector over classes; entries sum to 1 within 1e-6."""

    probs: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "probs", tuple(float(p) for p in self.probs))
        for p in self.probs:
            if not 0.0 <= p <= 1.0 or not math.isfinite(p):
                raise InvalidDistributionError(f"invalid distribution: class probability {p} outside [0, 1]")
        total = sum(self.probs)
        if abs(total - 1.0) > _SUM_TOL:
            raise InvalidDistributionError(f"invalid distribution: class probabilities sum to {total}")


@dataclass(frozen=True)
class LikelihoodDistribution:
    """Sparse token-id -> probability map for one masked position.

    ``covered_mass`` is the sum of stored probabilities; truncated
    oracles may cover less than the full unit mass.
    """

    entries: Mapping[int, float]
    covered_mass: float

    @classmethod
    def from_entries(cls, entries: Mapping[int, float]) -> "LikelihoodDistribution":
        for tid, p in entries.items():
            if tid < 0:
                raise InvalidDistributionError(f"invalid distribution: negative token id {tid}")
            if not 0.0 < p <= 1.0 or not math.isfinite(p):
                raise InvalidDistributionError(f"invalid distribution: likelihood {p} outside (0, 1]")
        mass = sum(entries.values())
        if mass > 1.0 + _MASS_TOL:
            raise InvalidDistributionError(f"invalid distribution: covered mass {mass} exceeds 1")
        return cls(entries=dict(entries), covered_mass=mass)


class ClassifierOracle(Protocol):
    """Batch text classifier. Implementations must be deterministic."""

    class_count: int
    thread_safe: bool

    def classify_batch(self, sentences: Sequence[Sentence]) -> list[ClassDistribution]: ...


class LikelihoodOracle(Protocol):
    """Masked-position likelihood source. Implementations must be
    deterministic and never assign mass to the pad or mask token."""

    mask_id: int
    thread_safe: bool

    def fill_mask(self, sentence: Sentence, positions: Sequence[int]) -> list[LikelihoodDistribution]: ...


class NaiveBayesClassifier:
    """Multinomial naive Bayes over token counts with add-alpha smoothing.

    Class-conditional probabilities are defined over the full vocabulary,
    so substituted special tokens (e.g. pad under zero erasure) still
    receive the smoothed floor probability rather than being skipped.
    """

    thread_safe = True

    def __init__(self, log_prior: np.ndarray, log_likelihood: np.ndarray) -> None:
        self.log_prior = log_prior
        self.log_likelihood = log_likelihood
        self.class_count = int(log_prior.shape[0])

    def classify_batch(self, sentences: Sequence[Sentence]) -> list[ClassDistribution]:
        out = []
        for sent in sentences:
            ids = np.fromiter(sent.ids, dtype=np.intp, count=len(sent.ids))
            scores = self.log_prior + self.log_likelihood[ids].sum(axis=0)
            scores = scores - scores.max()
            probs = np.exp(scores)
            probs /= probs.sum()
            out.append(ClassDistribution(probs=tuple(probs.tolist())))
        return out


def train_naive_bayes(corpus: TaggedCorpus, vocab: Vocabulary, smoothing: float = 1.0) -> NaiveBayesClassifier:
    """Fit a naive-Bayes classifier; every class must have documents."""
    if smoothing <= 0:
        raise ConfigError("smoothing must be positive")
    counts = np.zeros((vocab.size, corpus.class_count), dtype=np.float64)
    doc_counts = np.zeros(corpus.class_count, dtype=np.float64)
    for sent, label in zip(corpus.sentences, corpus.labels):
        doc_counts[label] += 1
        for tid in sent.ids:
            counts[tid, label] += 1
    if (doc_counts == 0).any():
        empty = int(np.flatnonzero(doc_counts == 0)[0])
        raise ConfigError(f"empty class: no documents labeled {empty}")
    log_prior = np.log(doc_counts / doc_counts.sum())
    totals = counts.sum(axis=0)
    log_likelihood = np.log((counts + smoothing) / (totals + smoothing * vocab.size))
    return NaiveBayesClassifier(log_prior=log_prior, log_likelihood=log_likelihood)


class ContextFreeLikelihood:
    """Likelihood oracle returning one fixed distribution at any position."""

    thread_safe = True

    def __init__(self, distribution: LikelihoodDistribution, mask_id: int) -> None:
        self.distribution = distribution
        self.mask_id = mask_id

    def fill_mask(self, sentence: Sentence, positions: Sequence[int]) -> list[LikelihoodDistribution]:
        _check_masked(sentence, positions, self.mask_id)
        return [self.distribution] * len(positions)


class BigramLikelihood:
    """Likelihood conditioned on the left neighbor (right context ignored).

    Positions with no usable left context (sentence start, or a neighbor
    that is itself masked or pad) fall back to the unigram distribution.
    """

    thread_safe = True
    _BOS = -1

    def __init__(
        self,
        unigram: LikelihoodDistribution,
        context_counts: dict[int, dict[int, float]],
        support: tuple[int, ...],
        smoothing: float,
        vocab: Vocabulary,
    ) -> None:
        self._unigram = unigram
        self._context_counts = context_counts
        self._support = support
        self._smoothing = smoothing
        self._vocab = vocab
        self._cache: dict[int, LikelihoodDistribution] = {}
        self.mask_id = vocab.mask_id

    def _conditional(self, left: int) -> LikelihoodDistribution:
        cached = self._cache.get(left)
        if cached is not None:
            return cached
        counts = self._context_counts.get(left, {})
        total = sum(counts.values())
        denom = total + self._smoothing * len(self._support)
        entries = {t: (counts.get(t, 0.0) + self._smoothing) / denom for t in self._support}
        dist = LikelihoodDistribution.from_entries(entries)
        self._cache[left] = dist
        return dist

    def fill_mask(self, sentence: Sentence, positions: Sequence[int]) -> list[LikelihoodDistribution]:
        _check_masked(sentence, positions, self.mask_id)
        out = []
        for pos in positions:
            left = sentence.ids[pos - 1] if pos > 0 else self._BOS
            if left in (self._vocab.mask_id, self._vocab.pad_id):
                out.append(self._unigram)
            elif left == self._BOS:
                out.append(self._conditional(self._BOS))
            else:
                out.append(self._conditional(left))
        return out


def _check_masked(sentence: Sentence, positions: Sequence[int], mask_id: int) -> None:
    for pos in positions:
        if not 0 <= pos < len(sentence.ids):
            raise ConfigError(f"mask position {pos} outside sentence of length {len(sentence.ids)}")
        if sentence.ids[pos] != mask_id:
            raise ConfigError(f"position {pos} does not hold the mask token")


def _candidate_support(vocab: Vocabulary) -> tuple[int, ...]:
    return tuple(i for i in range(vocab.size) if i not in vocab.special_ids)


def _smoothed_unigram(corpus: TaggedCorpus, vocab: Vocabulary, smoothing: float) -> LikelihoodDistribution:
    support = _candidate_support(vocab)
    special = vocab.special_ids
    counts: dict[int, float] = {}
    total = 0.0
    for sent in corpus.sentences:
        for tid in sent.ids:
            if tid in special:
                continue
            counts[tid] = counts.get(tid, 0.0) + 1.0
            total += 1.0
    denom = total + smoothing * len(support)
    return LikelihoodDistribution.from_entries(
        {t: (counts.get(t, 0.0) + smoothing) / denom for t in support}
    )


def train_ngram_lm(corpus: TaggedCorpus, vocab: Vocabulary, order: int, smoothing: float = 1.0):
    """Train an add-alpha smoothed unigram (order 1) or bigram (order 2)
    likelihood oracle over the non-special vocabulary."""
    if order not in (1, 2):
        raise ConfigError("order must be 1 or 2")
    if smoothing <= 0:
        raise ConfigError("smoothing must be positive")
    unigram = _smoothed_unigram(corpus, vocab, smoothing)
    if order == 1:
        return ContextFreeLikelihood(distribution=unigram, mask_id=vocab.mask_id)
    special = vocab.special_ids
    context_counts: dict[int, dict[int, float]] = {}
    for sent in corpus.sentences:
        prev = BigramLikelihood._BOS
        for tid in sent.ids:
            if tid not in special:
                ctx = context_counts.setdefault(prev, {})
                ctx[tid] = ctx.get(tid, 0.0) + 1.0
            prev = tid
    return BigramLikelihood(
        unigram=unigram,
        context_counts=context_counts,
        support=_candidate_support(vocab),
        smoothing=smoothing,
        vocab=vocab,
    )


def uniform_likelihood(vocab: Vocabulary, exclude: Sequence[int] | None = None) -> ContextFreeLikelihood:
    """Equal likelihood for every candidate token.

    By default the vocabulary's special ids are excluded and the mass
    spread over the rest; pass ``exclude=()`` for the textbook uniform
    over the whole vocabulary.
    """
    excluded = vocab.special_ids if exclude is None else frozenset(exclude)
    kept = [i for i in range(vocab.size) if i not in excluded]
    if not kept:
        raise ConfigError("no candidate tokens left after exclusions")
    p = 1.0 / len(kept)
    return ContextFreeLikelihood(
        distribution=LikelihoodDistribution.from_entries({i: p for i in kept}),
        mask_id=vocab.mask_id,
    )


def prior_likelihood(corpus: TaggedCorpus, vocab: Vocabulary, smoothing: float = 1.0) -> ContextFreeLikelihood:
    """Context-independent likelihood from smoothed corpus frequencies."""
    if smoothing <= 0:
        raise ConfigError("smoothing must be positive")
    return ContextFreeLikelihood(
        distribution=_smoothed_unigram(corpus, vocab, smoothing),
        mask_id=vocab.mask_id,
    )
