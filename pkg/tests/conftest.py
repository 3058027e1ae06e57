"""Shared builders and independent reference implementations.

The dense reference computations here deliberately re-derive the math
with plain double loops over the whole vocabulary; they share only the
oracle objects with the engine under test, never its code paths.
"""

from __future__ import annotations

import random

from margattr import (
    ClassDistribution,
    ContextFreeLikelihood,
    LikelihoodDistribution,
    Sentence,
    TaggedCorpus,
    Vocabulary,
)

SPECIALS = ("[PAD]", "[UNK]", "[MASK]")


def make_vocab(words) -> Vocabulary:
    """Vocabulary with the standard specials at ids 0..2 followed by words."""
    return Vocabulary(tokens=(*SPECIALS, *words), mask_id=2, unk_id=1)


def numbered_vocab(size: int) -> Vocabulary:
    """Vocabulary of ``size`` tokens: three specials plus w3..w{size-1}."""
    return make_vocab([f"w{i}" for i in range(3, size)])


def support_ids(vocab: Vocabulary) -> list[int]:
    return [i for i in range(vocab.size) if i not in vocab.special_ids]


def random_corpus(
    rng: random.Random,
    vocab: Vocabulary,
    n_sentences: int = 8,
    max_len: int = 6,
    class_count: int = 2,
) -> TaggedCorpus:
    support = support_ids(vocab)
    sentences = []
    labels = []
    for i in range(n_sentences):
        length = rng.randint(1, max_len)
        sentences.append(Sentence(ids=tuple(rng.choice(support) for _ in range(length))))
        labels.append(i % class_count)  # every class populated
    return TaggedCorpus(sentences=tuple(sentences), labels=tuple(labels), class_count=class_count)


def fixed_likelihood(entries: dict[int, float], mask_id: int = 2) -> ContextFreeLikelihood:
    return ContextFreeLikelihood(
        distribution=LikelihoodDistribution.from_entries(entries), mask_id=mask_id
    )


def zipf_likelihood(vocab: Vocabulary, exponent: float = 2.0) -> ContextFreeLikelihood:
    """Context-free likelihood with Zipf-law mass over the non-special ids."""
    support = support_ids(vocab)
    weights = [1.0 / (rank**exponent) for rank in range(1, len(support) + 1)]
    total = sum(weights)
    entries = {tid: w / total for tid, w in zip(support, weights)}
    return ContextFreeLikelihood(
        distribution=LikelihoodDistribution.from_entries(entries), mask_id=vocab.mask_id
    )


class ConstantClassifier:
    """Returns the same distribution regardless of input."""

    thread_safe = True

    def __init__(self, probs):
        self.probs = tuple(probs)
        self.class_count = len(probs)

    def classify_batch(self, sentences):
        return [ClassDistribution(probs=self.probs) for _ in sentences]


class PositionLookupClassifier:
    """Two-class classifier reading only the token at one position."""

    thread_safe = True
    class_count = 2

    def __init__(self, position: int, table: dict[int, float], default: float = 0.5):
        self.position = position
        self.table = dict(table)
        self.default = default

    def classify_batch(self, sentences):
        out = []
        for sent in sentences:
            p = self.table.get(sent.ids[self.position], self.default)
            out.append(ClassDistribution(probs=(1.0 - p, p)))
        return out


# ---------------------------------------------------------------------------
# independent dense references
# ---------------------------------------------------------------------------


def bayes_posterior(corpus: TaggedCorpus, vocab: Vocabulary, smoothing: float, sentence: Sentence):
    """Naive-Bayes posterior by direct linear-space Bayes rule."""
    class_count = corpus.class_count
    doc_counts = [0] * class_count
    token_counts = [[0] * class_count for _ in range(vocab.size)]
    for sent, label in zip(corpus.sentences, corpus.labels):
        doc_counts[label] += 1
        for tid in sent.ids:
            token_counts[tid][label] += 1
    totals = [sum(token_counts[tid][c] for tid in range(vocab.size)) for c in range(class_count)]
    joint = []
    for c in range(class_count):
        p = doc_counts[c] / len(corpus.sentences)
        for tid in sentence.ids:
            p *= (token_counts[tid][c] + smoothing) / (totals[c] + smoothing * vocab.size)
        joint.append(p)
    z = sum(joint)
    return [p / z for p in joint]


def dense_marginal_probability(
    sentence: Sentence,
    position: int,
    target_class: int,
    clf,
    lm,
    vocab_size: int,
    sigma: float = 0.0,
) -> float:
    """Dense reference for the marginalized probability at one position.

    Loops over every vocabulary id in ascending order, one classifier
    call per candidate, normalizing by the summed kept likelihood.
    """
    masked = sentence.with_token(position, lm.mask_id)
    dist = lm.fill_mask(masked, [position])[0]
    numerator = 0.0
    kept_mass = 0.0
    for tid in range(vocab_size):
        likelihood = dist.entries.get(tid, 0.0)
        if likelihood <= sigma:
            continue
        prob = clf.classify_batch([sentence.with_token(position, tid)])[0].probs[target_class]
        numerator += likelihood * prob
        kept_mass += likelihood
    return numerator / kept_mass


def dense_joint_probability(
    sentence: Sentence,
    first: int,
    second: int,
    target_class: int,
    clf,
    lm,
    vocab_size: int,
    sigma: float = 0.0,
) -> float:
    """Dense double-loop reference for two-position joint marginalization."""
    assert first < second
    masked = sentence.with_token(first, lm.mask_id).with_token(second, lm.mask_id)
    dist_first = lm.fill_mask(masked, [first])[0]
    numerator = 0.0
    kept_mass = 0.0
    for ci in range(vocab_size):
        pi = dist_first.entries.get(ci, 0.0)
        if pi <= sigma:
            continue
        filled = masked.with_token(first, ci)
        dist_second = lm.fill_mask(filled, [second])[0]
        for cj in range(vocab_size):
            pj = dist_second.entries.get(cj, 0.0)
            if pj <= sigma:
                continue
            weight = pi * pj
            prob = clf.classify_batch([filled.with_token(second, cj)])[0].probs[target_class]
            numerator += weight * prob
            kept_mass += weight
    return numerator / kept_mass


# ---------------------------------------------------------------------------
# planted-keyword corpus
# ---------------------------------------------------------------------------

KEYWORD = "brilliant"


def planted_keyword_vocab(n_fillers: int = 21) -> Vocabulary:
    fillers = [f"filler{i}" for i in range(n_fillers)]
    return make_vocab([KEYWORD, *fillers])


def planted_keyword_sentence(
    rng: random.Random, vocab: Vocabulary, with_keyword: bool, min_len: int = 4, max_len: int = 8
) -> tuple[Sentence, int]:
    """Random filler sentence; the label is keyword presence. Positive
    sentences contain the keyword exactly once."""
    keyword_id = vocab.id_of(KEYWORD)
    fillers = [i for i in support_ids(vocab) if i != keyword_id]
    length = rng.randint(min_len, max_len)
    ids = [rng.choice(fillers) for _ in range(length)]
    if with_keyword:
        ids[rng.randrange(length)] = keyword_id
    return Sentence(ids=tuple(ids)), int(with_keyword)


def planted_keyword_corpus(rng: random.Random, vocab: Vocabulary, n_sentences: int = 120) -> TaggedCorpus:
    sentences = []
    labels = []
    for i in range(n_sentences):
        sent, label = planted_keyword_sentence(rng, vocab, with_keyword=(i % 2 == 0))
        sentences.append(sent)
        labels.append(label)
    return TaggedCorpus(sentences=tuple(sentences), labels=tuple(labels), class_count=2)
