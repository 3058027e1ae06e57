"""End to end: the attribution engine driving the live server."""

import math

import pytest

from margattr import (
    MarginalizationConfig,
    Sentence,
    Vocabulary,
    attribute,
    deletion_curve,
    remote_oracle,
)

from conftest import TOP_K


@pytest.fixture(scope="module")
def oracles(server_url, backend):
    # engine-side vocabulary mirroring the server's tokenizer; cls/sep are
    # extra reserved ids beyond the three standard specials
    tokens = tuple(
        backend.tokenizer.convert_ids_to_tokens(list(range(len(backend.tokenizer))))
    )
    vocab = Vocabulary(
        tokens=tokens,
        pad_id=int(backend.tokenizer.pad_token_id),
        mask_id=int(backend.tokenizer.mask_token_id),
        unk_id=int(backend.tokenizer.unk_token_id),
        reserved=frozenset(
            {int(backend.tokenizer.cls_token_id), int(backend.tokenizer.sep_token_id)}
        ),
    )
    clf, lm = remote_oracle(server_url, timeout=30.0, vocab=vocab)
    return vocab, clf, lm


def test_remote_attribution_end_to_end(oracles):
    vocab, clf, lm = oracles
    sentence = Sentence(ids=(10, 11, 12, 13, 14))
    cfg = MarginalizationConfig(target_class=1, sigma=1e-4)
    attr = attribute(sentence, cfg, clf, lm)
    assert len(attr.scores) == len(sentence.ids)
    assert all(math.isfinite(s) for s in attr.scores)
    assert all(0 < c <= TOP_K for c in attr.candidate_counts)
    assert attr.method == "marginalization"


def test_remote_attribution_deterministic(oracles):
    vocab, clf, lm = oracles
    sentence = Sentence(ids=(20, 21, 22))
    cfg = MarginalizationConfig(target_class=0, sigma=1e-4)
    assert attribute(sentence, cfg, clf, lm).scores == attribute(sentence, cfg, clf, lm).scores


def test_remote_deletion_curve(oracles):
    vocab, clf, lm = oracles
    sentence = Sentence(ids=(10, 11, 12, 13, 14, 15, 16, 17, 18, 19))
    cfg = MarginalizationConfig(target_class=1, sigma=1e-4)
    attr = attribute(sentence, cfg, clf, lm)
    curve = deletion_curve(sentence, attr, clf, lm, max_fraction=0.2, seed=3)
    assert len(curve.points) == 3
    again = deletion_curve(sentence, attr, clf, lm, max_fraction=0.2, seed=3)
    assert curve == again
