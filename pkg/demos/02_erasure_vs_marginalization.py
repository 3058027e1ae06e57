"""Why zero erasure overstates unimportant tokens.

Zero erasure replaces a token with the pad id. The classifier never saw
pad during training, so the substituted sentence is out of distribution
and the prediction moves even when the erased token carried no signal.
Marginalization replaces the token with plausible candidates instead,
and the spurious score largely disappears.

The corpus below is built so that the filler word "it" is exactly
neutral for the classifier (its class-conditional likelihood ratio is
1), while the positive class has longer documents. That length imbalance
is invisible for real tokens but leaks into the smoothed probability of
the never-seen pad token.
"""

from margattr import (
    MarginalizationConfig,
    Sentence,
    TaggedCorpus,
    Vocabulary,
    attribute,
    erasure_attribution,
    render_comparison,
    train_naive_bayes,
    train_ngram_lm,
)

vocab = Vocabulary(
    tokens=("[PAD]", "[UNK]", "[MASK]", "good", "bad", "it", "x1", "x2"),
    mask_id=2,
    unk_id=1,
)
g, b, it, x1, x2 = (vocab.id_of(t) for t in ("good", "bad", "it", "x1", "x2"))

# class 1: six 5-token documents; class 0: six 2-token documents
corpus = TaggedCorpus(
    sentences=(Sentence(ids=(g, it, it, x1, x2)),) * 6 + (Sentence(ids=(b, it)),) * 6,
    labels=(1,) * 6 + (0,) * 6,
    class_count=2,
)
clf = train_naive_bayes(corpus, vocab, smoothing=1.0)
lm = train_ngram_lm(corpus, vocab, order=1, smoothing=1.0)

probe = Sentence(ids=(g, it, x1))
tokens = vocab.decode(probe.ids)
cfg = MarginalizationConfig(target_class=1, sigma=0.0)

marg = attribute(probe, cfg, clf, lm)
zero = erasure_attribution(probe, vocab.pad_id, 1, cfg.prob_clamp, clf, method="zero_erasure")
unk = erasure_attribution(probe, vocab.unk_id, 1, cfg.prob_clamp, clf, method="unk_erasure")

print("per-token scores toward the positive class (bits):\n")
print(f"{'token':<8} {'marginalization':>16} {'zero erasure':>14} {'unk erasure':>13}")
for i, tok in enumerate(tokens):
    print(f"{tok:<8} {marg.scores[i]:>16.4f} {zero.scores[i]:>14.4f} {unk.scores[i]:>13.4f}")

neutral = tokens.index("it")
print(
    f"\nneutral token 'it': |zero erasure| = {abs(zero.scores[neutral]):.4f} bits vs "
    f"|marginalization| = {abs(marg.scores[neutral]):.4f} bits"
)
print("erasure reads part of the pad token's distribution shift as importance.")

with open("erasure_comparison.html", "wb") as fh:
    fh.write(render_comparison([marg, zero, unk], tokens, "html"))
print("wrote erasure_comparison.html")
