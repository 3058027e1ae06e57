"""Attribute one toy movie review and render the heatmap.

Walks the core loop end to end: load the bundled corpus, train the toy
oracles, score every token of a sentence by marginalizing it out, and
show which tokens drove the classifier's decision.
"""

import sys

from margattr import (
    MarginalizationConfig,
    attribute,
    render_heatmap,
    load_corpus,
    load_vocabulary,
    train_naive_bayes,
    train_ngram_lm,
)
from margattr.data import toy_corpus_path, toy_vocab_path

vocab = load_vocabulary(toy_vocab_path())
corpus = load_corpus(toy_corpus_path(), vocab)
print(f"toy corpus: {len(corpus)} sentences, vocab {vocab.size}, {corpus.class_count} classes")

# Toy stand-ins for the real models: a naive-Bayes classifier plays the
# target model, a corpus unigram plays the masked language model.
clf = train_naive_bayes(corpus, vocab, smoothing=1.0)
lm = train_ngram_lm(corpus, vocab, order=1, smoothing=1.0)

sentence = corpus.sentences[2]
label = corpus.labels[2]
tokens = vocab.decode(sentence.ids)
print("\nsentence:", " ".join(tokens), f"(label {label})")

# Marginalize each token over candidates above the likelihood threshold.
cfg = MarginalizationConfig(target_class=label, sigma=1e-5)
attr = attribute(sentence, cfg, clf, lm)

print(f"\nattribution toward class {label} (bits):")
for tok, score, kept in zip(tokens, attr.scores, attr.candidate_counts):
    print(f"  {tok:<12} {score:+8.4f}   ({kept} candidates kept)")

sys.stdout.write("\n" + render_heatmap(attr, tokens, "ansi").decode() + "\n")

out = "attribution_demo.html"
with open(out, "wb") as fh:
    fh.write(render_heatmap(attr, tokens, "html"))
print(f"wrote {out}")
