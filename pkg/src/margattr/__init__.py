"""Model-agnostic token attribution via likelihood-weighted input marginalization.

Instead of erasing a token with a fixed placeholder (which pushes the
sentence out of the classifier's training distribution), each token is
replaced by every plausible candidate, the classifier's responses are
averaged under the candidates' likelihoods, and the change in prediction
odds is reported in bits.
"""

from .engine import (
    AttributionMap,
    MarginalizationConfig,
    attribute,
    attribute_joint,
    erasure_attribution,
    marginalized_probability,
    weight_of_evidence,
)
from .errors import (
    ConfigError,
    EngineError,
    InvalidDistributionError,
    MargattrError,
    OracleError,
    OracleUnavailableError,
    ProtocolViolationError,
)
from .evaluation import (
    AblationRow,
    DeletionCurve,
    auc,
    deletion_curve,
    evaluate_corpus,
    iot,
    neutral_mean_score,
    pearson,
    truncation_ablation,
)
from .oracles import (
    BigramLikelihood,
    ClassDistribution,
    ClassifierOracle,
    ContextFreeLikelihood,
    LikelihoodDistribution,
    LikelihoodOracle,
    NaiveBayesClassifier,
    prior_likelihood,
    train_naive_bayes,
    train_ngram_lm,
    uniform_likelihood,
)
from .remote import remote_oracle
from .report import HeatmapDoc, render_comparison, render_heatmap
from .vocab import (
    Sentence,
    TaggedCorpus,
    Vocabulary,
    collapse_sentiment_level,
    load_corpus,
    load_vocabulary,
    tokenize_whitespace,
)

__version__ = "0.1.0"

__all__ = [
    "AblationRow",
    "AttributionMap",
    "BigramLikelihood",
    "ClassDistribution",
    "ClassifierOracle",
    "ConfigError",
    "ContextFreeLikelihood",
    "DeletionCurve",
    "EngineError",
    "HeatmapDoc",
    "InvalidDistributionError",
    "LikelihoodDistribution",
    "LikelihoodOracle",
    "MargattrError",
    "MarginalizationConfig",
    "NaiveBayesClassifier",
    "OracleError",
    "OracleUnavailableError",
    "ProtocolViolationError",
    "Sentence",
    "TaggedCorpus",
    "Vocabulary",
    "attribute",
    "attribute_joint",
    "auc",
    "collapse_sentiment_level",
    "deletion_curve",
    "erasure_attribution",
    "evaluate_corpus",
    "iot",
    "load_corpus",
    "load_vocabulary",
    "marginalized_probability",
    "neutral_mean_score",
    "pearson",
    "prior_likelihood",
    "remote_oracle",
    "render_comparison",
    "render_heatmap",
    "tokenize_whitespace",
    "train_naive_bayes",
    "train_ngram_lm",
    "truncation_ablation",
    "uniform_likelihood",
    "weight_of_evidence",
]
