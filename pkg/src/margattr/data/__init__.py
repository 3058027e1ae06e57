"""Bundled toy corpus for demos, CLI smoke runs, and determinism tests."""

from importlib.resources import files
from pathlib import Path


def toy_vocab_path() -> Path:
    return Path(str(files(__name__) / "toy_reviews.vocab.txt"))


def toy_corpus_path() -> Path:
    return Path(str(files(__name__) / "toy_reviews.jsonl"))
