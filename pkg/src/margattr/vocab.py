"""Token/id bookkeeping: vocabularies, sentences, and tagged corpora.

The attribution engine consumes pre-tokenized integer id sequences; the
whitespace tokenizer here exists only for toy corpora. Real models keep
their own subword tokenizers and ship raw ids.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable

from .errors import ConfigError

PAD_TOKEN = "[PAD]"
MASK_TOKEN = "[MASK]"
UNK_TOKEN = "[UNK]"

#: Word-level sentiment tags accepted in corpus files.
SENTIMENT_TAGS = ("pos", "neut", "neg")


@dataclass(frozen=True)
class Vocabulary:
    """Dense token-string <-> integer-id table with reserved special ids.

    Ids are the positions in ``tokens``; ``pad_id`` defaults to 0 so that
    zero-erasure substitutes the pad token. Extra reserved ids beyond the
    three standard specials can be listed in ``reserved``; all of them are
    excluded from candidate-replacement distributions.
    """

    tokens: tuple[str, ...]
    mask_id: int
    unk_id: int
    pad_id: int = 0
    reserved: frozenset[int] = frozenset()
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ConfigError("empty vocabulary")
        index = {}
        for i, tok in enumerate(self.tokens):
            if tok in index:
                raise ConfigError(f"duplicate token: {tok!r}")
            index[tok] = i
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "_index", index)
        specials = (self.pad_id, self.mask_id, self.unk_id)
        for sid in (*specials, *self.reserved):
            if not 0 <= sid < len(self.tokens):
                raise ConfigError(f"special id {sid} out of range")
        if len(set(specials)) != 3:
            raise ConfigError("pad_id, mask_id and unk_id must be distinct")

    @property
    def size(self) -> int:
        return len(self.tokens)

    @property
    def special_ids(self) -> frozenset[int]:
        """Ids never offered as candidate replacements."""
        return frozenset((self.pad_id, self.mask_id, self.unk_id)) | self.reserved

    def id_of(self, token: str) -> int | None:
        return self._index.get(token)

    def token_of(self, token_id: int) -> str:
        return self.tokens[token_id]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.tokens[i] for i in ids]

    def validate_ids(self, ids: Iterable[int]) -> None:
        for i in ids:
            if not 0 <= i < len(self.tokens):
                raise ConfigError(f"token id {i} out of range for vocabulary of size {self.size}")


@dataclass(frozen=True)
class Sentence:
    """Ordered token-id sequence, optionally segmented and tagged.

    ``segment_boundaries`` lists split indices for sentence pairs
    (premise/hypothesis); ``tags`` carries one pos/neut/neg label per
    token when word-level sentiment annotation exists.
    """

    ids: tuple[int, ...]
    segment_boundaries: tuple[int, ...] | None = None
    tags: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "ids", tuple(self.ids))
        if len(self.ids) < 1:
            raise ConfigError("sentence must contain at least one token")
        if self.tags is not None:
            object.__setattr__(self, "tags", tuple(self.tags))
            if len(self.tags) != len(self.ids):
                raise ConfigError("tags must have exactly one entry per token")
            for t in self.tags:
                if t not in SENTIMENT_TAGS:
                    raise ConfigError(f"unknown tag {t!r}")
        if self.segment_boundaries is not None:
            object.__setattr__(self, "segment_boundaries", tuple(self.segment_boundaries))
            prev = 0
            for b in self.segment_boundaries:
                if not prev < b < len(self.ids):
                    raise ConfigError("segment boundaries must be strictly increasing interior indices")
                prev = b

    def __len__(self) -> int:
        return len(self.ids)

    def with_token(self, position: int, token_id: int) -> "Sentence":
        """Copy of the sentence with one position substituted."""
        ids = list(self.ids)
        ids[position] = token_id
        return replace(self, ids=tuple(ids))


@dataclass(frozen=True)
class TaggedCorpus:
    """Sentences with one class label each, for training toy oracles."""

    sentences: tuple[Sentence, ...]
    labels: tuple[int, ...]
    class_count: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.sentences:
            raise ConfigError("corpus is empty")
        if len(self.sentences) != len(self.labels):
            raise ConfigError("one label per sentence required")
        if self.class_count < 2:
            raise ConfigError("class_count must be at least 2")
        for y in self.labels:
            if not 0 <= y < self.class_count:
                raise ConfigError(f"label {y} outside [0, {self.class_count})")

    def __len__(self) -> int:
        return len(self.sentences)


def tokenize_whitespace(text: str, vocab: Vocabulary) -> Sentence:
    """Lowercase, split on whitespace, and map words to ids.

    Unknown words map to ``unk_id``. Words that would map to the pad or
    mask id are treated as unknown, so tokenizer output never contains
    either special.
    """
    words = text.lower().split()
    if not words:
        raise ConfigError("empty input")
    ids = []
    for w in words:
        i = vocab.id_of(w)
        if i is None or i == vocab.pad_id or i == vocab.mask_id:
            i = vocab.unk_id
        ids.append(i)
    return Sentence(ids=tuple(ids))


def load_vocabulary(
    path: str | Path,
    pad_token: str = PAD_TOKEN,
    mask_token: str = MASK_TOKEN,
    unk_token: str = UNK_TOKEN,
) -> Vocabulary:
    """Read a one-token-per-line UTF-8 file; line number is the id.

    Special ids are resolved by looking up the given token strings
    (override the defaults for vocabularies using other conventions).
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"vocabulary file not found: {path}")
    tokens = path.read_text(encoding="utf-8").splitlines()
    if not tokens:
        raise ConfigError("empty vocabulary")
    specials = {}
    for name, tok in (("pad", pad_token), ("mask", mask_token), ("unk", unk_token)):
        try:
            specials[name] = tokens.index(tok)
        except ValueError:
            raise ConfigError(f"missing special token {tok!r} (no override given)") from None
    return Vocabulary(
        tokens=tuple(tokens),
        pad_id=specials["pad"],
        mask_id=specials["mask"],
        unk_id=specials["unk"],
    )


def collapse_sentiment_level(level: int) -> str:
    """Merge a five-level word sentiment (0=very negative .. 4=very positive)
    into the three-way pos/neut/neg tagging used throughout."""
    if level in (0, 1):
        return "neg"
    if level == 2:
        return "neut"
    if level in (3, 4):
        return "pos"
    raise ConfigError(f"sentiment level {level} outside 0..4")


def load_corpus(path: str | Path, vocab: Vocabulary, class_count: int | None = None) -> TaggedCorpus:
    """Load a JSONL corpus of ``{"tokens": [...], "label": int, ...}`` rows.

    Optional per-row fields: ``tags`` (pos/neut/neg strings, one per
    token) and ``segments`` (split indices). When ``class_count`` is not
    given it is inferred as ``max(label) + 1``.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"corpus file not found: {path}")
    sentences: list[Sentence] = []
    labels: list[int] = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{lineno}: invalid JSON: {exc}") from None
        try:
            ids = tuple(int(t) for t in row["tokens"])
            label = int(row["label"])
        except (KeyError, TypeError, ValueError):
            raise ConfigError(f"{path}:{lineno}: each row needs 'tokens' and 'label'") from None
        vocab.validate_ids(ids)
        tags = row.get("tags")
        segments = row.get("segments")
        try:
            sentences.append(
                Sentence(
                    ids=ids,
                    tags=tuple(tags) if tags is not None else None,
                    segment_boundaries=tuple(segments) if segments is not None else None,
                )
            )
        except ConfigError as exc:
            raise ConfigError(f"{path}:{lineno}: {exc}") from None
        labels.append(label)
    if not sentences:
        raise ConfigError(f"corpus file {path} contains no rows")
    if class_count is None:
        class_count = max(labels) + 1
    return TaggedCorpus(sentences=tuple(sentences), labels=tuple(labels), class_count=class_count)
