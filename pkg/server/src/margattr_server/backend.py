"""Model loading and inference behind the wire protocol.

The engine ships raw shared-vocabulary token ids; all tokenizer-specific
framing ([CLS]/[SEP] wrapping, padding) happens here. Fill-mask
distributions are post-processed in the order the protocol requires:
special tokens stripped, mass renormalized, then truncated to the top-k
entries at or above the probability floor, descending (ties broken by
ascending token id so responses are reproducible).
"""

from __future__ import annotations

import threading
from typing import Sequence

import numpy as np
import torch
from transformers import (
    AutoModelForMaskedLM,
    AutoModelForSequenceClassification,
    AutoTokenizer,
)

from .config import ServerConfig


class ModelBackend:
    """Owns the tokenizer and both models; inference is serialized, so
    identical requests yield identical responses regardless of request
    interleaving."""

    def __init__(self, cfg: ServerConfig) -> None:
        self.cfg = cfg
        self.device = torch.device(cfg.device)
        self.tokenizer = AutoTokenizer.from_pretrained(cfg.tokenizer or cfg.classifier_model)
        self.mlm = AutoModelForMaskedLM.from_pretrained(cfg.mlm_model).to(self.device).eval()
        self.classifier = (
            AutoModelForSequenceClassification.from_pretrained(cfg.classifier_model)
            .to(self.device)
            .eval()
        )
        if self.mlm.config.vocab_size != self.classifier.config.vocab_size:
            raise ValueError(
                "mlm and classifier vocabularies differ "
                f"({self.mlm.config.vocab_size} vs {self.classifier.config.vocab_size}); "
                "shared-vocabulary serving is required"
            )
        for name in ("pad_token_id", "mask_token_id", "unk_token_id", "cls_token_id", "sep_token_id"):
            if getattr(self.tokenizer, name) is None:
                raise ValueError(f"tokenizer does not define {name}")
        self.vocab_size = len(self.tokenizer)
        self.special_ids = sorted(set(self.tokenizer.all_special_ids))
        self._lock = threading.Lock()

    # -- protocol surface ---------------------------------------------------

    def meta(self) -> dict:
        return {
            "vocab_size": self.vocab_size,
            "pad_id": int(self.tokenizer.pad_token_id),
            "mask_id": int(self.tokenizer.mask_token_id),
            "unk_id": int(self.tokenizer.unk_token_id),
            "class_count": int(self.classifier.config.num_labels),
        }

    def classify(self, sentences: Sequence[Sequence[int]]) -> list[list[float]]:
        cls_id = int(self.tokenizer.cls_token_id)
        sep_id = int(self.tokenizer.sep_token_id)
        pad_id = int(self.tokenizer.pad_token_id)
        framed = [[cls_id, *sent, sep_id] for sent in sentences]
        width = max(len(f) for f in framed)
        input_ids = torch.full((len(framed), width), pad_id, dtype=torch.long)
        attention = torch.zeros((len(framed), width), dtype=torch.long)
        for row, seq in enumerate(framed):
            input_ids[row, : len(seq)] = torch.tensor(seq, dtype=torch.long)
            attention[row, : len(seq)] = 1
        with self._lock, torch.no_grad():
            logits = self.classifier(
                input_ids=input_ids.to(self.device),
                attention_mask=attention.to(self.device),
            ).logits
            probs = torch.softmax(logits.double(), dim=-1).cpu().numpy()
        return [row.tolist() for row in probs]

    def fill_mask(self, tokens: Sequence[int], positions: Sequence[int]) -> list[dict]:
        cls_id = int(self.tokenizer.cls_token_id)
        sep_id = int(self.tokenizer.sep_token_id)
        framed = torch.tensor([[cls_id, *tokens, sep_id]], dtype=torch.long)
        with self._lock, torch.no_grad():
            logits = self.mlm(input_ids=framed.to(self.device)).logits[0].double()
            full = torch.softmax(logits, dim=-1).cpu().numpy()
        out = []
        for pos in positions:
            dense = full[pos + 1].copy()  # +1 for the [CLS] frame
            dense = dense[: self.vocab_size]
            dense[self.special_ids] = 0.0
            dense /= dense.sum()
            order = np.lexsort((np.arange(dense.size), -dense))[: self.cfg.top_k]
            kept = [(int(tid), float(dense[tid])) for tid in order if dense[tid] >= self.cfg.prob_floor]
            out.append(
                {
                    "token_ids": [tid for tid, _ in kept],
                    "probs": [p for _, p in kept],
                }
            )
        return out
