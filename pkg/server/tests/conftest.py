"""Session fixtures: tiny offline checkpoints and a live server.

The models are randomly initialized two-layer BERTs saved to a temp
directory; protocol conformance does not depend on trained weights, only
on the serving pipeline (framing, softmax, stripping, truncation).
"""

import threading
import time

import pytest
import torch
import uvicorn
from tokenizers import Tokenizer, models
from transformers import (
    BertConfig,
    BertForMaskedLM,
    BertForSequenceClassification,
    PreTrainedTokenizerFast,
)

from margattr_server.app import create_app
from margattr_server.backend import ModelBackend
from margattr_server.config import ServerConfig

VOCAB_SIZE = 65
TOP_K = 16


def build_tokenizer(tokens):
    core = Tokenizer(models.WordPiece(vocab={t: i for i, t in enumerate(tokens)}, unk_token="[UNK]"))
    return PreTrainedTokenizerFast(
        tokenizer_object=core,
        pad_token="[PAD]",
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


@pytest.fixture(scope="session")
def checkpoints(tmp_path_factory):
    root = tmp_path_factory.mktemp("tiny_models")
    tokens = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + [
        f"tok{i}" for i in range(VOCAB_SIZE - 5)
    ]
    build_tokenizer(tokens).save_pretrained(root / "tokenizer")
    common = dict(
        vocab_size=VOCAB_SIZE,
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(1234)
    BertForMaskedLM(BertConfig(**common)).save_pretrained(root / "mlm")
    BertForSequenceClassification(BertConfig(**common, num_labels=2)).save_pretrained(root / "clf")
    return root


@pytest.fixture(scope="session")
def backend(checkpoints):
    cfg = ServerConfig(
        mlm_model=str(checkpoints / "mlm"),
        classifier_model=str(checkpoints / "clf"),
        tokenizer=str(checkpoints / "tokenizer"),
        top_k=TOP_K,
    )
    return ModelBackend(cfg)


@pytest.fixture(scope="session")
def server_url(backend):
    app = create_app(backend)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 30
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("server failed to start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=10)
