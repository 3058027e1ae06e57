"""Server configuration: model identifiers, bind address, truncation knobs."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

import yaml


@dataclass(frozen=True)
class ServerConfig:
    """Where the models come from and how distributions are truncated.

    ``mlm_model`` and ``classifier_model`` are Hugging Face checkpoint
    directories or hub identifiers; the tokenizer defaults to the
    classifier's. Fill-mask responses carry at most ``top_k`` entries,
    all at or above ``prob_floor``.
    """

    mlm_model: str
    classifier_model: str
    tokenizer: str | None = None
    host: str = "127.0.0.1"
    port: int = 8471
    top_k: int = 512
    prob_floor: float = 1e-8
    device: str = "cpu"

    def __post_init__(self) -> None:
        if self.top_k < 1:
            raise ValueError("top_k must be at least 1")
        if not 0.0 < self.prob_floor < 1.0:
            raise ValueError("prob_floor must lie in (0, 1)")


def load_config(path: str | Path | None = None, **overrides) -> ServerConfig:
    """Build a config from an optional YAML file plus keyword overrides
    (flags win over the file)."""
    data: dict = {}
    if path is not None:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} must hold a mapping")
        known = {f.name for f in fields(ServerConfig)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        data.update(raw)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ServerConfig(**data)
