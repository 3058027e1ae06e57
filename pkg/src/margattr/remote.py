"""HTTP client for real classifier / masked-LM oracles.

Wire protocol (JSON bodies, UTF-8):

- ``POST /v1/classify``   ``{"sentences": [[int, ...], ...]}`` ->
  ``{"class_count": int, "probs": [[float, ...], ...]}``
- ``POST /v1/fill-mask``  ``{"tokens": [int, ...], "positions": [int, ...]}`` ->
  ``{"distributions": [{"token_ids": [...], "probs": [...]}, ...]}``
  (sparse, descending by probability, aligned with the positions)
- ``GET /v1/meta`` ->
  ``{"vocab_size", "pad_id", "mask_id", "unk_id", "class_count"}``

Responses are validated against the distribution invariants before use;
transport failures are retried, and exhausted retries surface as
"oracle unavailable".
"""

from __future__ import annotations

import threading
from typing import Sequence

import httpx

from .errors import (
    ConfigError,
    InvalidDistributionError,
    OracleUnavailableError,
    ProtocolViolationError,
)
from .oracles import ClassDistribution, LikelihoodDistribution
from .vocab import Sentence, Vocabulary

_CLASSIFY_SUM_TOL = 1e-4
_RENORM_TOL = 1e-9


class _Transport:
    """Serialized HTTP transport with retry-on-transport-failure."""

    def __init__(self, endpoint: str, timeout: float, retries: int) -> None:
        self._client = httpx.Client(base_url=endpoint.rstrip("/"), timeout=timeout)
        self._retries = retries
        self._lock = threading.Lock()

    def request(self, method: str, path: str, body: dict | None = None) -> dict:
        last_error: Exception | None = None
        with self._lock:
            for _ in range(self._retries + 1):
                try:
                    response = self._client.request(method, path, json=body)
                except httpx.HTTPError as exc:
                    last_error = exc
                    continue
                if response.status_code >= 500:
                    last_error = RuntimeError(f"server error {response.status_code}")
                    continue
                if response.status_code != 200:
                    raise ProtocolViolationError(
                        f"protocol violation: {method} {path} returned {response.status_code}: "
                        f"{response.text[:200]}"
                    )
                try:
                    payload = response.json()
                except ValueError:
                    raise ProtocolViolationError(
                        f"protocol violation: non-JSON body from {path}"
                    ) from None
                if not isinstance(payload, dict):
                    raise ProtocolViolationError(f"protocol violation: {path} body is not an object")
                return payload
        raise OracleUnavailableError(f"oracle unavailable: {method} {path}: {last_error}")


class RemoteClassifier:
    """Classifier oracle proxied over the wire protocol."""

    thread_safe = False

    def __init__(self, transport: _Transport, class_count: int, batch_size: int) -> None:
        self._transport = transport
        self.class_count = class_count
        self._batch_size = batch_size

    def classify_batch(self, sentences: Sequence[Sentence]) -> list[ClassDistribution]:
        out: list[ClassDistribution] = []
        batch = self._batch_size
        for start in range(0, len(sentences), batch):
            chunk = sentences[start : start + batch]
            payload = self._transport.request(
                "POST", "/v1/classify", {"sentences": [list(s.ids) for s in chunk]}
            )
            rows = payload.get("probs")
            if not isinstance(rows, list) or len(rows) != len(chunk):
                raise ProtocolViolationError(
                    "protocol violation: classify response misaligned with request"
                )
            for row in rows:
                out.append(_parse_class_row(row, self.class_count))
        return out


def _parse_class_row(row, class_count: int) -> ClassDistribution:
    if not isinstance(row, list) or len(row) != class_count:
        raise ProtocolViolationError("protocol violation: bad classify probability row")
    try:
        values = [float(p) for p in row]
    except (TypeError, ValueError):
        raise ProtocolViolationError("protocol violation: non-numeric probability") from None
    total = sum(values)
    if abs(total - 1.0) > _CLASSIFY_SUM_TOL:
        raise InvalidDistributionError(f"invalid distribution: class probabilities sum to {total}")
    if abs(total - 1.0) > _RENORM_TOL:
        values = [p / total for p in values]
    return ClassDistribution(probs=tuple(values))


class RemoteLikelihood:
    """Masked-LM likelihood oracle proxied over the wire protocol."""

    thread_safe = False

    def __init__(self, transport: _Transport, meta: dict) -> None:
        self._transport = transport
        self._vocab_size = meta["vocab_size"]
        self._forbidden = (meta["pad_id"], meta["mask_id"])
        self.mask_id = meta["mask_id"]

    def fill_mask(self, sentence: Sentence, positions: Sequence[int]) -> list[LikelihoodDistribution]:
        payload = self._transport.request(
            "POST",
            "/v1/fill-mask",
            {"tokens": list(sentence.ids), "positions": list(positions)},
        )
        raw = payload.get("distributions")
        if not isinstance(raw, list) or len(raw) != len(positions):
            raise ProtocolViolationError(
                "protocol violation: fill-mask response misaligned with positions"
            )
        return [self._parse_distribution(d) for d in raw]

    def _parse_distribution(self, entry) -> LikelihoodDistribution:
        if not isinstance(entry, dict) or "token_ids" not in entry or "probs" not in entry:
            raise ProtocolViolationError("protocol violation: distribution missing token_ids/probs")
        ids, probs = entry["token_ids"], entry["probs"]
        if not isinstance(ids, list) or not isinstance(probs, list) or len(ids) != len(probs):
            raise ProtocolViolationError("protocol violation: token_ids/probs misaligned")
        if any(probs[i] < probs[i + 1] for i in range(len(probs) - 1)):
            raise ProtocolViolationError("protocol violation: probabilities not descending")
        entries: dict[int, float] = {}
        for tid, p in zip(ids, probs):
            tid = int(tid)
            if not 0 <= tid < self._vocab_size:
                raise InvalidDistributionError(f"invalid distribution: token id {tid} out of range")
            if tid in self._forbidden:
                raise InvalidDistributionError(
                    f"invalid distribution: mass assigned to special token {tid}"
                )
            if tid in entries:
                raise InvalidDistributionError(f"invalid distribution: duplicate token id {tid}")
            entries[tid] = float(p)
        return LikelihoodDistribution.from_entries(entries)


def fetch_meta(endpoint: str, timeout: float = 10.0, retries: int = 2) -> dict:
    """Fetch and validate the server's ``/v1/meta`` document."""
    transport = _Transport(endpoint, timeout, retries)
    return _validated_meta(transport)


def _validated_meta(transport: _Transport) -> dict:
    meta = transport.request("GET", "/v1/meta")
    for key in ("vocab_size", "pad_id", "mask_id", "unk_id", "class_count"):
        if key not in meta or not isinstance(meta[key], int):
            raise ProtocolViolationError(f"protocol violation: meta missing integer field {key!r}")
    return meta


def remote_oracle(
    endpoint: str,
    timeout: float = 10.0,
    retries: int = 2,
    vocab: Vocabulary | None = None,
    batch_size: int = 32,
) -> tuple[RemoteClassifier, RemoteLikelihood]:
    """Connect to a model server and return (classifier, likelihood) proxies.

    When a local ``vocab`` is given, the server's meta document must agree
    on vocabulary size and special ids; mismatched vocabularies are
    rejected rather than remapped.
    """
    transport = _Transport(endpoint, timeout, retries)
    meta = _validated_meta(transport)
    if vocab is not None:
        expected = {
            "vocab_size": vocab.size,
            "pad_id": vocab.pad_id,
            "mask_id": vocab.mask_id,
            "unk_id": vocab.unk_id,
        }
        for key, value in expected.items():
            if meta[key] != value:
                raise ConfigError(
                    f"vocabulary mismatch: server {key}={meta[key]}, local {key}={value}"
                )
    classifier = RemoteClassifier(transport, class_count=meta["class_count"], batch_size=batch_size)
    likelihood = RemoteLikelihood(transport, meta)
    return classifier, likelihood
