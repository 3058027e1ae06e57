"""Golden-fixture replay against a running server.

Each fixture is a JSON file describing one request and the expected
status; 200 responses are validated against the protocol schema and the
distribution invariants (values are model-dependent and never
byte-compared). Fixtures may pin response fields with an ``expect``
mapping (e.g. the engine's pad-id convention) and may use the
placeholders ``"<mask>"``, ``"<pad>"``, ``"<unk>"`` in request bodies,
which are substituted with the live server's special ids.

Fixture file shape:

    {
      "name": "classify smoke",
      "method": "POST",
      "path": "/v1/classify",
      "request": {"sentences": [[5, 6], [7]]},
      "expect_status": 200,
      "expect": {...}          # optional subset match on the response
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import httpx

_CLASSIFY_SUM_TOL = 1e-4
_MASS_TOL = 1e-6
_META_KEYS = ("vocab_size", "pad_id", "mask_id", "unk_id", "class_count")


@dataclass
class FixtureReport:
    passed: bool = True
    results: list[tuple[str, bool, str]] = field(default_factory=list)

    def record(self, name: str, ok: bool, message: str = "") -> None:
        self.results.append((name, ok, message))
        if not ok:
            self.passed = False

    def summary(self) -> str:
        lines = [
            f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {msg}" if msg else "")
            for name, ok, msg in self.results
        ]
        verdict = "all fixtures passed" if self.passed else "fixture check FAILED"
        return "\n".join([*lines, verdict])


def _substitute(node, meta: dict):
    markers = {"<mask>": meta["mask_id"], "<pad>": meta["pad_id"], "<unk>": meta["unk_id"]}
    if isinstance(node, str) and node in markers:
        return markers[node]
    if isinstance(node, list):
        return [_substitute(item, meta) for item in node]
    if isinstance(node, dict):
        return {key: _substitute(value, meta) for key, value in node.items()}
    return node


def _check_meta(body: dict) -> str | None:
    for key in _META_KEYS:
        if key not in body or not isinstance(body[key], int):
            return f"meta missing integer field {key!r}"
    return None


def _check_classify(body: dict, request: dict) -> str | None:
    rows = body.get("probs")
    if not isinstance(rows, list):
        return "response missing 'probs' list"
    if len(rows) != len(request.get("sentences", [])):
        return f"{len(rows)} probability rows for {len(request['sentences'])} sentences"
    class_count = body.get("class_count")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != class_count:
            return f"row {i} is not a length-{class_count} vector"
        if any(not isinstance(p, (int, float)) or p < 0 or p > 1 for p in row):
            return f"row {i} has probabilities outside [0, 1]"
        total = sum(row)
        if abs(total - 1.0) > _CLASSIFY_SUM_TOL:
            return f"row {i} sums to {total}, outside 1 +/- {_CLASSIFY_SUM_TOL}"
    return None


def _check_fill_mask(body: dict, request: dict, meta: dict) -> str | None:
    dists = body.get("distributions")
    if not isinstance(dists, list):
        return "response missing 'distributions' list"
    if len(dists) != len(request.get("positions", [])):
        return f"{len(dists)} distributions for {len(request['positions'])} positions"
    forbidden = {meta["pad_id"], meta["mask_id"]}
    for i, dist in enumerate(dists):
        if not isinstance(dist, dict) or "token_ids" not in dist or "probs" not in dist:
            return f"distribution {i} missing token_ids/probs"
        ids, probs = dist["token_ids"], dist["probs"]
        if len(ids) != len(probs):
            return f"distribution {i}: token_ids/probs misaligned"
        if any(probs[j] < probs[j + 1] for j in range(len(probs) - 1)):
            return f"distribution {i}: probabilities not descending"
        if any(not 0 <= tid < meta["vocab_size"] for tid in ids):
            return f"distribution {i}: token id outside vocabulary"
        if any(tid in forbidden for tid in ids):
            return f"distribution {i}: mass assigned to a special token"
        if any(p <= 0 or p > 1 for p in probs):
            return f"distribution {i}: probability outside (0, 1]"
        if sum(probs) > 1.0 + _MASS_TOL:
            return f"distribution {i}: covered mass {sum(probs)} exceeds 1"
    return None


def _subset_mismatch(expect: dict, body: dict) -> str | None:
    for key, want in expect.items():
        got = body.get(key)
        if got != want:
            return f"expected {key}={want!r}, server returned {got!r}"
    return None


def golden_fixture_check(fixture_dir: str | Path, base_url: str, timeout: float = 30.0) -> FixtureReport:
    """Replay every ``*.json`` fixture in the directory; return a report."""
    report = FixtureReport()
    paths = sorted(Path(fixture_dir).glob("*.json"))
    if not paths:
        report.record("fixtures", False, f"no fixture files in {fixture_dir}")
        return report
    with httpx.Client(base_url=base_url.rstrip("/"), timeout=timeout) as client:
        try:
            meta = client.get("/v1/meta").json()
        except (httpx.HTTPError, ValueError) as exc:
            report.record("meta", False, f"cannot fetch /v1/meta: {exc}")
            return report
        problem = _check_meta(meta)
        if problem:
            report.record("meta", False, problem)
            return report
        for path in paths:
            fixture = json.loads(path.read_text(encoding="utf-8"))
            name = fixture.get("name", path.stem)
            method = fixture.get("method", "POST")
            target = fixture["path"]
            request_body = _substitute(fixture.get("request"), meta)
            expect_status = fixture.get("expect_status", 200)
            try:
                response = client.request(method, target, json=request_body)
            except httpx.HTTPError as exc:
                report.record(name, False, f"transport failure: {exc}")
                continue
            if response.status_code != expect_status:
                report.record(
                    name, False,
                    f"status {response.status_code}, expected {expect_status}: {response.text[:200]}",
                )
                continue
            if expect_status != 200:
                report.record(name, True)
                continue
            try:
                body = response.json()
            except ValueError:
                report.record(name, False, "non-JSON response body")
                continue
            if target == "/v1/meta":
                problem = _check_meta(body)
            elif target == "/v1/classify":
                problem = _check_classify(body, request_body)
            elif target == "/v1/fill-mask":
                problem = _check_fill_mask(body, request_body, meta)
            else:
                problem = f"unknown endpoint {target}"
            if problem is None and "expect" in fixture:
                problem = _subset_mismatch(fixture["expect"], body)
            report.record(name, problem is None, problem or "")
    return report
