"""Golden-fixture replay: bundled fixtures pass, violations are flagged."""

import json
from pathlib import Path

from margattr_server import golden_fixture_check

BUNDLED = Path(__file__).resolve().parent.parent / "fixtures"


def test_bundled_fixtures_pass(server_url):
    report = golden_fixture_check(BUNDLED, server_url)
    print("\n" + report.summary())
    assert report.passed, report.summary()
    assert len(report.results) == len(list(BUNDLED.glob("*.json")))


def test_meta_pin_mismatch_flagged(server_url, tmp_path):
    (tmp_path / "meta_pin.json").write_text(
        json.dumps({
            "name": "engine expects pad 1",
            "method": "GET",
            "path": "/v1/meta",
            "expect_status": 200,
            "expect": {"pad_id": 1},
        }),
        encoding="utf-8",
    )
    report = golden_fixture_check(tmp_path, server_url)
    assert not report.passed
    assert "pad_id" in report.summary()


def test_wrong_status_expectation_flagged(server_url, tmp_path):
    (tmp_path / "bad_status.json").write_text(
        json.dumps({
            "name": "unmasked position should have failed",
            "method": "POST",
            "path": "/v1/fill-mask",
            "request": {"tokens": [5, 6], "positions": [0]},
            "expect_status": 200,
        }),
        encoding="utf-8",
    )
    report = golden_fixture_check(tmp_path, server_url)
    assert not report.passed


def test_empty_fixture_dir_fails(server_url, tmp_path):
    report = golden_fixture_check(tmp_path, server_url)
    assert not report.passed
