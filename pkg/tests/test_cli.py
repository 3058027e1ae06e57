"""CLI wiring: exit codes, output layout, byte determinism."""

import json
from pathlib import Path

import pytest

from margattr.cli import main
from margattr.data import toy_corpus_path, toy_vocab_path


def snapshot(root: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def wipe(root: Path) -> None:
    for p in sorted(root.rglob("*"), reverse=True):
        p.unlink() if p.is_file() else p.rmdir()


@pytest.fixture
def small_corpus(tmp_path):
    """First eight sentences of the bundled corpus, for faster runs."""
    lines = toy_corpus_path().read_text(encoding="utf-8").splitlines()[:8]
    path = tmp_path / "small.jsonl"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def base_args(corpus, out):
    return [
        "--corpus", str(corpus),
        "--vocab", str(toy_vocab_path()),
        "--out", str(out),
        "--seed", "0",
    ]


class TestAttribute:
    def test_writes_attribution_json(self, tmp_path, small_corpus):
        out = tmp_path / "out"
        code = main(["attribute", *base_args(small_corpus, out), "--format", "json,html,ansi"])
        assert code == 0
        doc = json.loads((out / "attributions/marg/sentence_0000.json").read_text())
        assert set(doc) == {"tokens", "scores", "method", "target_class", "config"}
        assert doc["method"] == "marginalization"
        assert len(doc["tokens"]) == len(doc["scores"])
        assert doc["config"]["subcommand"] == "attribute"
        assert (out / "attributions/marg/sentence_0000.html").exists()
        assert (out / "attributions/marg/sentence_0000.ansi").exists()

    def test_byte_identical_reruns(self, tmp_path, small_corpus):
        out = tmp_path / "out"
        args = ["attribute", *base_args(small_corpus, out), "--format", "json,html"]
        assert main(args) == 0
        first = snapshot(out)
        wipe(out)
        assert main(args) == 0
        assert snapshot(out) == first

    def test_jobs_do_not_change_output(self, tmp_path, small_corpus):
        out1, out2 = tmp_path / "o1", tmp_path / "o2"
        assert main(["attribute", *base_args(small_corpus, out1), "--format", "json"]) == 0
        assert main(["attribute", *base_args(small_corpus, out2), "--format", "json", "--jobs", "4"]) == 0
        a, b = snapshot(out1), snapshot(out2)
        assert set(a) == set(b)
        # provenance embeds the differing out path and jobs count;
        # scores, tokens, and everything else must match exactly
        for key in a:
            da, db = json.loads(a[key]), json.loads(b[key])
            for field in ("out", "jobs"):
                da["config"].pop(field), db["config"].pop(field)
            assert da == db

    def test_engine_invariant_violation_exits_3(self, tmp_path, small_corpus, capsys):
        # a sigma no candidate clears turns into an internal engine error
        code = main([
            "attribute", *base_args(small_corpus, tmp_path / "o"), "--sigma", "0.99",
        ])
        assert code == 3
        assert "no candidates above threshold" in capsys.readouterr().err

    def test_missing_vocab_exits_1_naming_path(self, tmp_path, small_corpus, capsys):
        code = main([
            "attribute", "--corpus", str(small_corpus),
            "--vocab", str(tmp_path / "missing.txt"), "--out", str(tmp_path / "o"),
        ])
        assert code == 1
        assert "missing.txt" in capsys.readouterr().err

    def test_remote_oracle_down_exits_2(self, tmp_path, small_corpus, capsys):
        code = main([
            "attribute", *base_args(small_corpus, tmp_path / "o"),
            "--classifier", "remote:http://127.0.0.1:9",
            "--timeout", "0.2", "--retries", "0",
        ])
        assert code == 2
        assert "oracle" in capsys.readouterr().err

    def test_zero_and_unk_methods(self, tmp_path, small_corpus):
        out = tmp_path / "out"
        code = main([
            "attribute", *base_args(small_corpus, out),
            "--method", "zero", "--method", "unk",
        ])
        assert code == 0
        zero = json.loads((out / "attributions/zero/sentence_0000.json").read_text())
        unk = json.loads((out / "attributions/unk/sentence_0000.json").read_text())
        assert zero["method"] == "zero_erasure"
        assert unk["method"] == "unk_erasure"

    def test_usage_error_exits_1(self, capsys):
        assert main(["attribute", "--no-such-flag"]) == 1

    def test_bare_remote_reads_endpoint_env(self, tmp_path, small_corpus, monkeypatch, capsys):
        monkeypatch.setenv("MARGIN_ATTR_ENDPOINT", "http://127.0.0.1:9")
        code = main([
            "attribute", *base_args(small_corpus, tmp_path / "o"),
            "--classifier", "remote", "--timeout", "0.2", "--retries", "0",
        ])
        assert code == 2  # endpoint resolved from the environment, then unreachable

    def test_bare_remote_without_env_exits_1(self, tmp_path, small_corpus, monkeypatch, capsys):
        monkeypatch.delenv("MARGIN_ATTR_ENDPOINT", raising=False)
        code = main([
            "attribute", *base_args(small_corpus, tmp_path / "o"), "--likelihood", "remote",
        ])
        assert code == 1
        assert "MARGIN_ATTR_ENDPOINT" in capsys.readouterr().err


class TestEvaluate:
    def test_summary_mirrors_method_table(self, tmp_path, small_corpus):
        out = tmp_path / "out"
        code = main([
            "evaluate", *base_args(small_corpus, out),
            "--iot", "--neutral", "--format", "json,csv,html",
        ])
        assert code == 0
        summary = json.loads((out / "summary.json").read_text())
        assert set(summary["methods"]) == {"marg", "zero", "unk"}
        for entry in summary["methods"].values():
            assert {"auc_rep", "iot", "neutral_mean"} <= set(entry)
        assert (out / "curves/marg/sentence_0000.csv").exists()
        assert (out / "curves/marg/sentence_0000.json").exists()
        assert (out / "comparisons/sentence_0000.html").exists()
        csv_head = (out / "curves/marg/sentence_0000.csv").read_text().splitlines()[0]
        assert csv_head == "fraction,probability"

    def test_iot_without_tags_exits_1(self, tmp_path, capsys):
        corpus = tmp_path / "untagged.jsonl"
        corpus.write_text(
            '{"tokens": [5, 6], "label": 1}\n{"tokens": [9], "label": 0}\n', encoding="utf-8"
        )
        code = main(["evaluate", *base_args(corpus, tmp_path / "o"), "--iot"])
        assert code == 1
        assert "tags required" in capsys.readouterr().err

    def test_byte_identical_reruns(self, tmp_path, small_corpus):
        out = tmp_path / "out"
        args = ["evaluate", *base_args(small_corpus, out), "--method", "marg", "--method", "zero"]
        assert main(args) == 0
        first = snapshot(out)
        wipe(out)
        assert main(args) == 0
        assert snapshot(out) == first


class TestAblate:
    def test_sigma_grid_csv(self, tmp_path, small_corpus):
        out = tmp_path / "out"
        code = main([
            "ablate", *base_args(small_corpus, out),
            "--sigma-grid", "0,0.02,0.05",
        ])
        assert code == 0
        lines = (out / "ablation.csv").read_text().splitlines()
        assert lines[0] == "rule,pearson,avg_candidates"
        assert len(lines) == 4
        assert lines[1].startswith("sigma=0,1.0,")

    def test_vocab_over_cap_exits_1(self, tmp_path, small_corpus, capsys):
        code = main([
            "ablate", *base_args(small_corpus, tmp_path / "o"),
            "--sigma-grid", "0", "--vocab-cap", "10",
        ])
        assert code == 1
        assert "full marginalization infeasible" in capsys.readouterr().err

    def test_empty_grid_exits_1(self, tmp_path, small_corpus, capsys):
        code = main(["ablate", *base_args(small_corpus, tmp_path / "o")])
        assert code == 1
        assert "grid is empty" in capsys.readouterr().err
