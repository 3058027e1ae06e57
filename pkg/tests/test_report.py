"""Heatmap rendering: determinism, color mapping, comparison stacking."""

import re

import pytest

from margattr import AttributionMap, ConfigError, render_comparison, render_heatmap


def attr_map(scores, method="marginalization", target_class=1):
    return AttributionMap(scores=tuple(scores), target_class=target_class, method=method)


ALPHA_RE = re.compile(r"rgba\(\d+,\d+,\d+,([0-9.]+)\)")


class TestHeatmap:
    def test_zero_scores_render_neutral(self):
        html = render_heatmap(attr_map([0.0, 0.0, 0.0]), ["a", "b", "c"], "html").decode()
        assert all(float(a) == 0.0 for a in ALPHA_RE.findall(html))
        ansi = render_heatmap(attr_map([0.0, 0.0]), ["a", "b"], "ansi").decode()
        assert "\x1b[48;5;" not in ansi  # no backgrounds at zero intensity

    def test_opposite_scores_equal_intensity_opposite_hue(self):
        html = render_heatmap(attr_map([2.0, -2.0]), ["up", "down"], "html").decode()
        assert "rgba(178,24,43,1.0000)" in html  # red at +max
        assert "rgba(33,102,172,1.0000)" in html  # blue at -max

    def test_byte_identical_across_runs(self):
        args = (attr_map([1.0, -0.4, 0.2]), ["x", "y", "z"])
        assert render_heatmap(*args, "html") == render_heatmap(*args, "html")
        assert render_heatmap(*args, "ansi") == render_heatmap(*args, "ansi")

    def test_intensity_rank_follows_score_magnitude(self):
        scores = [0.1, -3.0, 1.5, -0.7, 2.2]
        html = render_heatmap(attr_map(scores), list("abcde"), "html").decode()
        alphas = [float(a) for a in ALPHA_RE.findall(html)]
        assert len(alphas) == len(scores)
        magnitude_order = sorted(range(len(scores)), key=lambda i: abs(scores[i]))
        alpha_order = sorted(range(len(alphas)), key=lambda i: alphas[i])
        assert magnitude_order == alpha_order

    def test_metadata_embedded(self):
        html = render_heatmap(attr_map([1.0], method="zero_erasure", target_class=0), ["tok"]).decode()
        assert 'data-method="zero_erasure"' in html
        assert 'data-target-class="0"' in html
        ansi = render_heatmap(attr_map([1.0], method="zero_erasure", target_class=0), ["tok"], "ansi").decode()
        assert "method=zero_erasure" in ansi and "target_class=0" in ansi

    def test_ansi_uses_256_color_codes_only(self):
        ansi = render_heatmap(attr_map([1.0, -1.0, 0.3]), ["a", "b", "c"], "ansi").decode()
        for code in re.findall(r"\x1b\[([0-9;]+)m", ansi):
            assert code == "0" or code.startswith("48;5;") or code.startswith("38;5;")

    def test_token_count_must_match(self):
        with pytest.raises(ConfigError, match="align"):
            render_heatmap(attr_map([1.0, 2.0]), ["only"], "html")

    def test_unknown_format(self):
        with pytest.raises(ConfigError, match="format"):
            render_heatmap(attr_map([1.0]), ["a"], "pdf")

    def test_html_escapes_tokens(self):
        html = render_heatmap(attr_map([1.0]), ["<script>"], "html").decode()
        assert "<script>" not in html
        assert "&lt;script&gt;" in html


class TestComparison:
    def test_identical_maps_identical_rows(self):
        m = attr_map([1.0, -1.0])
        html = render_comparison([m, m], ["a", "b"], "html").decode()
        rows = re.findall(r'<div class="heatmap-row".*?</div>', html)
        assert len(rows) == 2
        assert rows[0] == rows[1]

    def test_rows_labeled_by_method(self):
        maps = [attr_map([1.0], method="marginalization"), attr_map([0.5], method="zero_erasure")]
        ansi = render_comparison(maps, ["tok"], "ansi").decode()
        assert "marginalization" in ansi and "zero_erasure" in ansi

    def test_mismatched_lengths_rejected(self):
        maps = [attr_map([1.0, 2.0]), attr_map([1.0])]
        with pytest.raises(ConfigError, match="align"):
            render_comparison(maps, ["a", "b"])

    def test_empty_method_list_rejected(self):
        with pytest.raises(ConfigError, match="nothing to render"):
            render_comparison([], ["a"])
