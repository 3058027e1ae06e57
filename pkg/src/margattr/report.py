"""Signed-intensity heatmaps for attribution maps.

Positive scores render red, negative blue, with intensity proportional
to score magnitude normalized by the sentence's max absolute score.
Normalization is per sentence (and per map), so intensities are not
comparable across sentences; the scale is embedded in the output.
Rendering is a pure function of its inputs: identical inputs give
byte-identical documents.
"""

from __future__ import annotations

import html
from dataclasses import dataclass
from typing import Sequence

from .engine import AttributionMap
from .errors import ConfigError

_POSITIVE_RGB = (178, 24, 43)
_NEGATIVE_RGB = (33, 102, 172)
# 256-color backgrounds, weak to strong, for the 8-step terminal ramp
_ANSI_NEGATIVE = (153, 111, 69, 27)
_ANSI_POSITIVE = (217, 210, 203, 196)


@dataclass(frozen=True)
class HeatmapDoc:
    """Display-ready heatmap: tokens, scores, and the intensity scale."""

    tokens: tuple[str, ...]
    scores: tuple[float, ...]
    normalization: float
    target_class: int
    method: str

    @classmethod
    def from_map(cls, attr: AttributionMap, tokens: Sequence[str]) -> "HeatmapDoc":
        if len(tokens) != len(attr):
            raise ConfigError("tokens do not align with attribution scores")
        return cls(
            tokens=tuple(tokens),
            scores=attr.scores,
            normalization=max((abs(s) for s in attr.scores), default=0.0),
            target_class=attr.target_class,
            method=attr.method,
        )

    def intensity(self, position: int) -> float:
        """Signed intensity in [-1, 1]; 0 everywhere for an all-zero map."""
        if self.normalization == 0.0:
            return 0.0
        return self.scores[position] / self.normalization


def _html_span(token: str, score: float, intensity: float) -> str:
    rgb = _POSITIVE_RGB if intensity >= 0 else _NEGATIVE_RGB
    alpha = abs(intensity)
    style = f"background-color:rgba({rgb[0]},{rgb[1]},{rgb[2]},{alpha:.4f});padding:1px 2px;border-radius:2px"
    return f'<span style="{style}" title="{score:+.6g} bits">{html.escape(token)}</span>'


def _html_row(doc: HeatmapDoc, label: str | None = None) -> str:
    spans = " ".join(
        _html_span(tok, doc.scores[i], doc.intensity(i)) for i, tok in enumerate(doc.tokens)
    )
    caption = (
        f'<span class="label">{html.escape(label)}</span> ' if label is not None else ""
    )
    return (
        f'<div class="heatmap-row" data-method="{html.escape(doc.method)}" '
        f'data-target-class="{doc.target_class}" data-scale="{doc.normalization:.6g}">'
        f"{caption}{spans}</div>"
    )


def _html_document(body_rows: Sequence[str], title: str) -> bytes:
    rows = "\n".join(body_rows)
    doc = (
        "<!DOCTYPE html>\n"
        '<html lang="en"><head><meta charset="utf-8">\n'
        f"<title>{html.escape(title)}</title>\n"
        "<style>\n"
        "body{font-family:monospace;margin:1em}\n"
        ".heatmap-row{margin:4px 0;line-height:1.8}\n"
        ".label{display:inline-block;min-width:9em;font-weight:bold}\n"
        "</style></head><body>\n"
        "<p>color intensity = score / max |score| within each row; "
        "red positive, blue negative</p>\n"
        f"{rows}\n"
        "</body></html>\n"
    )
    return doc.encode("utf-8")


def _ansi_token(token: str, intensity: float) -> str:
    if intensity == 0.0:
        return token
    ramp = _ANSI_POSITIVE if intensity > 0 else _ANSI_NEGATIVE
    step = min(3, int(abs(intensity) * 4))
    return f"\x1b[48;5;{ramp[step]}m\x1b[38;5;0m{token}\x1b[0m"


def _ansi_row(doc: HeatmapDoc, label: str | None = None) -> str:
    prefix = f"{label:<16}" if label is not None else ""
    body = " ".join(_ansi_token(tok, doc.intensity(i)) for i, tok in enumerate(doc.tokens))
    return prefix + body


def render_heatmap(attr: AttributionMap, tokens: Sequence[str], fmt: str = "html") -> bytes:
    """Render one attribution map as a self-contained HTML document or an
    ANSI (256-color SGR) terminal line."""
    doc = HeatmapDoc.from_map(attr, tokens)
    if fmt == "html":
        return _html_document([_html_row(doc)], title=f"attribution: {doc.method}")
    if fmt == "ansi":
        header = (
            f"method={doc.method} target_class={doc.target_class} "
            f"scale={doc.normalization:.6g}\n"
        )
        return (header + _ansi_row(doc) + "\n").encode("utf-8")
    raise ConfigError(f"unknown render format {fmt!r}")


def render_comparison(maps: Sequence[AttributionMap], tokens: Sequence[str], fmt: str = "html") -> bytes:
    """Stack one heatmap row per method for the same sentence."""
    if not maps:
        raise ConfigError("nothing to render")
    docs = [HeatmapDoc.from_map(m, tokens) for m in maps]
    if fmt == "html":
        rows = [_html_row(doc, label=doc.method) for doc in docs]
        return _html_document(rows, title="attribution comparison")
    if fmt == "ansi":
        lines = [_ansi_row(doc, label=doc.method) for doc in docs]
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ConfigError(f"unknown render format {fmt!r}")
