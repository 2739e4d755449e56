"""Minimal SVG writers for the ROC overview and the attribution summary.

Only the standard library is used; the output is plain SVG 1.1 text.
"""
from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .evaluation import MeanRoc
from .explain import RankedFeature

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#ad494a")

WIDTH, HEIGHT = 800, 600


def auc_label(curve: MeanRoc) -> str:
    return f"AUC = {curve.auc_mean:.2f} ± {curve.auc_std:.2f}"


def legend_order(curves: Sequence[MeanRoc]) -> list[MeanRoc]:
    """Descending mean AUC; equal AUCs keep input order."""
    return sorted(curves, key=lambda c: -c.auc_mean)


def _path(xs, ys) -> str:
    return " ".join(f"{'M' if i == 0 else 'L'}{x:.2f},{y:.2f}" for i, (x, y) in enumerate(zip(xs, ys)))


def emit_roc_svg(curves: Sequence[MeanRoc], title: str = "ROC curves") -> str:
    """Mean ROC line and a shaded +-1 std band per model, plus the chance diagonal."""
    if not curves:
        raise ValueError("need at least one ROC curve")
    left, top, size_x, size_y = 70, 40, 440, 480

    def px(f):
        return left + size_x * np.asarray(f)

    def py(t):
        return top + size_y * (1.0 - np.asarray(t))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{left + size_x / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<rect x="{left}" y="{top}" width="{size_x}" height="{size_y}" fill="none" stroke="black"/>']
    for v in np.linspace(0, 1, 6):
        out.append(f'<line x1="{px(v):.2f}" y1="{top + size_y}" x2="{px(v):.2f}" y2="{top + size_y + 5}" stroke="black"/>')
        out.append(f'<text x="{px(v):.2f}" y="{top + size_y + 18}" text-anchor="middle">{v:.1f}</text>')
        out.append(f'<line x1="{left - 5}" y1="{py(v):.2f}" x2="{left}" y2="{py(v):.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py(v) + 4:.2f}" text-anchor="end">{v:.1f}</text>')
    out.append(f'<text x="{left + size_x / 2}" y="{top + size_y + 38}" text-anchor="middle">False positive rate</text>')
    out.append(f'<text x="20" y="{top + size_y / 2}" text-anchor="middle" '
               f'transform="rotate(-90 20 {top + size_y / 2})">True positive rate</text>')
    out.append(f'<line class="chance" x1="{px(0):.2f}" y1="{py(0):.2f}" x2="{px(1):.2f}" y2="{py(1):.2f}" '
               f'stroke="#888888" stroke-dasharray="6,4"/>')
    ordered = legend_order(curves)
    for i, c in enumerate(ordered):
        colour = PALETTE[i % len(PALETTE)]
        upper = np.clip(c.mean_tpr + c.std_tpr, 0, 1)
        lower = np.clip(c.mean_tpr - c.std_tpr, 0, 1)
        band = _path(np.r_[px(c.grid), px(c.grid[::-1])], np.r_[py(upper), py(lower[::-1])]) + " Z"
        out.append(f'<path class="band" d="{band}" fill="{colour}" fill-opacity="0.15" stroke="none"/>')
        out.append(f'<path class="mean" d="{_path(px(c.grid), py(c.mean_tpr))}" fill="none" '
                   f'stroke="{colour}" stroke-width="1.8"><title>{escape(c.name)}</title></path>')
    lx, ly = left + size_x + 25, top + 10
    for i, c in enumerate(ordered):
        colour = PALETTE[i % len(PALETTE)]
        y = ly + 22 * i
        out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 22}" y2="{y}" stroke="{colour}" stroke-width="3"/>')
        out.append(f'<text class="legend" x="{lx + 28}" y="{y + 4}">{escape(c.name)} ({escape(auc_label(c))})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _heat(u: float) -> str:
    """Blue (low) to red (high) for ``u`` in [0, 1]."""
    u = float(min(1.0, max(0.0, u)))
    return f"#{int(round(255 * u)):02x}30{int(round(255 * (1 - u))):02x}"


def emit_summary_svg(rankings: Mapping[str, Sequence[RankedFeature]]) -> str:
    """One panel per model: features top to bottom, a dot per instance at its attribution.

    Dot colour is the instance's count of that word, scaled per feature to
    [0, 1] (blue low, red high).
    """
    if not rankings:
        raise ValueError("need at least one model ranking")
    n = len(rankings)
    panel_w = WIDTH / n
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    for p, (model, ranking) in enumerate(rankings.items()):
        x0 = p * panel_w
        label_w = 70
        plot_l, plot_r = x0 + label_w + 5, x0 + panel_w - 15
        top, bottom = 50, HEIGHT - 60
        out.append(f'<text x="{x0 + panel_w / 2:.1f}" y="24" text-anchor="middle" font-size="14">{escape(model)}</text>')
        if not ranking:
            out.append(f'<text x="{x0 + panel_w / 2:.1f}" y="{HEIGHT / 2}" text-anchor="middle">no attributions</text>')
            continue
        span = max(max(abs(a) for f in ranking for a, _ in f.points), 1e-12)

        def ax(a):
            return plot_l + (plot_r - plot_l) * (0.5 + 0.5 * a / span)

        out.append(f'<line x1="{ax(0):.2f}" y1="{top - 5}" x2="{ax(0):.2f}" y2="{bottom}" stroke="#999999"/>')
        row_h = (bottom - top) / max(len(ranking), 1)
        for r, feat in enumerate(ranking):
            y = top + row_h * (r + 0.5)
            out.append(f'<text x="{x0 + label_w:.1f}" y="{y + 4:.1f}" text-anchor="end">{escape(feat.feature)}</text>')
            counts = np.array([v for _, v in feat.points], dtype=float)
            lo, hi = counts.min(), counts.max()
            for a, v in feat.points:
                u = 0.0 if hi == lo else (v - lo) / (hi - lo)
                out.append(f'<circle cx="{ax(a):.2f}" cy="{y:.2f}" r="3" fill="{_heat(u)}" fill-opacity="0.8"/>')
        out.append(f'<text x="{(plot_l + plot_r) / 2:.1f}" y="{bottom + 25}" text-anchor="middle">attribution</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
