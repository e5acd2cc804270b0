"""Self-contained SVG rendering of precision and success plots.

Hand-rolled SVG keeps the output byte-deterministic: no timestamps, no
generated ids, fixed float formatting.
"""

from __future__ import annotations

from typing import Sequence

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

_PANEL_W = 360.0
_PANEL_H = 260.0
_MARGIN_L = 52.0
_MARGIN_T = 40.0
_GAP = 80.0


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _panel(
    x_off: float,
    title: str,
    x_label: str,
    x_max: float,
    x_ticks: Sequence[float],
    series: Sequence[tuple[str, Sequence[tuple[float, float]]]],
) -> list[str]:
    out = []
    px0, py0 = x_off + _MARGIN_L, _MARGIN_T
    px1, py1 = px0 + _PANEL_W, py0 + _PANEL_H

    def sx(v: float) -> float:
        return px0 + (v / x_max) * _PANEL_W

    def sy(v: float) -> float:
        return py1 - v * _PANEL_H

    out.append(f'<text x="{_fmt(px0 + _PANEL_W / 2)}" y="{_fmt(py0 - 16)}" text-anchor="middle" class="title">{title}</text>')
    for tick in x_ticks:
        x = sx(tick)
        out.append(f'<line x1="{_fmt(x)}" y1="{_fmt(py0)}" x2="{_fmt(x)}" y2="{_fmt(py1)}" class="grid"/>')
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(py1 + 16)}" text-anchor="middle" class="tick">{tick:g}</text>')
    for frac in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        y = sy(frac)
        out.append(f'<line x1="{_fmt(px0)}" y1="{_fmt(y)}" x2="{_fmt(px1)}" y2="{_fmt(y)}" class="grid"/>')
        out.append(f'<text x="{_fmt(px0 - 6)}" y="{_fmt(y + 4)}" text-anchor="end" class="tick">{frac:g}</text>')
    out.append(f'<rect x="{_fmt(px0)}" y="{_fmt(py0)}" width="{_fmt(_PANEL_W)}" height="{_fmt(_PANEL_H)}" class="frame"/>')
    out.append(f'<text x="{_fmt(px0 + _PANEL_W / 2)}" y="{_fmt(py1 + 34)}" text-anchor="middle" class="label">{x_label}</text>')

    for idx, (label, curve) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{_fmt(sx(t))},{_fmt(sy(v))}" for t, v in curve)
        out.append(f'<polyline points="{points}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        ly = py1 + 52 + 16 * idx
        out.append(f'<line x1="{_fmt(px0)}" y1="{_fmt(ly - 4)}" x2="{_fmt(px0 + 22)}" y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="1.8"/>')
        out.append(f'<text x="{_fmt(px0 + 28)}" y="{_fmt(ly)}" class="legend">{label}</text>')
    return out


def render_metrics_svg(series: Sequence[tuple[str, dict[str, list[tuple[float, float]]]]]) -> str:
    """One figure with a precision panel and a success panel.

    ``series`` pairs a legend label with the curves mapping produced by
    ``evaluate.read_curves_csv``.
    """
    if not series:
        raise ValueError("no metrics to plot")
    height = _MARGIN_T + _PANEL_H + 60 + 16 * len(series) + 20
    width = 2 * (_MARGIN_L + _PANEL_W) + _GAP
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        "<style>"
        "text{font-family:Helvetica,Arial,sans-serif;fill:#222}"
        ".title{font-size:14px;font-weight:bold}"
        ".label{font-size:12px}"
        ".tick{font-size:10px}"
        ".legend{font-size:11px}"
        ".grid{stroke:#ddd;stroke-width:0.6}"
        ".frame{fill:none;stroke:#444;stroke-width:1}"
        "</style>",
        f'<rect x="0" y="0" width="{width:g}" height="{height:g}" fill="white"/>',
    ]
    precision_series = [(label, curves["precision"]) for label, curves in series]
    success_series = [(label, curves["success"]) for label, curves in series]
    parts.extend(
        _panel(0.0, "Precision plot", "Center error threshold (px)", 50.0, (0, 10, 20, 30, 40, 50), precision_series)
    )
    parts.extend(
        _panel(
            _MARGIN_L + _PANEL_W + _GAP,
            "Success plot",
            "Overlap threshold",
            1.0,
            (0, 0.2, 0.4, 0.6, 0.8, 1.0),
            success_series,
        )
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
