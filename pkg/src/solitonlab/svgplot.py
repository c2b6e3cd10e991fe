"""Minimal deterministic SVG line plots (no plotting dependency).

Output is a plain SVG document with axes, tick labels, and one polyline
per curve.  Numbers are formatted with repr-style shortest round-trip
formatting, so a given input always produces byte-identical output.
"""

from __future__ import annotations

import math

_WIDTH = 640.0
_HEIGHT = 420.0
_MARGIN_L = 64.0
_MARGIN_R = 16.0
_MARGIN_T = 24.0
_MARGIN_B = 44.0

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-12 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def line_plot(curves, title: str = "", x_label: str = "", y_label: str = "") -> str:
    """Render curves = [(label, xs, ys), ...] to an SVG string."""
    xs_all = [float(x) for _, xs, _ in curves for x in xs]
    ys_all = [float(y) for _, _, ys in curves for y in ys if math.isfinite(y)]
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        pad = 1.0 if y_lo == 0.0 else abs(y_lo) * 0.1
        y_lo, y_hi = y_lo - pad, y_hi + pad
    else:
        pad = 0.05 * (y_hi - y_lo)
        y_lo, y_hi = y_lo - pad, y_hi + pad

    inner_w = _WIDTH - _MARGIN_L - _MARGIN_R
    inner_h = _HEIGHT - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * inner_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * inner_h

    parts = []
    parts.append('<?xml version="1.0" encoding="UTF-8"?>')
    parts.append(
        '<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
        'viewBox="0 0 %d %d">' % (_WIDTH, _HEIGHT, _WIDTH, _HEIGHT))
    parts.append('<rect width="%d" height="%d" fill="white"/>' % (_WIDTH, _HEIGHT))
    parts.append(
        '<rect x="%s" y="%s" width="%s" height="%s" fill="none" '
        'stroke="#444444" stroke-width="1"/>'
        % (_fmt(_MARGIN_L), _fmt(_MARGIN_T), _fmt(inner_w), _fmt(inner_h)))

    for tx in _ticks(x_lo, x_hi):
        X = px(tx)
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#444444"/>'
                     % (_fmt(X), _fmt(_HEIGHT - _MARGIN_B),
                        _fmt(X), _fmt(_HEIGHT - _MARGIN_B + 5)))
        parts.append(
            '<text x="%s" y="%s" font-size="11" text-anchor="middle" '
            'font-family="monospace">%s</text>'
            % (_fmt(X), _fmt(_HEIGHT - _MARGIN_B + 18), _fmt(tx)))
    for ty in _ticks(y_lo, y_hi):
        Y = py(ty)
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#444444"/>'
                     % (_fmt(_MARGIN_L - 5), _fmt(Y), _fmt(_MARGIN_L), _fmt(Y)))
        parts.append(
            '<text x="%s" y="%s" font-size="11" text-anchor="end" '
            'font-family="monospace">%s</text>'
            % (_fmt(_MARGIN_L - 8), _fmt(Y + 4), _fmt(ty)))

    for k, (label, xs, ys) in enumerate(curves):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(
            "%s,%s" % (_fmt(px(float(x))), _fmt(py(float(y))))
            for x, y in zip(xs, ys) if math.isfinite(float(y)))
        parts.append('<polyline fill="none" stroke="%s" stroke-width="1.5" '
                     'points="%s"/>' % (color, pts))
        if label:
            ly = _MARGIN_T + 16 + 16 * k
            parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="%s" '
                         'stroke-width="2"/>'
                         % (_fmt(_MARGIN_L + 10), _fmt(ly - 4),
                            _fmt(_MARGIN_L + 34), _fmt(ly - 4), color))
            parts.append('<text x="%s" y="%s" font-size="12" '
                         'font-family="monospace">%s</text>'
                         % (_fmt(_MARGIN_L + 40), _fmt(ly), label))

    if title:
        parts.append('<text x="%s" y="16" font-size="13" text-anchor="middle" '
                     'font-family="monospace">%s</text>'
                     % (_fmt(_WIDTH / 2), title))
    if x_label:
        parts.append('<text x="%s" y="%s" font-size="12" text-anchor="middle" '
                     'font-family="monospace">%s</text>'
                     % (_fmt(_MARGIN_L + inner_w / 2), _fmt(_HEIGHT - 8), x_label))
    if y_label:
        parts.append('<text x="14" y="%s" font-size="12" text-anchor="middle" '
                     'font-family="monospace" transform="rotate(-90 14 %s)">%s</text>'
                     % (_fmt(_MARGIN_T + inner_h / 2),
                        _fmt(_MARGIN_T + inner_h / 2), y_label))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
