"""Static SVG figures: tick rows, interval bars, log-scale decay plots.

Every figure is an 800x240 standalone SVG string built with fixed
decimal formatting, so identical inputs give byte-identical output.
No external assets, no styling beyond inline attributes.
"""

from __future__ import annotations

import math

from .errors import ConfigError

__all__ = ["tick_rows_svg", "interval_bars_svg", "decay_plot_svg"]

WIDTH = 800
HEIGHT = 240
_MARGIN_L = 60
_MARGIN_R = 20
_MARGIN_T = 34
_MARGIN_B = 28


def _f(v: float) -> str:
    return f"{v:.3f}"


def _header(title: str):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="13">{_escape(title)}</text>',
    ]
    return parts


def _escape(s: str) -> str:
    return (
        s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
    )


def _x_scale(lo: float, hi: float):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    lo -= 0.02 * span
    hi += 0.02 * span

    def to_x(v):
        return _MARGIN_L + (v - lo) / (hi - lo) * (WIDTH - _MARGIN_L - _MARGIN_R)

    return to_x, lo, hi


def tick_rows_svg(rows, title="point sets") -> str:
    """Rows of vertical ticks; ``rows`` is [(label, [x, ...]), ...]."""
    if not rows:
        raise ConfigError("no rows to draw")
    all_x = [x for _, xs in rows for x in xs]
    if not all_x:
        raise ConfigError("no points to draw")
    to_x, lo, hi = _x_scale(min(all_x), max(all_x))
    parts = _header(title)
    usable = HEIGHT - _MARGIN_T - _MARGIN_B
    step = usable / len(rows)
    for i, (label, xs) in enumerate(rows):
        yc = _MARGIN_T + step * (i + 0.5)
        parts.append(
            f'<text x="6" y="{_f(yc + 4)}" font-family="monospace" '
            f'font-size="11">{_escape(str(label))}</text>'
        )
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{_f(yc)}" x2="{WIDTH - _MARGIN_R}" '
            f'y2="{_f(yc)}" stroke="#cccccc" stroke-width="0.5"/>'
        )
        h = min(14.0, step * 0.7)
        for x in xs:
            px = to_x(x)
            parts.append(
                f'<line x1="{_f(px)}" y1="{_f(yc - h / 2)}" x2="{_f(px)}" '
                f'y2="{_f(yc + h / 2)}" stroke="black" stroke-width="1"/>'
            )
    parts.append(
        f'<text x="{_MARGIN_L}" y="{HEIGHT - 8}" font-family="monospace" '
        f'font-size="10">[{_f(lo)}, {_f(hi)}]</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def interval_bars_svg(bars, ticks=None, title="interval regions") -> str:
    """Horizontal bar rows for interval unions, optional tick overlays.

    ``bars`` is [(label, [(lo, hi), ...]), ...]; ``ticks`` optionally
    adds [(label, [x, ...]), ...] rows drawn below the bars.
    """
    if not bars:
        raise ConfigError("no bars to draw")
    ticks = ticks or []
    all_x = [v for _, cells in bars for c in cells for v in c]
    all_x += [x for _, xs in ticks for x in xs]
    if not all_x:
        raise ConfigError("nothing to draw")
    to_x, lo, hi = _x_scale(min(all_x), max(all_x))
    parts = _header(title)
    rows = len(bars) + len(ticks)
    usable = HEIGHT - _MARGIN_T - _MARGIN_B
    step = usable / rows
    for i, (label, cells) in enumerate(bars):
        yc = _MARGIN_T + step * (i + 0.5)
        bh = min(16.0, step * 0.6)
        parts.append(
            f'<text x="6" y="{_f(yc + 4)}" font-family="monospace" '
            f'font-size="11">{_escape(str(label))}</text>'
        )
        shade = "#4477aa" if i else "#999999"
        for clo, chi in cells:
            parts.append(
                f'<rect x="{_f(to_x(clo))}" y="{_f(yc - bh / 2)}" '
                f'width="{_f(max(to_x(chi) - to_x(clo), 0.75))}" '
                f'height="{_f(bh)}" fill="{shade}" fill-opacity="0.75"/>'
            )
    for j, (label, xs) in enumerate(ticks):
        yc = _MARGIN_T + step * (len(bars) + j + 0.5)
        parts.append(
            f'<text x="6" y="{_f(yc + 4)}" font-family="monospace" '
            f'font-size="11">{_escape(str(label))}</text>'
        )
        for x in xs:
            px = to_x(x)
            parts.append(
                f'<line x1="{_f(px)}" y1="{_f(yc - 6)}" x2="{_f(px)}" '
                f'y2="{_f(yc + 6)}" stroke="#aa3333" stroke-width="1"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def decay_plot_svg(xs, ys, title="gap decay", x_label="generation") -> str:
    """Log-scale polyline of positive values against the given x axis."""
    if len(xs) != len(ys) or not xs:
        raise ConfigError("need matching nonempty x and y lists")
    if any(y <= 0 for y in ys):
        raise ConfigError("log plot needs positive values")
    ly = [math.log10(y) for y in ys]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ly), max(ly)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    if y_hi == y_lo:
        y_hi = y_lo + 1
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def to_x(v):
        return _MARGIN_L + (v - x_lo) / (x_hi - x_lo) * (
            WIDTH - _MARGIN_L - _MARGIN_R
        )

    def to_y(v):
        return HEIGHT - _MARGIN_B - (v - y_lo) / (y_hi - y_lo) * (
            HEIGHT - _MARGIN_T - _MARGIN_B
        )

    parts = _header(title)
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{HEIGHT - _MARGIN_B}" '
        f'x2="{WIDTH - _MARGIN_R}" y2="{HEIGHT - _MARGIN_B}" '
        f'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{HEIGHT - _MARGIN_B}" stroke="black" stroke-width="1"/>'
    )
    # decade gridlines
    for e in range(math.ceil(y_lo), math.floor(y_hi) + 1):
        py = to_y(e)
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{_f(py)}" x2="{WIDTH - _MARGIN_R}" '
            f'y2="{_f(py)}" stroke="#dddddd" stroke-width="0.5"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 6}" y="{_f(py + 3)}" text-anchor="end" '
            f'font-family="monospace" font-size="10">1e{e}</text>'
        )
    pts = " ".join(f"{_f(to_x(x))},{_f(to_y(v))}" for x, v in zip(xs, ly))
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#4477aa" '
        f'stroke-width="1.5"/>'
    )
    for x, v in zip(xs, ly):
        parts.append(
            f'<circle cx="{_f(to_x(x))}" cy="{_f(to_y(v))}" r="2.5" '
            f'fill="#4477aa"/>'
        )
    parts.append(
        f'<text x="{WIDTH - _MARGIN_R}" y="{HEIGHT - 8}" text-anchor="end" '
        f'font-family="monospace" font-size="10">{_escape(x_label)}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
