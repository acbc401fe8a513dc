"""Small deterministic SVG line charts (no plotting dependency, no timestamps)."""
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#34495e")
WIDTH, HEIGHT = 640, 420
PAD_L, PAD_R, PAD_T, PAD_B = 64, 150, 40, 48


def _fmt(x):
    return f"{x:.2f}"


def _ticks(lo, hi, count=5):
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def line_chart(series, title="", xlabel="", ylabel="", equal_aspect=False, dashed=()):
    """Render ``[(label, xs, ys), ...]`` as one SVG document string.

    Labels listed in ``dashed`` are drawn with a dash pattern.
    """
    xs_all = np.concatenate([np.asarray(x, float) for _, x, _ in series])
    ys_all = np.concatenate([np.asarray(y, float) for _, _, y in series])
    x0, x1 = float(xs_all.min()), float(xs_all.max())
    y0, y1 = float(min(ys_all.min(), 0.0)), float(ys_all.max())
    if x1 <= x0:
        x1 = x0 + 1.0
    if y1 <= y0:
        y1 = y0 + 1.0
    y1 += 0.05 * (y1 - y0)
    pw, ph = WIDTH - PAD_L - PAD_R, HEIGHT - PAD_T - PAD_B
    sx, sy = pw / (x1 - x0), ph / (y1 - y0)
    if equal_aspect:
        sx = sy = min(sx, sy)

    def px(x):
        return PAD_L + (x - x0) * sx

    def py(y):
        return PAD_T + ph - (y - y0) * sy

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{PAD_L}" y1="{_fmt(py(y0))}" x2="{_fmt(px(x1))}" y2="{_fmt(py(y0))}" stroke="black"/>',
        f'<line x1="{PAD_L}" y1="{_fmt(py(y0))}" x2="{PAD_L}" y2="{_fmt(py(y1))}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        out.append(f'<text x="{_fmt(px(t))}" y="{_fmt(py(y0) + 16)}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{PAD_L - 6}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{_fmt(PAD_L + pw / 2)}" y="{HEIGHT - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{_fmt(PAD_T + ph / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_fmt(PAD_T + ph / 2)})">{escape(ylabel)}</text>'
    )
    for i, (label, xs, ys) in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        dash = ' stroke-dasharray="6 4"' if label in dashed else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.6"{dash} points="{pts}"/>')
        ly = PAD_T + 16 + 18 * i
        out.append(f'<line x1="{WIDTH - PAD_R + 12}" y1="{ly - 4}" x2="{WIDTH - PAD_R + 32}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{WIDTH - PAD_R + 38}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _thin(xs, ys, count=400):
    xs, ys = np.asarray(xs), np.asarray(ys)
    if len(xs) <= count:
        return xs, ys
    idx = np.unique(np.linspace(0, len(xs) - 1, count).round().astype(int))
    return xs[idx], ys[idx]


def torpedo_figure(profiles):
    """Outline of each torpedo as a surface of revolution (+f and -f against r)."""
    series = []
    for label, prof in profiles:
        x, y = _thin(prof.knots, prof.values)
        series.append((label, np.concatenate([x, x[::-1]]), np.concatenate([y, -y[::-1]])))
    return line_chart(series, "Torpedo warping functions", "r", "f(r)", equal_aspect=True)


def curve_figure(curves):
    """Bending curves in the (t, r) plane."""
    series = []
    for label, rows in curves:
        t = np.array([row[1] for row in rows])
        r = np.array([row[2] for row in rows])
        series.append((label, t, r))
    return line_chart(series, "Bending curves", "t", "r", equal_aspect=True)


def profile_figure(profiles, title="Warping functions", dashed=()):
    """Plain graphs of several profiles."""
    series = []
    for label, prof in profiles:
        series.append((label, *_thin(prof.knots, prof.values)))
    return line_chart(series, title, "r", "w(r)", dashed=dashed)
