"""Minimal SVG line plots and heatmaps for quick looks at CSV outputs.

Heatmaps are embedded as a base64 PNG so large maps stay small.
"""

from __future__ import annotations

import base64
import struct
import zlib
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 720, 440
MARGIN = dict(left=80, right=20, top=36, bottom=56)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f")
# dark blue -> teal -> yellow
RAMP = np.array([[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]], dtype=float)


def _num(x: float) -> str:
    return f"{x:.6g}"


def _ticks(lo, hi, n=5):
    if not np.isfinite(lo) or not np.isfinite(hi) or hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


def _frame(title, xlabel, ylabel, xr, yr):
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    out = [f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" fill="none" stroke="black"/>',
           f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
           f'<text x="18" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" '
           f'transform="rotate(-90 18 {HEIGHT / 2})">{escape(ylabel)}</text>']
    for t in _ticks(*xr):
        px = x0 + (t - xr[0]) / ((xr[1] - xr[0]) or 1) * (x1 - x0)
        out.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{y0 + 18}" text-anchor="middle" font-size="11">{_num(t)}</text>')
    for t in _ticks(*yr):
        py = y0 - (t - yr[0]) / ((yr[1] - yr[0]) or 1) * (y0 - y1)
        out.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{py + 4:.2f}" text-anchor="end" font-size="11">{_num(t)}</text>')
    return out


def _doc(body):
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">\n'
            + "\n".join(body) + "\n</svg>\n")


def line_plot(series, title="", xlabel="", ylabel="") -> str:
    """``series`` is a list of ``(x, y, label)``; NaN points break the line."""
    xs = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ok = np.isfinite(xs) & np.isfinite(ys)
    xr = (xs[ok].min(), xs[ok].max()) if ok.any() else (0.0, 1.0)
    yr = (ys[ok].min(), ys[ok].max()) if ok.any() else (0.0, 1.0)
    body = _frame(title, xlabel, ylabel, xr, yr)
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    for k, (x, y, label) in enumerate(series):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        px = x0 + (x - xr[0]) / ((xr[1] - xr[0]) or 1) * (x1 - x0)
        py = y0 - (y - yr[0]) / ((yr[1] - yr[0]) or 1) * (y0 - y1)
        color = COLORS[k % len(COLORS)]
        segs, cur = [], []
        for a, b, good in zip(px, py, np.isfinite(px) & np.isfinite(py)):
            if good:
                cur.append(f"{a:.2f},{b:.2f}")
            elif cur:
                segs.append(cur)
                cur = []
        if cur:
            segs.append(cur)
        for seg in segs:
            body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{" ".join(seg)}"/>')
        if label:
            body.append(f'<text x="{x1 - 6}" y="{y1 + 16 + 14 * k}" text-anchor="end" font-size="11" '
                        f'fill="{color}">{escape(str(label))}</text>')
    return _doc(body)


def _colorize(z):
    z = np.asarray(z, dtype=float)
    ok = np.isfinite(z)
    lo, hi = (z[ok].min(), z[ok].max()) if ok.any() else (0.0, 1.0)
    t = np.clip((z - lo) / ((hi - lo) or 1), 0, 1)
    t = np.where(ok, t, 0)
    pos = t * (len(RAMP) - 1)
    i = np.minimum(pos.astype(int), len(RAMP) - 2)
    w = (pos - i)[..., None]
    return np.rint(RAMP[i] * (1 - w) + RAMP[i + 1] * w).astype(np.uint8)


def png_bytes(rgb: np.ndarray) -> bytes:
    """Encode an ``(h, w, 3)`` uint8 array as PNG."""
    h, w, _ = rgb.shape
    raw = b"".join(b"\x00" + rgb[r].tobytes() for r in range(h))

    def chunk(tag, data):
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    return (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0))
            + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b""))


def heatmap(x, y, z, title="", xlabel="", ylabel="") -> str:
    """``z[i, j]`` at ``(x[j], y[i])``; ``y`` increases upward."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    body = _frame(title, xlabel, ylabel, (x.min(), x.max()), (y.min(), y.max()))
    img = _colorize(np.asarray(z)[::-1])
    data = base64.b64encode(png_bytes(img)).decode("ascii")
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    body.insert(0, f'<image x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" preserveAspectRatio="none" '
                   f'style="image-rendering:pixelated" href="data:image/png;base64,{data}"/>')
    return _doc(body)
