"""Minimal deterministic SVG output.

Hand-rolled on purpose: figures must be byte-identical across runs with the
same config, so no timestamps, no library-version metadata, fixed float
formatting and a fixed style sheet.
"""

from __future__ import annotations

import math

import numpy as np

STYLE = ("fill:none;stroke:#1f4e79;stroke-width:1.2;"
         "stroke-linejoin:round;stroke-linecap:round")
FILL = "#1f4e79"
ACCENT = "#b2451e"


def _f(x: float) -> str:
    return format(float(x), ".4f").rstrip("0").rstrip(".")


class Canvas:
    """Accumulates SVG elements in a fixed pixel viewport."""

    def __init__(self, width: int = 640, height: int = 640):
        self.width = width
        self.height = height
        self.elements: list[str] = []

    def circle(self, cx, cy, r, fill=FILL, opacity=1.0):
        self.elements.append(
            f'<circle cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(r)}" '
            f'fill="{fill}" fill-opacity="{_f(opacity)}"/>')

    def rect(self, x, y, w, h, fill=FILL):
        self.elements.append(
            f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" '
            f'height="{_f(h)}" fill="{fill}"/>')

    def polyline(self, xs, ys, stroke=None):
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(xs, ys))
        style = STYLE if stroke is None else STYLE.replace("#1f4e79", stroke)
        self.elements.append(f'<polyline points="{pts}" style="{style}"/>')

    def line(self, x1, y1, x2, y2, stroke="#888888"):
        self.elements.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="0.8"/>')

    def text(self, x, y, s, size=12):
        self.elements.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="monospace" '
            f'font-size="{size}" fill="#333333">{s}</text>')

    def to_string(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        body = "\n".join(self.elements)
        return head + "\n" + body + "\n</svg>\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_string())


class Frame:
    """Affine data-to-pixel map for a rectangular data window."""

    def __init__(self, canvas: Canvas, x_range, y_range, margin: int = 40):
        self.c = canvas
        self.x0, self.x1 = map(float, x_range)
        self.y0, self.y1 = map(float, y_range)
        self.m = margin
        self.w = canvas.width - 2 * margin
        self.h = canvas.height - 2 * margin

    def px(self, x):
        return self.m + (np.asarray(x, float) - self.x0) / (self.x1 - self.x0) * self.w

    def py(self, y):
        # SVG y grows downward
        return self.m + (self.y1 - np.asarray(y, float)) / (self.y1 - self.y0) * self.h

    def axes(self, xlabel: str = "", ylabel: str = ""):
        self.c.line(self.m, self.m, self.m, self.m + self.h)
        self.c.line(self.m, self.m + self.h, self.m + self.w, self.m + self.h)
        if xlabel:
            self.c.text(self.m + self.w / 2 - 4 * len(xlabel),
                        self.m + self.h + 28, xlabel)
        if ylabel:
            self.c.text(4, self.m - 10, ylabel)
        self.c.text(self.m - 6, self.m + self.h + 16, _f(self.x0))
        self.c.text(self.m + self.w - 10, self.m + self.h + 16, _f(self.x1))
        self.c.text(self.m - 36, self.m + self.h, _f(self.y0))
        self.c.text(self.m - 36, self.m + 8, _f(self.y1))


def corona_portrait(theta, phi, r, path, radius_scale: float = 3.0,
                    max_points: int = 1000) -> None:
    """Scatter of corona atoms in the angle square; each atom drawn as a
    disk whose pixel radius scales linearly with 1/r (a visibility device
    only — the scaling constant is a plot parameter, not a model
    quantity)."""
    c = Canvas()
    f = Frame(c, (-math.pi, math.pi), (-math.pi, math.pi))
    f.axes("theta", "phi")
    n = min(len(r), max_points)
    rr = np.asarray(r, float)[:n]
    pr = radius_scale * rr[0] / rr          # linear in 1/r, first atom largest
    for i in range(n):
        c.circle(float(f.px(theta[i])), float(f.py(phi[i])),
                 max(float(pr[i]), 0.4), opacity=0.55)
    c.write(path)


def coverage_curve(fractions, path) -> None:
    fr = np.asarray(fractions, float)
    c = Canvas()
    f = Frame(c, (0, max(fr.size, 1)), (0.0, 1.0))
    f.axes("events", "covered fraction")
    idx = np.arange(1, fr.size + 1)
    c.polyline(f.px(idx), f.py(fr))
    c.write(path)


def field_atom_tracks(xs, tracks, path) -> None:
    """Per-atom separation values against x = -log eps: one polyline per
    tracked atom (rows of `tracks`, NaN = atom absent at that eps)."""
    xs = np.asarray(xs, float)
    tracks = np.asarray(tracks, float)
    top = np.nanmax(tracks) if np.isfinite(tracks).any() else 1.0
    c = Canvas()
    f = Frame(c, (xs.min(), xs.max()), (0.0, float(top) * 1.05))
    f.axes("-log eps", "separation value")
    palette = [FILL, ACCENT, "#3d7a3d", "#7a3d7a", "#7a6a1e"]
    for k, row in enumerate(tracks):
        ok = np.isfinite(row)
        if ok.sum() >= 2:
            c.polyline(f.px(xs[ok]), f.py(row[ok]), palette[k % len(palette)])
    c.write(path)


def mask_figure(mask, L: float, path) -> None:
    """Boolean n x n mask over [-L, L]^2 as row-run rectangles
    (mask[i, j] covers the cell at x-index i, y-index j)."""
    mask = np.asarray(mask, bool)
    n = mask.shape[0]
    c = Canvas()
    f = Frame(c, (-L, L), (-L, L))
    f.axes()
    step_px = f.w / n
    for j in range(n):
        row = mask[:, j]
        d = np.diff(np.concatenate(([0], row.view(np.int8), [0])))
        starts = np.nonzero(d == 1)[0]
        ends = np.nonzero(d == -1)[0]
        y_px = float(f.py(-L + (j + 1) * 2.0 * L / n))
        for a, b in zip(starts, ends):
            x_px = float(f.px(-L + a * 2.0 * L / n))
            c.rect(x_px, y_px, (b - a) * step_px, step_px)
    c.write(path)


def crosses_portrait(x, y, k, L: float, path, rows: int = 256) -> None:
    """Filled union of crosses |u-x||v-y| <= sqrt(k) over [-L, L]^2,
    rendered by scanlines (per row, each cross contributes one interval)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    sk = np.sqrt(np.asarray(k, float))
    c = Canvas()
    f = Frame(c, (-L, L), (-L, L))
    f.axes()
    step = 2.0 * L / rows
    step_px = f.h / rows
    grid = np.linspace(-L + step / 2, L - step / 2, rows)
    for j, v in enumerate(grid):
        gap = np.abs(v - y)
        half = np.where(gap > 0, sk / np.maximum(gap, 1e-300), np.inf)
        lo = np.clip(x - half, -L, L)
        hi = np.clip(x + half, -L, L)
        keep = hi > lo
        lo, hi = lo[keep], hi[keep]
        order = np.argsort(lo)
        lo, hi = lo[order], hi[order]
        y_px = float(f.py(v + step / 2))
        # merge overlapping intervals before drawing
        i = 0
        while i < lo.size:
            a, b = lo[i], hi[i]
            i += 1
            while i < lo.size and lo[i] <= b:
                b = max(b, hi[i])
                i += 1
            c.rect(float(f.px(a)), y_px, float(f.px(b) - f.px(a)), step_px)
    c.write(path)
