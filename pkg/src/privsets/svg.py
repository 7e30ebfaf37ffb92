"""Self-contained SVG figures for designs, traces and distance studies.

Each data glyph carries a ``class`` attribute (``point``, ``hist-bar``,
``trace-line``, ``restart``, ``box``, ``criterion-dot``) so that output can be
inspected programmatically.
"""

from __future__ import annotations

import itertools
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f5fbf", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#16a085", "#7f8c8d"]


def _f(v: float) -> str:
    return f"{v:.2f}"


class Canvas:
    def __init__(self, width: float, height: float):
        self.width = width
        self.height = height
        self.items: List[str] = []

    def add(self, tag: str, cls: Optional[str] = None, **attrs):
        if cls:
            attrs["class"] = cls
        body = " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in attrs.items())
        self.items.append(f"<{tag} {body}/>")

    def text(self, x, y, s, size=11, anchor="middle", rotate=None):
        tr = f' transform="rotate({rotate} {_f(x)} {_f(y)})"' if rotate is not None else ""
        self.items.append(f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" '
                          f'text-anchor="{anchor}" font-family="sans-serif"{tr}>{escape(str(s))}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(self.width)}" '
                f'height="{_f(self.height)}" viewBox="0 0 {_f(self.width)} {_f(self.height)}">')
        bg = f'<rect x="0" y="0" width="{_f(self.width)}" height="{_f(self.height)}" fill="white"/>'
        return "\n".join([head, bg, *self.items, "</svg>"]) + "\n"


class Panel:
    """Axis-aligned plotting box mapping data coordinates to pixels."""

    def __init__(self, canvas, x, y, w, h, xlim, ylim):
        self.c, self.x, self.y, self.w, self.h = canvas, x, y, w, h
        self.xlim = xlim if xlim[1] > xlim[0] else (xlim[0] - 1, xlim[0] + 1)
        self.ylim = ylim if ylim[1] > ylim[0] else (ylim[0] - 1, ylim[0] + 1)

    def px(self, v):
        return self.x + (v - self.xlim[0]) / (self.xlim[1] - self.xlim[0]) * self.w

    def py(self, v):
        return self.y + self.h - (v - self.ylim[0]) / (self.ylim[1] - self.ylim[0]) * self.h

    def frame(self, xticks=None, yticks=None, xlabel=None, ylabel=None):
        self.c.add("rect", x=_f(self.x), y=_f(self.y), width=_f(self.w), height=_f(self.h),
                   fill="none", stroke="#333", stroke_width="1")
        for t in xticks if xticks is not None else []:
            self.c.add("line", x1=_f(self.px(t)), x2=_f(self.px(t)), y1=_f(self.y + self.h),
                       y2=_f(self.y + self.h + 4), stroke="#333")
            self.c.text(self.px(t), self.y + self.h + 15, f"{t:g}", size=9)
        for t in yticks if yticks is not None else []:
            self.c.add("line", x1=_f(self.x - 4), x2=_f(self.x), y1=_f(self.py(t)), y2=_f(self.py(t)),
                       stroke="#333")
            self.c.text(self.x - 6, self.py(t) + 3, f"{t:.4g}", size=9, anchor="end")
        if xlabel:
            self.c.text(self.x + self.w / 2, self.y + self.h + 30, xlabel)
        if ylabel:
            self.c.text(self.x - 42, self.y + self.h / 2, ylabel, rotate=-90)


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def design_svg(C: np.ndarray, bins: int = 20, title: str = "") -> str:
    """Two-factor design scatter with marginal histograms above and to the right."""
    C = np.asarray(C, dtype=float)
    cv = Canvas(460, 460)
    main = Panel(cv, 60, 110, 290, 290, (-1, 1), (-1, 1))
    main.frame(_ticks(-1, 1), _ticks(-1, 1), "x1", "x2")
    for x, y in C[:, :2]:
        cv.add("circle", "point", cx=_f(main.px(x)), cy=_f(main.py(y)), r="3",
               fill=PALETTE[0], fill_opacity="0.8")
    edges = np.linspace(-1, 1, bins + 1)
    hx, _ = np.histogram(C[:, 0], edges)
    hy, _ = np.histogram(C[:, 1], edges)
    top = max(1, hx.max(), hy.max())
    top_panel = Panel(cv, 60, 20, 290, 80, (-1, 1), (0, top))
    side_panel = Panel(cv, 360, 110, 80, 290, (0, top), (-1, 1))
    for k in range(bins):
        if hx[k]:
            x0, x1 = top_panel.px(edges[k]), top_panel.px(edges[k + 1])
            cv.add("rect", "hist-bar", x=_f(x0), y=_f(top_panel.py(hx[k])), width=_f(x1 - x0),
                   height=_f(top_panel.py(0) - top_panel.py(hx[k])), fill="#999", stroke="white",
                   data_axis="1")
        if hy[k]:
            y0, y1 = side_panel.py(edges[k + 1]), side_panel.py(edges[k])
            cv.add("rect", "hist-bar", x=_f(side_panel.px(0)), y=_f(y0),
                   width=_f(side_panel.px(hy[k]) - side_panel.px(0)), height=_f(y1 - y0),
                   fill="#999", stroke="white", data_axis="2")
    if title:
        cv.text(230, 14, title, size=12)
    return cv.render()


def pairs_svg(C: np.ndarray, title: str = "") -> str:
    """Pairwise two-factor projections of a design with three or more factors."""
    C = np.asarray(C, dtype=float)
    d = C.shape[1]
    pairs = list(itertools.combinations(range(d), 2))
    size, gap = 200, 60
    cols = min(3, len(pairs))
    rows = -(-len(pairs) // cols)
    cv = Canvas(cols * (size + gap) + 20, rows * (size + gap) + 30)
    for k, (a, b) in enumerate(pairs):
        px, py = 50 + (k % cols) * (size + gap), 30 + (k // cols) * (size + gap)
        p = Panel(cv, px, py, size, size, (-1, 1), (-1, 1))
        p.frame(_ticks(-1, 1, 3), _ticks(-1, 1, 3), f"x{a + 1}", f"x{b + 1}")
        for x, y in C[:, [a, b]]:
            cv.add("circle", "point", cx=_f(p.px(x)), cy=_f(p.py(y)), r="2.5", fill=PALETTE[0],
                   fill_opacity="0.8", data_panel=f"{a + 1}-{b + 1}")
    if title:
        cv.text(cv.width / 2, 16, title, size=12)
    return cv.render()


def trace_svg(traces: Sequence[np.ndarray], labels: Sequence[str] = (), ylabel="criterion") -> str:
    """Best-value-versus-time lines; rows flagged as restarts get a diamond."""
    cv = Canvas(560, 380)
    allv = np.concatenate([t[:, 1] for t in traces if len(t)]) if traces else np.array([0.0, 1.0])
    allt = np.concatenate([t[:, 0] for t in traces if len(t)]) if traces else np.array([0.0, 1.0])
    lo, hi = float(allv.min()), float(allv.max())
    pad = 0.05 * (hi - lo) if hi > lo else 0.05 * max(abs(hi), 1.0)
    p = Panel(cv, 80, 20, 440, 300, (0.0, float(allt.max())), (lo - pad, hi + pad))
    p.frame(_ticks(*p.xlim), _ticks(*p.ylim), "time [s]", ylabel)
    for k, t in enumerate(traces):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_f(p.px(a))},{_f(p.py(b))}" for a, b in t[:, :2])
        cv.add("polyline", "trace-line", points=pts, fill="none", stroke=color, stroke_width="1.5")
        for a, b, flag in t:
            if flag:
                x, y = p.px(a), p.py(b)
                diamond = f"{_f(x)},{_f(y - 5)} {_f(x + 5)},{_f(y)} {_f(x)},{_f(y + 5)} {_f(x - 5)},{_f(y)}"
                cv.add("polygon", "restart", points=diamond, fill=color)
        if k < len(labels):
            cv.text(p.x + p.w - 5, p.y + 14 + 13 * k, labels[k], size=10, anchor="end")
    return cv.render()


def boxplot_svg(labels: Sequence[str], distances: Sequence[np.ndarray],
                criterion: Optional[Sequence[float]] = None, crit_label: str = "D") -> str:
    """Distance box plots per design, criterion values as dots in a lower strip."""
    n = len(labels)
    cv = Canvas(max(320, 110 * n + 120), 470)
    allv = np.concatenate([np.asarray(d) for d in distances])
    top = float(allv.max()) * 1.05 if len(allv) else 1.0
    p = Panel(cv, 80, 20, 100 * n, 290, (0, n), (0, top))
    p.frame(None, _ticks(0, top), None, "distance to nearest point")
    for k, (lab, dist) in enumerate(zip(labels, distances)):
        q0, q1, q2, q3, q4 = np.percentile(dist, [0, 25, 50, 75, 100])
        iqr = q3 - q1
        lo_w = float(np.min(dist[dist >= q1 - 1.5 * iqr]))
        hi_w = float(np.max(dist[dist <= q3 + 1.5 * iqr]))
        cx = p.px(k + 0.5)
        half = 0.3 * p.w / n
        color = PALETTE[k % len(PALETTE)]
        cv.items.append('<g class="box">')
        cv.add("rect", x=_f(cx - half), y=_f(p.py(q3)), width=_f(2 * half),
               height=_f(p.py(q1) - p.py(q3)), fill=color, fill_opacity="0.3", stroke=color)
        cv.add("line", x1=_f(cx - half), x2=_f(cx + half), y1=_f(p.py(q2)), y2=_f(p.py(q2)),
               stroke="#000", stroke_width="2")
        cv.add("line", x1=_f(cx), x2=_f(cx), y1=_f(p.py(q3)), y2=_f(p.py(hi_w)), stroke=color)
        cv.add("line", x1=_f(cx), x2=_f(cx), y1=_f(p.py(q1)), y2=_f(p.py(lo_w)), stroke=color)
        cv.items.append("</g>")
        for v in np.asarray(dist)[(dist < lo_w) | (dist > hi_w)][:200]:
            cv.add("circle", "outlier", cx=_f(cx), cy=_f(p.py(v)), r="1.5", fill="none", stroke=color)
        cv.text(cx, p.y + p.h + 15, lab, size=10)
    if criterion is not None and len(criterion):
        vals = np.asarray(criterion, dtype=float)
        lo, hi = float(vals.min()), float(vals.max())
        pad = 0.1 * (hi - lo) if hi > lo else 0.1 * max(abs(hi), 1.0)
        q = Panel(cv, 80, 350, 100 * n, 80, (0, n), (lo - pad, hi + pad))
        q.frame(None, _ticks(lo - pad, hi + pad, 3), None, crit_label)
        for k, v in enumerate(vals):
            cv.add("circle", "criterion-dot", cx=_f(q.px(k + 0.5)), cy=_f(q.py(v)), r="4", fill="#000")
    return cv.render()
