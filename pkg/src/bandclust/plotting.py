"""Static dendrogram drawings (text and SVG).

Heights used for vertical layout are the running maximum over each subtree so
that the drawing never folds back on itself; raw heights are what gets
annotated. The data model itself is never reordered or clipped.
"""

from __future__ import annotations

import numpy as np

from .band import BandMatrix
from .engine import Dendrogram

__all__ = ["render_text", "render_svg"]


def _children(d: Dendrogram, t: int):
    """Signed child references of merge t (1-based)."""
    return int(d.left[t - 1]), int(d.right[t - 1])


def render_text(d: Dendrogram) -> str:
    """ASCII tree, root first, leaves as 'leaf i'."""
    if d.p == 1:
        return "leaf 1\n"
    lines = []

    def walk(ref, prefix, tail):
        branch = "└─ " if tail else "├─ "
        cont = "   " if tail else "│  "
        if ref < 0:
            lines.append(f"{prefix}{branch}leaf {-ref}")
            return
        t = ref
        s, e = d.starts[t - 1], d.ends[t - 1]
        lines.append(f"{prefix}{branch}merge {t} @ {d.heights[t - 1]:.6g} [{s}..{e}]")
        l, r = _children(d, t)
        walk(l, prefix + cont, False)
        walk(r, prefix + cont, True)

    root = d.p - 1
    lines.append(f"merge {root} @ {d.heights[-1]:.6g} [1..{d.p}]")
    l, r = _children(d, root)
    walk(l, "", False)
    walk(r, "", True)
    return "\n".join(lines) + "\n"


def _layout_heights(d: Dendrogram) -> np.ndarray:
    """Drawing height per merge: running max over the subtree."""
    ly = np.array(d.heights, dtype=np.float64)
    for t in range(d.p - 1):
        for ref in (d.left[t], d.right[t]):
            if ref > 0:
                ly[t] = max(ly[t], ly[ref - 1])
    return ly


def render_svg(d: Dendrogram, m: BandMatrix | None = None) -> str:
    """Self-contained SVG: dendrogram, optional band heat strip under the leaves."""
    p = d.p
    cell = 14.0
    margin = 30.0
    tree_h = 240.0
    strip_h = 0.0 if m is None else cell * min(m.h, 30)
    width = margin * 2 + cell * max(p, 1)
    height = margin * 2 + tree_h + strip_h + 20.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">',
        f'<rect width="{width:.0f}" height="{height:.0f}" fill="white"/>',
    ]

    def leaf_x(i):  # center of leaf i (1-based)
        return margin + (i - 0.5) * cell

    base_y = margin + tree_h

    if p > 1:
        ly = _layout_heights(d)
        hmax = float(ly.max())
        scale = tree_h / hmax if hmax > 0 else 0.0

        def node_y(ref):
            return base_y if ref < 0 else base_y - ly[ref - 1] * scale

        def node_x(ref):
            if ref < 0:
                return leaf_x(-ref)
            t = ref - 1
            return (leaf_x(d.starts[t]) + leaf_x(d.ends[t])) / 2.0

        for t in range(1, p):
            l, r = _children(d, t)
            y = base_y - ly[t - 1] * scale
            xl, xr = node_x(l), node_x(r)
            parts.append(
                f'<path d="M {xl:.2f} {node_y(l):.2f} V {y:.2f} H {xr:.2f} '
                f'V {node_y(r):.2f}" fill="none" stroke="black"/>')
            parts.append(
                f'<text x="{(xl + xr) / 2:.2f}" y="{y - 2:.2f}" '
                f'font-size="8" text-anchor="middle">{d.heights[t - 1]:.6g}</text>')

    for i in range(1, p + 1):
        parts.append(f'<text x="{leaf_x(i):.2f}" y="{base_y + 12:.2f}" '
                     f'font-size="8" text-anchor="middle">{i}</text>')

    if m is not None:
        rows = min(m.h, 30)
        vmax = float(np.abs(m.bands).max()) or 1.0
        y0 = base_y + 20.0
        for dd in range(rows):
            for i in range(m.p - dd):
                v = m.bands[i, dd]
                if v == 0.0:
                    continue
                g = int(255 * (1.0 - min(abs(v) / vmax, 1.0)))
                parts.append(
                    f'<rect x="{margin + (i + dd / 2.0) * cell:.2f}" '
                    f'y="{y0 + dd * cell:.2f}" width="{cell:.2f}" '
                    f'height="{cell:.2f}" fill="rgb({g},{g},255)"/>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
