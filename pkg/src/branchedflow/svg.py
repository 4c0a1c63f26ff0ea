"""Plain SVG drawings of planar chains (or planar projections of chains).

Each canonical piece becomes one ``<path>`` whose stroke width is
``base_width * ||theta||_alpha``.  The output depends only on the input, so
repeated exports are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chains import PolyChain, canonicalize
from .norms import DimensionError, alpha_norm


@dataclass(frozen=True)
class SvgStyle:
    base_width: float | None = None  # default: 1% of the larger drawing extent
    margin: float = 0.05
    color: str = "#1f3b73"
    pixel_width: int = 600


def _fmt(x: float) -> str:
    s = f"{x:.9g}"
    return "0" if s == "-0" else s


def export_svg(z: PolyChain, projection=None, style: SvgStyle = SvgStyle()) -> str:
    """Render ``z`` as an SVG document.

    ``projection`` is a (2, d) matrix applied after canonicalization, so pieces
    that overlap only in the picture are still drawn separately.  Chains of
    dimension other than two need one.
    """
    c = canonicalize(z)
    if projection is None:
        if c.dim != 2:
            raise DimensionError(f"chain lives in R^{c.dim}; pass a projection to draw it")
        L = np.eye(2)
    else:
        L = np.atleast_2d(np.asarray(projection, dtype=float))
        if L.shape != (2, c.dim):
            raise DimensionError(f"projection must be 2 x {c.dim}, got {L.shape[0]} x {L.shape[1]}")
    flip = np.array([1.0, -1.0])  # SVG's y axis points down
    p = (c.starts @ L.T) * flip
    q = (c.ends @ L.T) * flip
    widths = alpha_norm(c.theta, c.alpha_param) if len(c) else np.zeros(0)

    if len(c):
        pts = np.vstack([p, q])
        lo, hi = pts.min(axis=0), pts.max(axis=0)
    else:
        lo, hi = np.zeros(2), np.ones(2)
    extent = float(max(np.max(hi - lo), 1e-12))
    size = np.maximum(hi - lo, 0.0)
    size = np.where(size > 0, size, extent)
    pad = style.margin * size
    x0, y0 = lo - pad - np.where(hi - lo > 0, 0.0, extent / 2)
    w, h = size + 2 * pad
    base = style.base_width if style.base_width is not None else 0.01 * extent

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.pixel_width}" '
        f'height="{int(round(style.pixel_width * h / w))}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        f'<g fill="none" stroke="{style.color}" stroke-linecap="round">',
    ]
    for a, b, wd in zip(p, q, widths):
        lines.append(
            f'<path d="M {_fmt(a[0])} {_fmt(a[1])} L {_fmt(b[0])} {_fmt(b[1])}" '
            f'stroke-width="{_fmt(base * wd)}"/>'
        )
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)
