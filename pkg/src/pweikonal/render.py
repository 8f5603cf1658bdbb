"""Deterministic SVG figures of solutions in world coordinates."""

from __future__ import annotations

from fractions import Fraction

from .geometry import to_world
from .solution import PLSolution, jump_sets

COLORS = {1: "#c0392b", 2: "#2471a3"}


def _fmt(x) -> str:
    return f"{float(x):.6f}".rstrip("0").rstrip(".")


def _level_segments(v: PLSolution, c):
    """Pieces of the level set {v = c} clipped to each affine cell."""
    segs = []
    for pc in v.pieces:
        pts = [to_world(p) for p in pc.cell]
        vals = [pc.grad[0] * p[0] + pc.grad[1] * p[1] + pc.offset - c for p in pts]
        cross = []
        n = len(pts)
        for i in range(n):
            a, b = pts[i], pts[(i + 1) % n]
            fa, fb = vals[i], vals[(i + 1) % n]
            if fa == 0:
                cross.append(a)
            if (fa < 0 < fb) or (fb < 0 < fa):
                lam = fa / (fa - fb)
                cross.append((a[0] + lam * (b[0] - a[0]), a[1] + lam * (b[1] - a[1])))
        uniq = sorted(set(cross))
        if len(uniq) == 2:
            segs.append(tuple(uniq))
    return sorted(segs)


def render_svg(v: PLSolution, show_jumps: bool = True, show_levels: int = 0, size: int = 480) -> str:
    """SVG 1.1 text: domain outline, one group per jump component, optional level lines."""
    D = v.domain
    wsegs = [(to_world(a), to_world(b)) for a, b in D.edges()]
    xs = [p[0] for s in wsegs for p in s]
    ys = [p[1] for s in wsegs for p in s]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or Fraction(1)
    margin = span / 20
    scale = Fraction(size) / (span + 2 * margin)

    def X(p):
        return _fmt((p[0] - x0 + margin) * scale)

    def Y(p):
        return _fmt((y1 - p[1] + margin) * scale)

    w = _fmt((x1 - x0 + 2 * margin) * scale)
    h = _fmt((y1 - y0 + 2 * margin) * scale)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        '<g id="domain" fill="none" stroke="#000000" stroke-width="1.5">',
    ]
    for lp in D.loops:
        pts = " ".join(f"{X(to_world(p))},{Y(to_world(p))}" for p in lp)
        out.append(f'<polygon points="{pts}"/>')
    out.append("</g>")
    if show_levels > 0:
        vmax = max(abs(pc.grad[0] * q[0] + pc.grad[1] * q[1] + pc.offset)
                   for pc in v.pieces for q in map(to_world, pc.cell))
        out.append('<g id="levels" fill="none" stroke="#7f8c8d" stroke-width="0.5">')
        if vmax > 0:
            for i in range(1, show_levels + 1):
                for c in (vmax * i / (show_levels + 1), -vmax * i / (show_levels + 1)):
                    for a, b in _level_segments(v, c):
                        out.append(f'<polyline points="{X(a)},{Y(a)} {X(b)},{Y(b)}"/>')
        out.append("</g>")
    if show_jumps:
        for J in jump_sets(v):
            out.append(f'<g id="jump{J.component}" fill="none" stroke="{COLORS[J.component]}" stroke-width="2">')
            for s in J.segments:
                a, b = s.world
                out.append(f'<polyline points="{X(a)},{Y(a)} {X(b)},{Y(b)}"/>')
            out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
