"""SVG drawings of the projected triangulation, color classes and net points.

Purely diagnostic; nothing reads these files back.
"""

from __future__ import annotations

import numpy as np

from .planar import COLORLESS, ConeNetTrace

PALETTE = ("#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0",
           "#f032e6", "#bcf60c", "#008080", "#9a6324", "#800000", "#000075")


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_cone_net(trace: ConeNetTrace, cone, net, size: int = 600) -> str:
    """Projected points, the triangulation of the colored points, corridors, and net."""
    S = trace.lifted
    tau = cone.tau(S)
    lo, hi = tau.min(axis=0), tau.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    pad = 20

    def xy(p):
        q = (np.asarray(p) - lo) / span * (size - 2 * pad) + pad
        return q[0], size - q[1]

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
           f'viewBox="0 0 {size} {size}">',
           '<rect width="100%" height="100%" fill="white"/>']
    dt = trace.dt_colored
    if dt is not None:
        corridor_tris = {t for s in trace.subcorridors for t in s.triangles}
        for t in sorted(corridor_tris):
            poly = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(xy, dt.triangle_polygon(t)))
            out.append(f'<polygon points="{poly}" fill="#ffe9a8" stroke="none"/>')
        for e in range(len(dt.edges)):
            pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(xy, dt.edge_polyline(e)))
            out.append(f'<polyline points="{pts}" fill="none" stroke="#888" stroke-width="0.8"/>')
    colors = trace.coloring.colors if trace.coloring is not None else np.full(len(S), COLORLESS)
    for i, p in enumerate(tau):
        x, y = xy(p)
        c = colors[i]
        fill = "#bbbbbb" if c == COLORLESS else PALETTE[c % len(PALETTE)]
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{fill}"/>')
    for i in net:
        x, y = xy(tau[i])
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="6" fill="none" stroke="black" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
