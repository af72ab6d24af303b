"""Minimal SVG rendering of domains and paths.

Coordinates are mathematical (y up).  The viewport maps (x, y) to
(x - xmin + pad, ymax - y + pad), so the picture is the usual one with y down
on screen.  Stroke widths scale with the drawing's diameter.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .geometry import Domain

STROKE_REL = 0.004
PAD_REL = 0.05
COLORS = ("#1f3b73", "#b8461b", "#2e7d32", "#6a1b9a")


def _component_points(domain: Domain) -> list[np.ndarray]:
    out = []
    for comp in domain.components:
        s = comp.flatten_params(domain.tau_flat)
        pts = comp.points(s)
        pts = np.vstack([pts, comp.points(0.0) if comp.closed else comp.end[None, :]])
        out.append(pts)
    return out


class Canvas:
    def __init__(self, points: list[np.ndarray]):
        allp = np.vstack(points)
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        self.diam = float(np.linalg.norm(hi - lo)) or 1.0
        pad = PAD_REL * self.diam
        self.x0, self.y1 = lo[0] - pad, hi[1] + pad
        self.width = hi[0] - lo[0] + 2 * pad
        self.height = hi[1] - lo[1] + 2 * pad
        self.stroke = STROKE_REL * self.diam
        self.items: list[str] = []

    def _xy(self, pts: np.ndarray) -> str:
        return " ".join(f"{x - self.x0:.6f},{self.y1 - y:.6f}" for x, y in pts)

    def polyline(self, pts, color: str, width: float = 1.0, dash: bool = False) -> None:
        extra = f' stroke-dasharray="{3 * self.stroke:.6f}"' if dash else ""
        self.items.append(f'<polyline points="{self._xy(np.asarray(pts))}" fill="none" stroke="{color}" '
                          f'stroke-width="{width * self.stroke:.6f}"{extra}/>')

    def dot(self, p, color: str) -> None:
        x, y = p
        self.items.append(f'<circle cx="{x - self.x0:.6f}" cy="{self.y1 - y:.6f}" r="{2.5 * self.stroke:.6f}" '
                          f'fill="{color}"/>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {self.width:.6f} {self.height:.6f}" '
                f'width="800" height="{800 * self.height / self.width:.0f}">')
        return "\n".join([head, *self.items, "</svg>"]) + "\n"


def _clip_outline(domain: Domain) -> np.ndarray | None:
    if domain.clip_box is None:
        return None
    x0, y0, x1, y1 = domain.clip_box
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1], [x0, y0]])


def render_domains(domains: list[Domain], paths: list[np.ndarray] = (), marks: list = ()) -> str:
    """Boundaries of ``domains`` in distinct colours, then paths and marked points on top."""
    comps = [_component_points(d) for d in domains]
    everything = [p for c in comps for p in c] + [np.asarray(p) for p in paths]
    everything += [np.asarray(m, dtype=float).reshape(1, 2) for m in marks]
    everything += [b for b in map(_clip_outline, domains) if b is not None]
    canvas = Canvas(everything)
    for i, (d, c) in enumerate(zip(domains, comps)):
        color = COLORS[i % len(COLORS)]
        box = _clip_outline(d)
        if box is not None:
            canvas.polyline(box, "#999999", 0.5, dash=True)
        for pts in c:
            canvas.polyline(pts, color)
    for p in paths:
        canvas.polyline(p, "#d32f2f", 1.5)
    for m in marks:
        canvas.dot(m, "#000000")
    return canvas.render()


def write_svg(path, domains: list[Domain], paths: list[np.ndarray] = (), marks: list = ()) -> None:
    Path(path).write_text(render_domains(domains, paths, marks))
