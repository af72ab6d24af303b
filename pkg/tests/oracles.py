"""Independent reference computations used by the tests."""

from __future__ import annotations

import math

import numpy as np
import shapely
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra
from shapely.geometry import Polygon, box
from shapely.ops import unary_union


def random_rectilinear(rng: np.random.Generator, max_vertices: int = 12, size: int = 4) -> np.ndarray:
    """Counter-clockwise vertices of a non-convex union of integer rectangles."""
    while True:
        rects = []
        for _ in range(int(rng.integers(2, 4))):
            x0, y0 = rng.integers(0, size - 1, 2)
            w, h = rng.integers(1, size - max(x0, y0) + 1, 2)
            rects.append(box(x0, y0, x0 + w, y0 + h))
        poly = unary_union(rects)
        if not isinstance(poly, Polygon) or poly.interiors:
            continue
        poly = shapely.simplify(poly, 0.0)
        pts = np.array(poly.exterior.coords)[:-1]
        if not 4 < len(pts) <= max_vertices:
            continue
        if Polygon(pts).exterior.is_ccw is False:
            pts = pts[::-1]
        return pts


def _stencil(radius: int) -> np.ndarray:
    out = [(i, j) for i in range(-radius, radius + 1) for j in range(-radius, radius + 1)
           if (i or j) and math.gcd(i, j) == 1 and i * i + j * j <= radius * radius]
    return np.array(out)


class GridOracle:
    """Shortest paths on grid nodes joined by straight edges that stay in the closed polygon."""

    def __init__(self, vertices: np.ndarray, h: float, reach: float = 2.0):
        poly = Polygon(vertices)
        shapely.prepare(poly)
        lo, hi = vertices.min(axis=0), vertices.max(axis=0)
        xs = np.arange(lo[0], hi[0] + h / 2, h)
        ys = np.arange(lo[1], hi[1] + h / 2, h)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        grid = np.column_stack([gx.ravel(), gy.ravel()])
        keep = shapely.covers(poly.buffer(1e-9), shapely.points(grid))
        self.nodes = grid[keep]
        index = {(round(x / h), round(y / h)): k for k, (x, y) in enumerate(self.nodes)}
        rows, cols, w = [], [], []
        for di, dj in _stencil(max(1, int(round(reach / h)))):
            for k, (x, y) in enumerate(self.nodes):
                t = index.get((round(x / h) + di, round(y / h) + dj))
                if t is not None and t > k:
                    rows.append(k)
                    cols.append(t)
        rows, cols = np.array(rows), np.array(cols)
        lines = shapely.linestrings(np.stack([self.nodes[rows], self.nodes[cols]], axis=1))
        ok = shapely.covers(poly.buffer(1e-9), lines)
        rows, cols = rows[ok], cols[ok]
        w = np.linalg.norm(self.nodes[rows] - self.nodes[cols], axis=1)
        n = len(self.nodes)
        self.graph = csr_matrix((w, (rows, cols)), shape=(n, n))
        self.h = h

    def node(self, p) -> int:
        d = np.linalg.norm(self.nodes - np.asarray(p, dtype=float), axis=1)
        k = int(np.argmin(d))
        if d[k] > 1e-9:
            raise ValueError(f"{p} is not a grid node")
        return k

    def distance(self, p, q) -> float:
        dist = dijkstra(self.graph, directed=False, indices=self.node(p))
        return float(dist[self.node(q)])
