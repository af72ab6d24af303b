"""Flattened polygonal model of a domain and vectorized polygon predicates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import Domain

TWO_PI = 2.0 * math.pi
_CHUNK = 400_000


def cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def signed_area(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def point_segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance matrix (len(pts), len(a)) from points to segments [a_k, b_k]."""
    pts = np.atleast_2d(pts)
    out = np.empty((len(pts), len(a)))
    d = b - a
    len2 = np.maximum(np.sum(d * d, axis=1), 1e-300)
    step = max(1, _CHUNK // max(1, len(a)))
    for i in range(0, len(pts), step):
        p = pts[i:i + step, None, :]
        u = np.clip(np.sum((p - a) * d, axis=-1) / len2, 0.0, 1.0)
        proj = a + u[..., None] * d
        out[i:i + step] = np.linalg.norm(p - proj, axis=-1)
    return out


def crossing_parity(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Even-odd inside test of points against the closed edge set."""
    pts = np.atleast_2d(pts)
    inside = np.zeros(len(pts), dtype=bool)
    step = max(1, _CHUNK // max(1, len(a)))
    for i in range(0, len(pts), step):
        px = pts[i:i + step, 0][:, None]
        py = pts[i:i + step, 1][:, None]
        ay, by = a[:, 1], b[:, 1]
        straddle = (ay > py) != (by > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = a[:, 0] + (py - ay) * (b[:, 0] - a[:, 0]) / (by - ay)
        hits = straddle & (px < xcross)
        inside[i:i + step] = (np.sum(hits, axis=1) % 2) == 1
    return inside


@dataclass
class Region:
    """Polygon (possibly with holes) approximating the closure of a domain.

    Every vertex stores the boundary parameter it came from (``comp_of`` is
    -1 for vertices of the artificial clip closure).
    """

    vertices: np.ndarray
    nxt: np.ndarray
    prv: np.ndarray
    comp_of: np.ndarray
    param_of: np.ndarray
    ring_of: np.ndarray
    tau: float
    flat_tol: float
    clip_box: tuple | None = None

    def __post_init__(self):
        v = self.vertices
        self.edge_a = v
        self.edge_b = v[self.nxt]
        out_dir = v[self.nxt] - v
        in_dir = v - v[self.prv]
        self.out_angle = np.arctan2(out_dir[:, 1], out_dir[:, 0])
        back = -in_dir
        # interior wedge: counter-clockwise from the outgoing edge to the reversed incoming edge
        self.wedge_span = np.mod(np.arctan2(back[:, 1], back[:, 0]) - self.out_angle, TWO_PI)
        self.wedge_span[self.wedge_span == 0.0] = TWO_PI
        tin = in_dir / np.linalg.norm(in_dir, axis=1)[:, None]
        tout = out_dir / np.linalg.norm(out_dir, axis=1)[:, None]
        turn = cross2(tin, tout)
        self.turn = turn
        self.reflex = turn < -1e-12

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def rings(self) -> list[np.ndarray]:
        return [self.vertices[self.ring_of == r] for r in np.unique(self.ring_of)]

    def vertex_index(self, component: int, s: float, period: float | None = None) -> int:
        """Vertex inserted for boundary parameter ``s`` (``period`` for closed components)."""
        cand = np.nonzero(self.comp_of == component)[0]
        gap = np.abs(self.param_of[cand] - s)
        if period:
            gap = np.minimum(gap, period - gap)
        return int(cand[np.argmin(gap)])

    def boundary_distance(self, pts) -> np.ndarray:
        return point_segment_distance(pts, self.edge_a, self.edge_b).min(axis=1)

    def contains(self, pts, tol: float | None = None) -> np.ndarray:
        """Closed containment: inside, or within ``tol`` of the boundary."""
        tol = self.tau if tol is None else tol
        pts = np.atleast_2d(pts)
        return crossing_parity(pts, self.edge_a, self.edge_b) | (self.boundary_distance(pts) <= tol)

    def strictly_contains(self, pts, tol: float | None = None) -> np.ndarray:
        tol = self.tau if tol is None else tol
        pts = np.atleast_2d(pts)
        return crossing_parity(pts, self.edge_a, self.edge_b) & (self.boundary_distance(pts) > tol)

    def in_wedge(self, vidx: np.ndarray, d: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Whether direction(s) ``d`` point into the closed interior wedge at vertices ``vidx``."""
        rel = np.mod(np.arctan2(d[..., 1], d[..., 0]) - self.out_angle[vidx], TWO_PI)
        return (rel <= self.wedge_span[vidx] + tol) | (rel >= TWO_PI - tol)

    def visible(self, p: np.ndarray, q: np.ndarray, pv: np.ndarray, qv: np.ndarray) -> np.ndarray:
        """Batched test that segments [p_k, q_k] lie in the closed region.

        ``pv``/``qv`` give the vertex index of each endpoint, or -1 for a point
        strictly inside the region.
        """
        p = np.atleast_2d(p)
        q = np.atleast_2d(q)
        pv = np.asarray(pv)
        qv = np.asarray(qv)
        n = len(p)
        ok = np.ones(n, dtype=bool)
        d = q - p
        seg_len = np.linalg.norm(d, axis=1)
        zero = seg_len == 0
        safe_len = np.where(zero, 1.0, seg_len)
        u = d / safe_len[:, None]
        tau = self.tau

        # endpoint wedges
        m = (pv >= 0) & ~zero
        ok[m] &= self.in_wedge(pv[m], d[m])
        m = (qv >= 0) & ~zero
        ok[m] &= self.in_wedge(qv[m], -d[m])

        a, b = self.edge_a, self.edge_b
        e = b - a
        e_len = np.linalg.norm(e, axis=1)
        verts = self.vertices
        step = max(1, _CHUNK // max(1, len(a)))
        for i in range(0, n, step):
            sl = slice(i, i + step)
            idx = np.nonzero(ok[sl] & ~zero[sl])[0] + i
            if len(idx) == 0:
                continue
            P, U, L = p[idx], u[idx], seg_len[idx]
            # signed distances of edge endpoints from the segment line
            da = cross2(U[:, None, :], a[None] - P[:, None, :])
            db = cross2(U[:, None, :], b[None] - P[:, None, :])
            # signed distances of segment endpoints from the edge lines
            dp = cross2(e[None], P[:, None, :] - a[None]) / e_len
            dq = cross2(e[None], (P + U * L[:, None])[:, None, :] - a[None]) / e_len
            proper = (((da > tau) & (db < -tau)) | ((da < -tau) & (db > tau))) & \
                     (((dp > tau) & (dq < -tau)) | ((dp < -tau) & (dq > tau)))
            blocked = proper.any(axis=1)
            # vertices lying on the open segment must admit both directions
            along = np.sum((verts[None] - P[:, None, :]) * U[:, None, :], axis=-1)
            on_line = np.abs(da) <= tau  # edge_a == vertices
            inner = on_line & (along > tau) & (along < L[:, None] - tau)
            inner[np.arange(len(idx)), np.where(pv[idx] >= 0, pv[idx], 0)] &= pv[idx] < 0
            inner[np.arange(len(idx)), np.where(qv[idx] >= 0, qv[idx], 0)] &= qv[idx] < 0
            rows, cols = np.nonzero(inner & ~blocked[:, None])
            if len(rows):
                good = self.in_wedge(cols, U[rows]) & self.in_wedge(cols, -U[rows])
                bad_rows = np.unique(rows[~good])
                blocked[bad_rows] = True
            ok[idx] &= ~blocked
        return ok


def clip_walk(box, start: np.ndarray, end: np.ndarray) -> list[np.ndarray]:
    """Clip-box corners met walking counter-clockwise from ``end`` to ``start``."""
    x0, y0, x1, y1 = box
    w, h = x1 - x0, y1 - y0
    per = 2 * (w + h)

    def coord(p):
        dists = [abs(p[1] - y0), abs(p[0] - x1), abs(p[1] - y1), abs(p[0] - x0)]
        side = int(np.argmin(dists))
        return [p[0] - x0, w + p[1] - y0, w + h + x1 - p[0], 2 * w + h + y1 - p[1]][side]

    corners = [(0.0, np.array([x0, y0])), (w, np.array([x1, y0])),
               (w + h, np.array([x1, y1])), (2 * w + h, np.array([x0, y1]))]
    ce, cs = coord(end), coord(start)
    span = (cs - ce) % per
    out = []
    for c, pt in sorted(corners, key=lambda item: (item[0] - ce) % per):
        rel = (c - ce) % per
        if 0 < rel < span:
            out.append(pt)
    return out


def build_region(domain: Domain, extra: dict[int, list[float]] | None = None,
                 flat_tol: float | None = None) -> Region:
    """Flatten ``domain`` into a :class:`Region`, inserting ``extra`` boundary parameters as vertices."""
    extra = extra or {}
    flat_tol = domain.tau_flat if flat_tol is None else flat_tol
    verts, comp_of, param_of, ring_of, nxt, prv = [], [], [], [], [], []
    start = 0
    for ci, comp in enumerate(domain.components):
        params = comp.flatten_params(flat_tol, extra.get(ci, ()))
        pts = comp.points(params)
        cids = [ci] * len(params)
        prm = list(params)
        if not comp.closed:
            if domain.clip_box is None:
                raise ValueError("open boundary components require a clip box")
            corners = clip_walk(domain.clip_box, comp.start, comp.end)
            if corners:
                pts = np.vstack([pts, corners])
            cids += [-1] * len(corners)
            prm += [np.nan] * len(corners)
        n = len(pts)
        idx = np.arange(start, start + n)
        verts.append(pts)
        comp_of += cids
        param_of += prm
        ring_of += [ci] * n
        nxt.append(np.roll(idx, -1))
        prv.append(np.roll(idx, 1))
        start += n
    return Region(np.vstack(verts), np.concatenate(nxt), np.concatenate(prv),
                  np.array(comp_of), np.array(param_of, dtype=float), np.array(ring_of),
                  domain.tau_inside, flat_tol, domain.clip_box)
