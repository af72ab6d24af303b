"""Relative boundary metric: shortest paths through the closure of a planar domain.

The boundary is flattened to a polygon (query points inserted as vertices) and
shortest paths are searched on the visibility graph of the reflex vertices.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra, shortest_path

from .errors import ClipSensitive, PointOutsideClosure
from .geometry import BoundaryPoint, CircularArc, Domain, Region, build_region

log = logging.getLogger(__name__)

METRIC_REL = 1e-8
_MINPLUS_BLOCK = 4_000_000


@dataclass(frozen=True)
class GeodesicPath:
    waypoints: np.ndarray
    length: float
    flattening_bound: float = 0.0
    clip_sensitive: bool = False

    def to_json(self) -> dict:
        return {"waypoints": self.waypoints.tolist(), "length": self.length,
                "flattening_bound": self.flattening_bound, "clip_sensitive": self.clip_sensitive}


@dataclass(frozen=True)
class MetricSample:
    points: list[BoundaryPoint]
    D: np.ndarray
    clip_sensitive: np.ndarray = field(default=None, repr=False)
    flattening_bound: float = 0.0

    def to_csv(self) -> str:
        multi = len({p.component for p in self.points}) > 1
        header = [f"{p.component}:{p.s:.17g}" if multi else f"{p.s:.17g}" for p in self.points]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in self.D:
            writer.writerow([f"{v:.17g}" for v in row])
        return buf.getvalue()


class TriangleKind(str, enum.Enum):
    EQUALITY = "Equality"
    STRICT = "StrictInequality"


@dataclass(frozen=True)
class TriangleVerdict:
    kind: TriangleKind
    gap: float
    certified: bool = False


def flattening_bound(domain: Domain, flat_tol: float | None = None) -> float:
    """Bound on how far polygon geodesics can differ from geodesics of the exact domain."""
    tol = domain.tau_flat if flat_tol is None else flat_tol
    slack = 0.0
    for comp in domain.components:
        for piece in comp.pieces:
            if isinstance(piece, CircularArc):
                t = np.append(piece.flatten_params(tol), piece.length)
                pts = piece.point(t)
                slack += piece.length - float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))
    return 2.0 * tol + slack


def _minplus(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """(A ⊗ B)[i, j] = min_r A[i, r] + B[r, j]."""
    n, k = A.shape
    m = B.shape[1]
    if k == 0:
        return np.full((n, m), np.inf)
    out = np.empty((n, m))
    step = max(1, _MINPLUS_BLOCK // max(1, k * m))
    for i in range(0, n, step):
        out[i:i + step] = np.min(A[i:i + step, :, None] + B[None, :, :], axis=1)
    return out


class VisibilityGraph:
    """Shortest paths among reflex vertices of a flattened domain.

    Built once per set of inserted boundary points and reused for every query.
    """

    def __init__(self, domain: Domain, extra: dict[int, list[float]] | None = None,
                 flat_tol: float | None = None):
        self.domain = domain
        self.region: Region = build_region(domain, extra, flat_tol)
        self.reflex = np.nonzero(self.region.reflex)[0]
        R = self.region.vertices[self.reflex]
        k = len(self.reflex)
        W = self._pair_weights(R, self.reflex, R, self.reflex)
        self.G = self._apsp(W)
        if domain.bounded:
            self.safe = np.ones(k, dtype=bool)
            self.G_safe = self.G
        else:
            self.safe = domain.clip_distance(R) >= domain.clip_margin
            Ws = W.copy()
            Ws[~self.safe, :] = np.inf
            Ws[:, ~self.safe] = np.inf
            self.G_safe = self._apsp(Ws)
        log.debug("visibility graph: %d vertices, %d reflex", self.region.n_vertices, k)

    @staticmethod
    def _apsp(W: np.ndarray) -> np.ndarray:
        if len(W) == 0:
            return np.zeros((0, 0))
        fin = np.isfinite(W)
        rows, cols = np.nonzero(fin)
        graph = csr_matrix((W[rows, cols], (rows, cols)), shape=W.shape)
        G = shortest_path(graph, method="D", directed=False)
        np.fill_diagonal(G, 0.0)
        return G

    def _pair_weights(self, P, pv, Q, qv) -> np.ndarray:
        """Segment lengths between visible pairs of P x Q, inf otherwise."""
        n, m = len(P), len(Q)
        ii, jj = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
        ii, jj = ii.ravel(), jj.ravel()
        ok = self.region.visible(P[ii], Q[jj], np.asarray(pv)[ii], np.asarray(qv)[jj])
        W = np.full(n * m, np.inf)
        W[ok] = np.linalg.norm(P[ii[ok]] - Q[jj[ok]], axis=1)
        return W.reshape(n, m)

    def distances(self, P: np.ndarray, pv: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Pairwise geodesic distances between query points and a clip-sensitivity mask."""
        R = self.region.vertices[self.reflex]
        direct = self._pair_weights(P, pv, P, pv)
        direct = np.minimum(direct, direct.T)
        np.fill_diagonal(direct, 0.0)
        A = self._pair_weights(P, pv, R, self.reflex)
        D = np.minimum(direct, _minplus(_minplus(A, self.G), A.T))
        D = np.minimum(D, D.T)
        if self.domain.bounded:
            return D, np.zeros(D.shape, dtype=bool)
        As = np.where(self.safe[None, :], A, np.inf)
        D_safe = np.minimum(direct, _minplus(_minplus(As, self.G_safe), As.T))
        D_safe = np.minimum(D_safe, D_safe.T)
        tol = METRIC_REL * self.domain.diameter
        unsafe_end = self.domain.clip_distance(P) < self.domain.clip_margin
        sensitive = (D_safe > D + tol) | unsafe_end[:, None] | unsafe_end[None, :]
        np.fill_diagonal(sensitive, unsafe_end)
        return D, sensitive


def _classify(domain: Domain, xy) -> BoundaryPoint | None:
    bp = domain.locate_point(np.asarray(xy, dtype=float))
    return bp


def _extra(points: list[BoundaryPoint]) -> dict[int, list[float]]:
    extra: dict[int, list[float]] = {}
    for p in points:
        extra.setdefault(p.component, []).append(p.s)
    return extra


def _vertex_ids(domain: Domain, region: Region, points: list[BoundaryPoint]) -> np.ndarray:
    out = []
    for p in points:
        comp = domain.components[p.component]
        out.append(region.vertex_index(p.component, p.s, comp.length if comp.closed else None))
    return np.array(out, dtype=int)


def geodesic(domain: Domain, p, q, flat_tol: float | None = None) -> GeodesicPath:
    """Shortest path in the closure of ``domain`` between points ``p`` and ``q`` of the closure."""
    ends = [np.asarray(p, dtype=float).reshape(2), np.asarray(q, dtype=float).reshape(2)]
    located = [_classify(domain, e) for e in ends]
    bpts = [b for b in located if b is not None]
    graph = VisibilityGraph(domain, _extra(bpts), flat_tol)
    region = graph.region
    ids = []
    for e, b in zip(ends, located):
        if b is None:
            if not region.contains(e[None], region.tau)[0]:
                raise PointOutsideClosure(f"point {e.tolist()} is not in the closure of the domain")
            ids.append(-1)
        else:
            ids.append(_vertex_ids(domain, region, [b])[0])
    for i, b in enumerate(located):
        if b is not None:
            ends[i] = region.vertices[ids[i]]
    bound = flattening_bound(domain, region.flat_tol)
    if np.array_equal(ends[0], ends[1]):
        path = GeodesicPath(np.array([ends[0], ends[1]]), 0.0, bound)
        return _check_clip(domain, path)

    R = region.vertices[graph.reflex]
    k = len(R)
    nodes = np.vstack([R, np.array(ends)])
    nid = np.concatenate([graph.reflex, ids])
    W = graph._pair_weights(nodes, nid, nodes, nid)
    W = np.minimum(W, W.T)
    np.fill_diagonal(W, np.inf)
    rows, cols = np.nonzero(np.isfinite(W))
    csr = csr_matrix((W[rows, cols], (rows, cols)), shape=W.shape)
    dist, pred = dijkstra(csr, directed=False, indices=k, return_predecessors=True)
    if not np.isfinite(dist[k + 1]):
        raise PointOutsideClosure("the two points are not connected inside the domain")
    chain = [k + 1]
    while chain[-1] != k:
        chain.append(int(pred[chain[-1]]))
    waypoints = _with_contacts(nodes[chain[::-1]], R, region.tau)
    length = float(np.sum(np.linalg.norm(np.diff(waypoints, axis=0), axis=1)))
    return _check_clip(domain, GeodesicPath(waypoints, length, bound))


def _with_contacts(waypoints: np.ndarray, R: np.ndarray, tau: float) -> np.ndarray:
    """Insert reflex vertices touched by the open path segments, in order along each segment."""
    out = [waypoints[0]]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        d = b - a
        L = float(np.linalg.norm(d))
        if len(R) and L > 0:
            u = d / L
            along = (R - a) @ u
            off = np.abs((R - a) @ np.array([-u[1], u[0]]))
            hit = (off <= tau) & (along > tau) & (along < L - tau)
            for i in np.argsort(along[hit]):
                out.append(R[hit][i])
        out.append(b)
    return np.array(out)


def _check_clip(domain: Domain, path: GeodesicPath) -> GeodesicPath:
    if domain.bounded:
        return path
    # the distance to a rectangle's boundary is concave inside it, so waypoints suffice
    if np.any(domain.clip_distance(path.waypoints) < domain.clip_margin):
        raise ClipSensitive("geodesic comes within the clip margin of the clip box")
    return path


def relative_distance(domain: Domain, a: BoundaryPoint, b: BoundaryPoint, flat_tol: float | None = None) -> float:
    return geodesic(domain, domain.point_at(a), domain.point_at(b), flat_tol).length


def metric_sample(domain: Domain, points: list[BoundaryPoint], flat_tol: float | None = None,
                  strict: bool = True) -> MetricSample:
    """Pairwise relative distances between boundary points, one visibility graph for all pairs.

    With ``strict`` a clip-sensitive pair raises :class:`ClipSensitive`;
    otherwise the sensitivity mask is returned alongside the matrix.
    """
    for p in points:
        domain.component(p.component).check_param(p.s)
    graph = VisibilityGraph(domain, _extra(points), flat_tol)
    ids = _vertex_ids(domain, graph.region, points)
    P = graph.region.vertices[ids]
    D, sensitive = graph.distances(P, ids)
    if strict and sensitive.any():
        raise ClipSensitive(f"{int(sensitive.sum())} sampled pairs are clip-sensitive")
    return MetricSample(list(points), D, sensitive, flattening_bound(domain, graph.region.flat_tol))


def equally_spaced(domain: Domain, n: int, seed_offset: float = 0.0) -> list[BoundaryPoint]:
    """``n`` points equally spaced along the concatenated boundary, starting at ``seed_offset``."""
    lengths = np.array([c.length for c in domain.components])
    total = float(lengths.sum())
    starts = np.concatenate([[0.0], np.cumsum(lengths)])
    out = []
    for j in range(n):
        g = (seed_offset + j * total / n) % total
        ci = int(np.clip(np.searchsorted(starts, g, side="right") - 1, 0, len(lengths) - 1))
        s = g - starts[ci]
        comp = domain.components[ci]
        out.append(BoundaryPoint(ci, float(s % comp.length if comp.closed else min(s, comp.length))))
    return out


def metric_matrix(domain: Domain, n: int, seed_offset: float = 0.0, flat_tol: float | None = None,
                  strict: bool = True) -> MetricSample:
    if n < 2:
        raise ValueError("metric_matrix needs at least two sample points")
    return metric_sample(domain, equally_spaced(domain, n, seed_offset), flat_tol, strict)


def triangle_probe(domain: Domain, a: BoundaryPoint, c: BoundaryPoint, b: BoundaryPoint,
                   tau_eq: float | None = None) -> TriangleVerdict:
    """Compare ρ(a, c) + ρ(c, b) with ρ(a, b)."""
    tau_eq = METRIC_REL * domain.diameter if tau_eq is None else tau_eq
    D = metric_sample(domain, [a, c, b]).D
    gap = max(0.0, float(D[0, 1] + D[1, 2] - D[0, 2]))
    if gap > tau_eq:
        return TriangleVerdict(TriangleKind.STRICT, gap)
    path = geodesic(domain, domain.point_at(a), domain.point_at(b))
    pc = domain.point_at(c)
    w = path.waypoints
    seg_d = [_point_segment(pc, w[i], w[i + 1]) for i in range(len(w) - 1)]
    return TriangleVerdict(TriangleKind.EQUALITY, gap, bool(min(seg_d) <= domain.tau_inside))


def _point_segment(p, a, b) -> float:
    d = b - a
    len2 = float(d @ d)
    u = 0.0 if len2 == 0 else float(np.clip((p - a) @ d / len2, 0.0, 1.0))
    return float(np.linalg.norm(a + u * d - p))
