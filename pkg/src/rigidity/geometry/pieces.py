"""Boundary pieces: line segments, circular arcs and polylines.

Every piece is parametrized by its own arc length ``t`` in ``[0, length]``.
All evaluation methods accept scalars or numpy arrays of parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


def _as_point(p) -> np.ndarray:
    return np.asarray(p, dtype=float).reshape(2)


def rotation_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def wrap_angle(a):
    """Map angles to ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - a, TWO_PI)


@dataclass(frozen=True)
class LineSegment:
    a: tuple[float, float]
    b: tuple[float, float]

    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(float(v) for v in self.a))
        object.__setattr__(self, "b", tuple(float(v) for v in self.b))

    @property
    def length(self) -> float:
        return math.hypot(self.b[0] - self.a[0], self.b[1] - self.a[1])

    @property
    def direction(self) -> np.ndarray:
        d = np.subtract(self.b, self.a)
        return d / np.linalg.norm(d)

    @property
    def start(self) -> np.ndarray:
        return np.array(self.a)

    @property
    def end(self) -> np.ndarray:
        return np.array(self.b)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        return np.array(self.a) + t[..., None] * self.direction

    def tangent(self, t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(self.direction, t.shape + (2,)).copy()

    def end_tangent(self) -> np.ndarray:
        return self.direction

    def flatten_params(self, tol: float) -> np.ndarray:
        return np.array([0.0])

    def turning(self, t0: float, t1: float) -> tuple[float, float]:
        return 0.0, 0.0

    def sub(self, t0: float, t1: float) -> LineSegment:
        p = self.point(np.array([t0, t1]))
        return LineSegment(p[0], p[1])

    def reversed(self) -> LineSegment:
        return LineSegment(self.b, self.a)

    def transformed(self, matrix: np.ndarray, offset: np.ndarray) -> LineSegment:
        return LineSegment(matrix @ self.start + offset, matrix @ self.end + offset)

    def project(self, p) -> tuple[float, float]:
        p = _as_point(p)
        t = float(np.clip(np.dot(p - self.start, self.direction), 0.0, self.length))
        return t, float(np.linalg.norm(self.point(t) - p))

    def to_json(self) -> dict:
        return {"type": "segment", "a": list(self.a), "b": list(self.b)}


@dataclass(frozen=True)
class CircularArc:
    center: tuple[float, float]
    radius: float
    start_angle: float
    sweep: float

    kind = "arc"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in self.center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "start_angle", float(self.start_angle))
        object.__setattr__(self, "sweep", float(self.sweep))

    @property
    def length(self) -> float:
        return abs(self.sweep) * self.radius

    @property
    def orientation(self) -> float:
        return 1.0 if self.sweep > 0 else -1.0

    def angle(self, t):
        return self.start_angle + self.orientation * np.asarray(t, dtype=float) / self.radius

    @property
    def start(self) -> np.ndarray:
        return self.point(0.0)

    @property
    def end(self) -> np.ndarray:
        return self.point(self.length)

    def point(self, t):
        a = self.angle(t)
        return np.array(self.center) + self.radius * np.stack([np.cos(a), np.sin(a)], axis=-1)

    def tangent(self, t):
        a = self.angle(t)
        return self.orientation * np.stack([-np.sin(a), np.cos(a)], axis=-1)

    def end_tangent(self) -> np.ndarray:
        return self.tangent(self.length)

    def flatten_params(self, tol: float) -> np.ndarray:
        # chord sagitta r(1 - cos(h/2)) <= tol
        if tol >= self.radius:
            step = math.pi / 2
        else:
            step = 2.0 * math.acos(1.0 - tol / self.radius)
        n = max(1, math.ceil(abs(self.sweep) / step))
        return np.linspace(0.0, self.length, n + 1)[:-1]

    def turning(self, t0: float, t1: float) -> tuple[float, float]:
        net = self.orientation * (t1 - t0) / self.radius
        return abs(net), net

    def sub(self, t0: float, t1: float) -> CircularArc:
        return CircularArc(self.center, self.radius, float(self.angle(t0)),
                           self.orientation * (t1 - t0) / self.radius)

    def reversed(self) -> CircularArc:
        return CircularArc(self.center, self.radius, self.start_angle + self.sweep, -self.sweep)

    def transformed(self, matrix: np.ndarray, offset: np.ndarray) -> CircularArc:
        center = matrix @ np.array(self.center) + offset
        theta = math.atan2(matrix[1, 0], matrix[0, 0])
        if np.linalg.det(matrix) > 0:
            return CircularArc(center, self.radius, self.start_angle + theta, self.sweep)
        # reflection maps the direction angle a to theta - a
        return CircularArc(center, self.radius, theta - self.start_angle, -self.sweep)

    def project(self, p) -> tuple[float, float]:
        p = _as_point(p)
        v = p - np.array(self.center)
        rel = self.orientation * (math.atan2(v[1], v[0]) - self.start_angle)
        rel = rel % TWO_PI
        t = rel * self.radius
        if t > self.length:
            # nearer endpoint
            d0 = np.linalg.norm(p - self.start)
            d1 = np.linalg.norm(p - self.end)
            t = 0.0 if d0 <= d1 else self.length
        return t, float(np.linalg.norm(self.point(t) - p))

    def to_json(self) -> dict:
        return {"type": "arc", "center": list(self.center), "radius": self.radius,
                "start_angle": self.start_angle, "sweep": self.sweep}


@dataclass(frozen=True, eq=False)
class Polyline:
    """Sampled smooth curve.

    Individual edges are flattening artifacts, not straight boundary
    segments; only runs of two or more collinear edges count as straight.
    """

    points: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False)

    kind = "polyline"

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "points", pts)
        gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1) if len(pts) > 1 else np.zeros(0)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(gaps)]))

    def __eq__(self, other):
        return isinstance(other, Polyline) and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash(self.points.tobytes())

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    @property
    def cumulative(self) -> np.ndarray:
        return self._cum

    @property
    def start(self) -> np.ndarray:
        return self.points[0].copy()

    @property
    def end(self) -> np.ndarray:
        return self.points[-1].copy()

    def edge_directions(self) -> np.ndarray:
        d = np.diff(self.points, axis=0)
        return d / np.linalg.norm(d, axis=1)[:, None]

    def _edge_index(self, t):
        idx = np.searchsorted(self._cum, t, side="right") - 1
        return np.clip(idx, 0, len(self.points) - 2)

    def point(self, t):
        t = np.asarray(t, dtype=float)
        x = np.interp(t, self._cum, self.points[:, 0])
        y = np.interp(t, self._cum, self.points[:, 1])
        return np.stack([x, y], axis=-1)

    def tangent(self, t):
        return self.edge_directions()[self._edge_index(np.asarray(t, dtype=float))]

    def end_tangent(self) -> np.ndarray:
        return self.edge_directions()[-1]

    def flatten_params(self, tol: float) -> np.ndarray:
        return self._cum[:-1].copy()

    def vertex_turns(self) -> np.ndarray:
        """Signed turning angle at each interior vertex."""
        d = self.edge_directions()
        cross = d[:-1, 0] * d[1:, 1] - d[:-1, 1] * d[1:, 0]
        dot = np.sum(d[:-1] * d[1:], axis=1)
        return np.arctan2(cross, dot)

    def turning(self, t0: float, t1: float) -> tuple[float, float]:
        turns = self.vertex_turns()
        inner = self._cum[1:-1]
        mask = (inner > t0) & (inner < t1)
        return float(np.sum(np.abs(turns[mask]))), float(np.sum(turns[mask]))

    def sub(self, t0: float, t1: float) -> Polyline:
        inner = (self._cum > t0) & (self._cum < t1)
        pts = np.vstack([self.point(t0), self.points[inner], self.point(t1)])
        return Polyline(pts)

    def reversed(self) -> Polyline:
        return Polyline(self.points[::-1])

    def transformed(self, matrix: np.ndarray, offset: np.ndarray) -> Polyline:
        return Polyline(self.points @ matrix.T + offset)

    def project(self, p) -> tuple[float, float]:
        p = _as_point(p)
        a, b = self.points[:-1], self.points[1:]
        d = b - a
        len2 = np.sum(d * d, axis=1)
        u = np.clip(np.sum((p - a) * d, axis=1) / len2, 0.0, 1.0)
        proj = a + u[:, None] * d
        dist = np.linalg.norm(proj - p, axis=1)
        i = int(np.argmin(dist))
        return float(self._cum[i] + u[i] * math.sqrt(len2[i])), float(dist[i])

    def to_json(self) -> dict:
        return {"type": "polyline", "points": self.points.tolist()}


BoundaryPiece = LineSegment | CircularArc | Polyline


def piece_from_json(obj: dict) -> BoundaryPiece:
    kind = obj.get("type")
    if kind == "segment":
        return LineSegment(obj["a"], obj["b"])
    if kind == "arc":
        return CircularArc(obj["center"], obj["radius"], obj["start_angle"], obj["sweep"])
    if kind == "polyline":
        return Polyline(obj["points"])
    raise ValueError(f"unknown piece type {kind!r}")


def piece_problems(piece: BoundaryPiece) -> list[str]:
    """Invariant violations of a single piece (empty when valid)."""
    if isinstance(piece, LineSegment):
        return [] if piece.length > 0 else ["segment endpoints coincide"]
    if isinstance(piece, CircularArc):
        out = []
        if not piece.radius > 0:
            out.append("arc radius must be positive")
        if piece.sweep == 0 or abs(piece.sweep) > TWO_PI * (1 + 1e-12):
            out.append("arc sweep must be nonzero with |sweep| <= 2*pi")
        return out
    if len(piece.points) < 2:
        return ["polyline needs at least two points"]
    if np.any(np.linalg.norm(np.diff(piece.points, axis=0), axis=1) == 0):
        return ["polyline has repeated consecutive points"]
    return []
