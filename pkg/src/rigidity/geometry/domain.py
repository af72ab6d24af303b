"""Boundary components, domains and their JSON form."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from ..errors import InvalidDomain, ParameterOutOfRange
from .pieces import (
    BoundaryPiece,
    CircularArc,
    LineSegment,
    Polyline,
    piece_from_json,
    rotation_matrix,
)

JOIN_REL = 1e-9
FLAT_REL = 1e-5
INSIDE_REL = 1e-9
CLIP_MARGIN = 0.1


@dataclass(frozen=True)
class BoundaryPoint:
    component: int
    s: float


@dataclass(frozen=True, eq=False)
class BoundaryComponent:
    pieces: tuple[BoundaryPiece, ...]
    closed: bool = True

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))
        if not self.pieces:
            raise InvalidDomain("a boundary component needs at least one piece")

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0.0], np.cumsum([p.length for p in self.pieces])])

    @property
    def length(self) -> float:
        return float(self.offsets[-1])

    def check_param(self, s: float) -> float:
        upper_ok = s < self.length if self.closed else s <= self.length
        if not (0.0 <= s and upper_ok):
            raise ParameterOutOfRange(f"arc length {s} outside [0, {self.length})")
        return float(s)

    def wrap(self, s):
        """Reduce parameters modulo the length of a closed component."""
        return np.mod(s, self.length) if self.closed else np.clip(s, 0.0, self.length)

    def locate(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.searchsorted(self.offsets, s, side="right") - 1
        idx = np.clip(idx, 0, len(self.pieces) - 1)
        return idx, s - self.offsets[idx]

    def points(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx, t = self.locate(s)
        out = np.empty((len(s), 2))
        for i in np.unique(idx):
            m = idx == i
            out[m] = self.pieces[i].point(t[m])
        return out

    def tangents(self, s) -> np.ndarray:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx, t = self.locate(s)
        out = np.empty((len(s), 2))
        for i in np.unique(idx):
            m = idx == i
            out[m] = self.pieces[i].tangent(t[m])
        return out

    def left_tangent(self, s: float) -> np.ndarray:
        """Backward (incoming) tangent; differs from the forward one at kinks."""
        idx, t = self.locate(s)
        idx = int(idx)
        if t <= 1e-15 * max(1.0, self.length):
            if idx > 0:
                return self.pieces[idx - 1].end_tangent()
            if self.closed:
                return self.pieces[-1].end_tangent()
        piece = self.pieces[idx]
        if isinstance(piece, Polyline):
            k = np.searchsorted(piece.cumulative, t, side="left") - 1
            return piece.edge_directions()[max(0, min(k, len(piece.points) - 2))]
        return piece.tangent(t)

    @property
    def start(self) -> np.ndarray:
        return self.pieces[0].start

    @property
    def end(self) -> np.ndarray:
        return self.pieces[-1].end

    def flatten_params(self, tol: float, extra=()) -> np.ndarray:
        """Sorted global parameters of the vertices of a flattening.

        ``extra`` parameters are inserted as vertices; parameters closer than
        ``1e-12 * length`` to an existing one are merged into it.
        """
        parts = [off + p.flatten_params(tol) for off, p in zip(self.offsets[:-1], self.pieces)]
        base = np.concatenate(parts)
        if not self.closed:
            base = np.append(base, self.length)
        params = np.concatenate([base, np.asarray(list(extra), dtype=float)])
        if self.closed:
            params = np.mod(params, self.length)
        params = np.unique(params)
        merge = 1e-12 * max(self.length, 1.0)
        keep = np.concatenate([[True], np.diff(params) > merge])
        params = params[keep]
        if self.closed and len(params) > 1 and self.length - params[-1] <= merge:
            params = params[:-1]
        return params

    def sub_pieces(self, s0: float, s1: float) -> list[BoundaryPiece]:
        """Pieces covering the parameter interval ``[s0, s1]`` (no wrap-around)."""
        out = []
        for i, piece in enumerate(self.pieces):
            a, b = self.offsets[i], self.offsets[i + 1]
            lo, hi = max(a, s0), min(b, s1)
            if hi - lo > 1e-14 * max(1.0, self.length):
                if lo == a and hi == b:
                    out.append(piece)
                else:
                    out.append(piece.sub(lo - a, hi - a))
        return out

    def reversed(self) -> BoundaryComponent:
        return BoundaryComponent(tuple(p.reversed() for p in reversed(self.pieces)), self.closed)

    def transformed(self, matrix: np.ndarray, offset: np.ndarray) -> BoundaryComponent:
        return BoundaryComponent(tuple(p.transformed(matrix, offset) for p in self.pieces), self.closed)

    def to_json(self) -> dict:
        return {"closed": self.closed, "pieces": [p.to_json() for p in self.pieces]}


@dataclass(frozen=True, eq=False)
class Domain:
    components: tuple[BoundaryComponent, ...]
    clip_box: tuple[float, float, float, float] | None = None
    flat_rel: float = field(default=FLAT_REL, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise InvalidDomain("a domain needs at least one boundary component")
        if self.clip_box is not None:
            object.__setattr__(self, "clip_box", tuple(float(v) for v in self.clip_box))

    @property
    def bounded(self) -> bool:
        return self.clip_box is None

    @cached_property
    def diameter(self) -> float:
        pts = []
        for comp in self.components:
            coarse = max(comp.length, 1e-300) * 1e-7
            pts.append(comp.points(comp.flatten_params(coarse)))
            if not comp.closed:
                pts.append(comp.end[None, :])
        pts = np.vstack(pts)
        if len(pts) > 3:
            try:
                pts = pts[ConvexHull(pts).vertices]
            except QhullError:
                pass
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff * diff, axis=-1))))

    @property
    def tau_join(self) -> float:
        return JOIN_REL * self.diameter

    @property
    def tau_flat(self) -> float:
        return self.flat_rel * self.diameter

    @property
    def tau_inside(self) -> float:
        return INSIDE_REL * self.diameter

    @property
    def clip_margin(self) -> float:
        if self.clip_box is None:
            return 0.0
        x0, y0, x1, y1 = self.clip_box
        return CLIP_MARGIN * min(x1 - x0, y1 - y0)

    def clip_distance(self, pts) -> np.ndarray:
        """Distance from points inside the clip box to its boundary."""
        pts = np.atleast_2d(pts)
        if self.clip_box is None:
            return np.full(len(pts), np.inf)
        x0, y0, x1, y1 = self.clip_box
        return np.min(np.stack([pts[:, 0] - x0, x1 - pts[:, 0], pts[:, 1] - y0, y1 - pts[:, 1]]), axis=0)

    def component(self, i: int) -> BoundaryComponent:
        if not 0 <= i < len(self.components):
            raise ParameterOutOfRange(f"no boundary component {i}")
        return self.components[i]

    def point_at(self, p: BoundaryPoint) -> np.ndarray:
        comp = self.component(p.component)
        return comp.points(comp.check_param(p.s))[0]

    def tangent_at(self, p: BoundaryPoint) -> np.ndarray:
        comp = self.component(p.component)
        return comp.tangents(comp.check_param(p.s))[0]

    def locate_point(self, xy, tol: float | None = None) -> BoundaryPoint | None:
        """Boundary parameter of ``xy`` if it lies within ``tol`` of the boundary."""
        tol = self.tau_inside if tol is None else tol
        best = None
        for ci, comp in enumerate(self.components):
            for pi, piece in enumerate(comp.pieces):
                t, d = piece.project(xy)
                if best is None or d < best[0]:
                    best = (d, ci, comp.offsets[pi] + t)
        d, ci, s = best
        if d > tol:
            return None
        comp = self.components[ci]
        if comp.closed:
            s = s % comp.length
        return BoundaryPoint(ci, float(s))

    def transformed(self, angle: float = 0.0, translation=(0.0, 0.0), reflect: bool = False) -> Domain:
        """Image under ``x -> R(angle) @ S @ x + translation`` with S = diag(1, -1) if ``reflect``.

        Reflected components are reversed so the domain stays on the left.
        """
        matrix = rotation_matrix(angle)
        if reflect:
            matrix = matrix @ np.diag([1.0, -1.0])
        offset = np.asarray(translation, dtype=float)
        comps = []
        for comp in self.components:
            img = comp.transformed(matrix, offset)
            comps.append(img.reversed() if reflect else img)
        clip = None
        if self.clip_box is not None:
            x0, y0, x1, y1 = self.clip_box
            corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]) @ matrix.T + offset
            clip = (*corners.min(axis=0), *corners.max(axis=0))
        return Domain(tuple(comps), clip, self.flat_rel)

    def with_flattening(self, flat_rel: float) -> Domain:
        return Domain(self.components, self.clip_box, flat_rel)

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components],
                "clip_box": list(self.clip_box) if self.clip_box is not None else None}

    @classmethod
    def from_json(cls, obj: dict) -> Domain:
        try:
            comps = [BoundaryComponent(tuple(piece_from_json(p) for p in c["pieces"]), bool(c.get("closed", True)))
                     for c in obj["components"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDomain(f"malformed domain JSON: {exc}") from exc
        return cls(tuple(comps), obj.get("clip_box"))


def load_domain(path) -> Domain:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidDomain(str(exc)) from exc
    return Domain.from_json(obj)


def dump_domain(domain: Domain, path) -> None:
    Path(path).write_text(json.dumps(domain.to_json(), indent=1) + "\n")


def polygon_domain(vertices, clip_box=None) -> Domain:
    """Closed polygon through ``vertices`` (counter-clockwise for an outer boundary)."""
    v = [tuple(map(float, p)) for p in vertices]
    segs = tuple(LineSegment(v[i], v[(i + 1) % len(v)]) for i in range(len(v)))
    return Domain((BoundaryComponent(segs, True),), clip_box)


def circle_component(center=(0.0, 0.0), radius: float = 1.0, start_angle: float = 0.0,
                     ccw: bool = True) -> BoundaryComponent:
    sweep = 2 * math.pi if ccw else -2 * math.pi
    return BoundaryComponent((CircularArc(center, radius, start_angle, sweep),), True)
