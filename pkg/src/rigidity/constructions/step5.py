"""Unbounded convex domain with a flat boundary piece and a non-congruent partner.

U lies below the x-axis with boundary segment [(-2l, 0), (2l, 0)] flanked by
arcs of radius 4l.  V keeps the right branch up to the origin, replaces
[(-l, 0), (0, 0)] by a quarter circle of radius 2l/π ending at
P = (-2l/π, 2l/π), and carries the rest of U's boundary by the rigid motion
T(x, y) = (y - 2l/π, -x - l + 2l/π), a translation followed by a quarter turn
clockwise about P.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ClipTooSmall
from ..geometry import BoundaryComponent, CircularArc, Domain, LineSegment
from ..isometry import BoundaryCorrespondence

ARC_RADIUS = 4.0


@dataclass(frozen=True)
class CounterexamplePair:
    U: Domain
    V: Domain
    f: BoundaryCorrespondence
    provenance: str
    info: dict


def _t_map(l: float):
    c = 2 * l / math.pi
    return lambda p: np.array([p[1] - c, -p[0] - l + c])


def step5_pair(l: float = 1.0, half_width: float | None = None) -> CounterexamplePair:
    """U, V and the arc-length correspondence fixing the right branch.

    ``half_width`` (default 3.5 l) is the half size of U's square clip box.
    """
    if not l > 0:
        raise ValueError("l must be positive")
    W = 3.5 * l if half_width is None else float(half_width)
    R = ARC_RADIUS * l
    if W <= 2 * l or W - 2 * l >= R:
        raise ClipTooSmall(f"clip half-width {W} must lie in ]2l, 2l + R[")
    # right arc: centre (2l, -R), from the clip edge x = W up to (2l, 0)
    a_end = math.pi / 2
    a_start = math.pi / 2 - math.asin((W - 2 * l) / R)
    right = CircularArc((2 * l, -R), R, a_start, a_end - a_start)
    flat = LineSegment((2 * l, 0.0), (-2 * l, 0.0))
    left = CircularArc((-2 * l, -R), R, math.pi / 2, a_end - a_start)
    U = Domain((BoundaryComponent((right, flat, left), closed=False),), (-W, -W, W, W))

    c = 2 * l / math.pi
    T = _t_map(l)
    quarter = CircularArc((0.0, c), c, -math.pi / 2, -math.pi / 2)
    rest_seg = LineSegment(T((-l, 0.0)), T((-2 * l, 0.0)))
    matrix = np.array([[0.0, 1.0], [-1.0, 0.0]])
    rest_arc = left.transformed(matrix, np.array([-c, -l + c]))
    V_pieces = (right, LineSegment((2 * l, 0.0), (0.0, 0.0)), quarter, rest_seg, rest_arc)
    top = W - l + c
    end = rest_arc.end
    if not abs(end[1] - top) < 1e-12 * W:
        raise ClipTooSmall("transformed branch does not end on the clip edge")
    V = Domain((BoundaryComponent(V_pieces, closed=False),), (-W, -W, W, top))
    if U.clip_margin > top - c or V.clip_margin > W - 2 * l:
        raise ClipTooSmall("clip margin swallows the construction")
    info = {"l": l, "P": [-c, c], "quarter_length": quarter.length, "replaced_length": l,
            "half_width": W}
    return CounterexamplePair(U, V, BoundaryCorrespondence.identity(U), "Step5", info)
