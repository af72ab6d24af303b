"""Equal-length reshaping of a concave boundary arc of a non-convex domain.

Around the contact point of a locally supporting chord the boundary bends into
the domain.  A sub-arc there is pushed along its normal by a lopsided bump
whose size keeps the arc length unchanged; the rest of the boundary stays put,
so the identity arc-length map is a local isometry of the relative metrics
while the two domains are not congruent.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.optimize import brentq

from ..errors import ConvexDomain, DeformationDegenerate, InvalidDomain
from ..geometry import (
    BoundaryComponent,
    CircularArc,
    Domain,
    Polyline,
    is_convex,
    supporting_segment,
    validate,
)
from ..isometry import BoundaryCorrespondence
from .step5 import CounterexamplePair

log = logging.getLogger(__name__)

SAMPLES = 257
ARC_FRACTION = 0.8
DISK_FACTOR = 1.25


def _concave(piece) -> bool:
    if isinstance(piece, CircularArc):
        return piece.sweep < 0
    if isinstance(piece, Polyline) and len(piece.points) > 2:
        return bool(np.all(piece.vertex_turns() < 0))
    return False


def _concave_run(comp: BoundaryComponent, s: float) -> tuple[float, float]:
    """Parameter interval of the maximal run of inward-bending pieces containing ``s``."""
    idx = int(comp.locate(s)[0])
    if not _concave(comp.pieces[idx]):
        raise DeformationDegenerate("the contact point is not on an inward-bending piece")
    lo, hi = idx, idx
    while lo > 0 and _concave(comp.pieces[lo - 1]):
        lo -= 1
    while hi < len(comp.pieces) - 1 and _concave(comp.pieces[hi + 1]):
        hi += 1
    return float(comp.offsets[lo]), float(comp.offsets[hi + 1])


def bump(t: np.ndarray, c: float) -> np.ndarray:
    """Lopsided profile vanishing to first order at both ends; ``c`` lifts it uniformly."""
    w = 16.0 * t * t * (1.0 - t) ** 2
    return w * (np.sin(2 * np.pi * t) - c)


def _polyline_length(pts: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def nonconvex_deformation(U: Domain, amplitude: float, samples: int = SAMPLES,
                          max_halvings: int = 30) -> CounterexamplePair:
    """Replace a concave sub-arc near the supporting contact by an equal-length bumped arc.

    The bump amplitude starts at ``amplitude`` and is halved until the new arc
    still bends into the domain, stays in the disk around the contact point and
    leaves the boundary simple.
    """
    if len(U.components) == 1 and is_convex(U):
        raise ConvexDomain("convex domains admit no such deformation")
    if not U.bounded:
        raise InvalidDomain("the deformation needs a bounded domain")
    f = BoundaryCorrespondence.identity(U)
    if amplitude == 0:
        return CounterexamplePair(U, U, f, "Deformation", {"amplitude": 0.0})
    sup = supporting_segment(U)
    ci, s_p = sup.contact.component, sup.contact.s
    comp = U.components[ci]
    r0, r1 = _concave_run(comp, s_p)
    h = ARC_FRACTION * min(s_p - r0, r1 - s_p)
    s0, s1 = s_p - h, s_p + h
    if s0 < 0 or s1 > comp.length:
        raise DeformationDegenerate("the deformed arc would straddle the component start")

    s = np.linspace(s0, s1, samples)
    t = (s - s0) / (s1 - s0)
    gamma = comp.points(s)
    tang = comp.tangents(s)
    normal = np.column_stack([-tang[:, 1], tang[:, 0]])  # points into the domain
    target = s1 - s0
    radius = DISK_FACTOR * float(np.max(np.linalg.norm(gamma - sup.p, axis=1)))

    def curve(A, c):
        return gamma + (A * bump(t, c))[:, None] * normal

    A = float(amplitude)
    for _ in range(max_halvings):
        def excess(c):
            return _polyline_length(curve(A, c)) - target

        lo, hi = -1.0, 1.0
        while excess(lo) * excess(hi) > 0 and hi < 1e6:
            lo, hi = 2 * lo, 2 * hi
        if excess(lo) * excess(hi) > 0:
            A /= 2
            continue
        c = brentq(excess, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        pts = curve(A, c)
        pts[0], pts[-1] = gamma[0], gamma[-1]
        new = Polyline(pts)
        turns = new.vertex_turns()
        in_disk = bool(np.all(np.linalg.norm(pts - sup.p, axis=1) <= radius))
        if np.all(turns < 0) and in_disk:
            pieces = comp.sub_pieces(0.0, s0) + [new] + comp.sub_pieces(s1, comp.length)
            comps = list(U.components)
            comps[ci] = BoundaryComponent(tuple(pieces), comp.closed)
            V = Domain(tuple(comps), U.clip_box, U.flat_rel)
            if validate(V).ok:
                info = {"amplitude": A, "requested_amplitude": float(amplitude), "lift": float(c),
                        "contact": sup.p.tolist(), "arc": [float(s0), float(s1)], "disk_radius": radius,
                        "length_error": abs(new.length - target)}
                log.info("deformation amplitude %.4g after halving from %.4g", A, amplitude)
                return CounterexamplePair(U, V, f, "Deformation", info)
        A /= 2
    raise DeformationDegenerate(f"no valid bump after {max_halvings} halvings of {amplitude}")
