"""Named test domains: disks, polygons, stadiums, L-shapes and friends."""

from __future__ import annotations

import math

import numpy as np

from .geometry import (
    BoundaryComponent,
    CircularArc,
    Domain,
    LineSegment,
    Polyline,
    circle_component,
    polygon_domain,
)

L_SHAPE = [(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)]


def unit_disk(center=(0.0, 0.0), radius: float = 1.0) -> Domain:
    return Domain((circle_component(center, radius),))


def unit_square() -> Domain:
    return polygon_domain([(0, 0), (1, 0), (1, 1), (0, 1)])


def l_shape() -> Domain:
    return polygon_domain(L_SHAPE)


def regular_ngon(n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0) -> Domain:
    ang = phase + 2 * math.pi * np.arange(n) / n
    return polygon_domain(np.column_stack([center[0] + radius * np.cos(ang), center[1] + radius * np.sin(ang)]))


def stadium(radius: float = 1.0, flat: float = 2.0) -> Domain:
    """Two semicircles of ``radius`` joined by two segments of length ``flat``."""
    h = flat / 2
    r = radius
    pieces = (
        LineSegment((-h, -r), (h, -r)),
        CircularArc((h, 0.0), r, -math.pi / 2, math.pi),
        LineSegment((h, r), (-h, r)),
        CircularArc((-h, 0.0), r, math.pi / 2, math.pi),
    )
    return Domain((BoundaryComponent(pieces, True),))


def ellipse_polyline(a: float = 2.0, b: float = 1.0, n: int = 400, center=(0.0, 0.0)) -> Domain:
    t = 2 * math.pi * np.arange(n + 1) / n
    pts = np.column_stack([center[0] + a * np.cos(t), center[1] + b * np.sin(t)])
    pts[-1] = pts[0]
    return Domain((BoundaryComponent((Polyline(pts),), True),))


def fillet_polygon(vertices, radii) -> Domain:
    """Closed counter-clockwise polygon with corner ``k`` rounded by a tangent arc of ``radii[k]``.

    A radius of 0 keeps the corner sharp.
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    radii = np.broadcast_to(np.asarray(radii, dtype=float), (n,))
    corners = []
    for k in range(n):
        u_in = v[k] - v[k - 1]
        u_in /= np.linalg.norm(u_in)
        u_out = v[(k + 1) % n] - v[k]
        u_out /= np.linalg.norm(u_out)
        phi = math.atan2(u_in[0] * u_out[1] - u_in[1] * u_out[0], float(np.dot(u_in, u_out)))
        r = radii[k]
        if r == 0 or phi == 0:
            corners.append((v[k], v[k], None))
            continue
        d = r * math.tan(abs(phi) / 2)
        t1, t2 = v[k] - d * u_in, v[k] + d * u_out
        normal = np.array([-u_in[1], u_in[0]]) * (1.0 if phi > 0 else -1.0)
        c = t1 + r * normal
        start = math.atan2(t1[1] - c[1], t1[0] - c[0])
        corners.append((t1, t2, CircularArc(c, r, start, phi)))
    pieces = []
    for k in range(n):
        _, t2, arc = corners[k]
        if arc is not None:
            pieces.append(arc)
        t1_next = corners[(k + 1) % n][0]
        pieces.append(LineSegment(t2, t1_next))
    return Domain((BoundaryComponent(tuple(pieces), True),))


def smoothed_l(reflex_radius: float = 0.1, convex_radius: float = 0.1) -> Domain:
    """L-shape with the reflex corner (1, 1) rounded; convex corners rounded too so the boundary is C^1."""
    radii = [convex_radius] * 6
    radii[3] = reflex_radius
    return fillet_polygon(L_SHAPE, radii)


def figure_eight(n: int = 200) -> Domain:
    t = 2 * math.pi * np.arange(n + 1) / n
    pts = np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])
    pts[-1] = pts[0]
    return Domain((BoundaryComponent((Polyline(pts),), True),))


def annulus(outer: float = 2.0, inner: float = 1.0) -> Domain:
    return Domain((circle_component((0, 0), outer), circle_component((0, 0), inner, ccw=False)))


def convex_corpus() -> list[tuple[str, Domain]]:
    """Twenty convex domains: disks, ellipse polylines and regular polygons."""
    out = []
    for k, r in enumerate([0.5, 1.0, 2.0, 3.5, 0.8, 1.7]):
        out.append((f"disk{k}", unit_disk((0.3 * k, -0.2 * k), r)))
    for k, (a, b) in enumerate([(2, 1), (1, 3), (1.5, 1.2), (4, 0.7), (1, 1), (2.5, 2)]):
        out.append((f"ellipse{k}", ellipse_polyline(a, b, 300 + 40 * k, (k, 0.5 * k))))
    for k, n in enumerate([3, 4, 5, 6, 7, 8, 12, 17]):
        out.append((f"ngon{n}", regular_ngon(n, 1.0 + 0.25 * k, (0.0, 0.1 * k), 0.1 * k)))
    return out


NAMES = {
    "disk": unit_disk,
    "square": unit_square,
    "lshape": l_shape,
    "stadium": stadium,
    "ellipse": ellipse_polyline,
    "smoothed_l": smoothed_l,
    "annulus": annulus,
}


def named(name: str) -> Domain:
    return NAMES[name]()
