"""Modified cardioid profile and its surface of revolution.

The cardioid x² + z² - sqrt(x² + z²) + z = 0 is r = 1 - sin ψ in polar form.
Its branch x >= 0 from (0, -2) is kept outside the disk of radius 1/3; inside,
it is replaced by the circle arc z = 1 - sqrt(2/3 - x²), which meets the
cardioid at (√5/9, 2/9) with the common slope √5/7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..geometry import BoundaryComponent, CircularArc, Polyline

PSI_JOIN = math.asin(2.0 / 3.0)
CIRCLE_CENTER = (0.0, 1.0)
CIRCLE_RADIUS = math.sqrt(2.0 / 3.0)


def cardioid_equation(x, z):
    r = np.hypot(x, z)
    return x * x + z * z - r + z


def circle_equation(x, z):
    return z - (1.0 - np.sqrt(2.0 / 3.0 - x * x))


def cardioid_point(psi):
    r = 1.0 - np.sin(psi)
    return np.stack([r * np.cos(psi), r * np.sin(psi)], axis=-1)


def cardioid_velocity(psi):
    s, c = np.sin(psi), np.cos(psi)
    return np.stack([-c * c - (1.0 - s) * s, c * (1.0 - 2.0 * s)], axis=-1)


def _sagitta(psi: np.ndarray) -> float:
    """Largest distance between the curve at interval midpoints and the chords."""
    a, b = cardioid_point(psi[:-1]), cardioid_point(psi[1:])
    m = cardioid_point(0.5 * (psi[:-1] + psi[1:]))
    d = b - a
    cross = np.abs(d[:, 0] * (m - a)[:, 1] - d[:, 1] * (m - a)[:, 0])
    return float(np.max(cross / np.linalg.norm(d, axis=1)))


def cardioid_profile(tau_flat: float = 2e-5) -> BoundaryComponent:
    """Open profile: sampled cardioid from (0, -2) to the junction, then the exact circle arc to the axis."""
    if not tau_flat > 0:
        raise ValueError("tau_flat must be positive")
    n = 16
    while True:
        psi = np.linspace(-math.pi / 2, PSI_JOIN, n + 1)
        if _sagitta(psi) <= tau_flat:
            break
        n *= 2
    pts = cardioid_point(psi)
    pts[0] = (0.0, -2.0)
    pts[-1] = (math.sqrt(5.0) / 9.0, 2.0 / 9.0)
    start = math.atan2(-7.0 / 9.0, math.sqrt(5.0) / 9.0)
    arc = CircularArc(CIRCLE_CENTER, CIRCLE_RADIUS, start, -math.pi / 2 - start)
    return BoundaryComponent((Polyline(pts), arc), closed=False)


@dataclass(frozen=True)
class JunctionReport:
    point: tuple[float, float]
    cardioid_residual: float
    circle_residual: float
    cardioid_slope: float
    circle_slope: float
    gap: float


def junction_report(profile: BoundaryComponent | None = None) -> JunctionReport:
    """Weld diagnostics from the exact parametrizations of both curves."""
    profile = cardioid_profile() if profile is None else profile
    x, z = math.sqrt(5.0) / 9.0, 2.0 / 9.0
    vel = cardioid_velocity(PSI_JOIN)
    arc = profile.pieces[-1]
    tan = arc.tangent(0.0)
    gap = float(np.linalg.norm(profile.pieces[0].end - arc.start))
    return JunctionReport((x, z), abs(float(cardioid_equation(x, z))), abs(float(circle_equation(x, z))),
                          float(vel[1] / vel[0]), float(tan[1] / tan[0]), gap)


def revolve_export(profile: BoundaryComponent, path, segments: int = 64, tol: float | None = None) -> int:
    """Write the surface swept by rotating the (x, z) profile about the z axis as ASCII STL.

    Returns the number of triangles written.
    """
    tol = 1e-3 if tol is None else tol
    rings = []
    for piece in profile.pieces:
        t = np.append(piece.flatten_params(tol), piece.length)
        pts = piece.point(t)
        rings.append(pts if not rings else pts[1:])
    prof = np.vstack(rings)
    ang = 2 * math.pi * np.arange(segments) / segments
    cos, sin = np.cos(ang), np.sin(ang)
    grid = np.stack([prof[:, :1] * cos, prof[:, :1] * sin, np.broadcast_to(prof[:, 1:], (len(prof), segments))],
                    axis=-1)
    tris = []
    for i in range(len(prof) - 1):
        for j in range(segments):
            k = (j + 1) % segments
            a, b, c, d = grid[i, j], grid[i, k], grid[i + 1, k], grid[i + 1, j]
            if prof[i, 0] > 1e-12:
                tris.append((a, b, d))
            if prof[i + 1, 0] > 1e-12:
                tris.append((b, c, d))
    lines = ["solid profile"]
    for a, b, c in tris:
        nrm = np.cross(b - a, c - a)
        nn = np.linalg.norm(nrm)
        nrm = nrm / nn if nn > 0 else nrm
        lines.append(f"  facet normal {nrm[0]:.9e} {nrm[1]:.9e} {nrm[2]:.9e}")
        lines.append("    outer loop")
        for v in (a, b, c):
            lines.append(f"      vertex {v[0]:.9e} {v[1]:.9e} {v[2]:.9e}")
        lines.append("    endloop")
        lines.append("  endfacet")
    lines.append("endsolid profile")
    Path(path).write_text("\n".join(lines) + "\n")
    return len(tris)
