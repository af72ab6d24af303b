"""Validation and the shape predicates used by the rigidity arguments."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvexDomain, NotSimplyBounded, ParameterOutOfRange, SearchFailed
from .domain import BoundaryPoint, Domain
from .pieces import LineSegment, Polyline, piece_problems
from .polygon import build_region, cross2, point_segment_distance, signed_area

COLLINEAR_TOL = 1e-7
MINLEN_REL = 1e-6
CONVEX_TOL = 1e-9
TURN_TOL = 1e-6


@dataclass(frozen=True)
class Violation:
    code: str
    component: int
    piece: int | None
    message: str


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __bool__(self) -> bool:
        return self.ok


def _chain(domain: Domain, ci: int):
    comp = domain.components[ci]
    params = comp.flatten_params(domain.tau_flat)
    pts = comp.points(params)
    if not comp.closed:
        pts = np.vstack([pts, comp.end]) if np.linalg.norm(pts[-1] - comp.end) > 0 else pts
    idx, _ = comp.locate(params)
    return pts, list(idx) + ([len(comp.pieces) - 1] if len(pts) > len(params) else [])


def _segments_intersect(a1, b1, a2, b2, tol):
    """Pairwise (len(a1), len(a2)) intersection-or-near-touch matrix."""
    d1 = b1 - a1
    d2 = b2 - a2
    o1 = cross2(d1[:, None], a2[None] - a1[:, None])
    o2 = cross2(d1[:, None], b2[None] - a1[:, None])
    o3 = cross2(d2[None], a1[:, None] - a2[None])
    o4 = cross2(d2[None], b1[:, None] - a2[None])
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    near = (point_segment_distance(a2, a1, b1).T <= tol) | (point_segment_distance(b2, a1, b1).T <= tol) | \
           (point_segment_distance(a1, a2, b2) <= tol) | (point_segment_distance(b1, a2, b2) <= tol)
    return proper | near


def validate(domain: Domain) -> ValidationReport:
    """Collect every invariant violation of ``domain``; valid domains give an empty report."""
    report = ValidationReport()
    add = report.violations.append
    for ci, comp in enumerate(domain.components):
        for pi, piece in enumerate(comp.pieces):
            for msg in piece_problems(piece):
                add(Violation("piece", ci, pi, msg))
    if not report.ok:
        return report
    tj = domain.tau_join
    for ci, comp in enumerate(domain.components):
        for pi in range(len(comp.pieces) - 1):
            gap = np.linalg.norm(comp.pieces[pi].end - comp.pieces[pi + 1].start)
            if gap > tj:
                add(Violation("join_gap", ci, pi, f"pieces {pi} and {pi + 1} are {gap:.3g} apart"))
        if comp.closed:
            gap = np.linalg.norm(comp.end - comp.start)
            if gap > tj:
                add(Violation("not_closed", ci, len(comp.pieces) - 1, f"closing gap {gap:.3g}"))
        elif domain.clip_box is None:
            add(Violation("clip", ci, None, "open component in a domain without clip box"))
        else:
            ends = np.array([comp.start, comp.end])
            if np.any(np.abs(domain.clip_distance(ends)) > max(tj, 1e-12)):
                add(Violation("clip", ci, None, "open component must start and end on the clip box"))
    if domain.clip_box is not None:
        for ci, comp in enumerate(domain.components):
            pts = comp.points(comp.flatten_params(domain.tau_flat))
            if np.any(domain.clip_distance(pts) < -tj):
                add(Violation("clip", ci, None, "component leaves the clip box"))
    if not report.ok:
        return report

    chains = [_chain(domain, ci) for ci in range(len(domain.components))]
    tol = domain.tau_inside
    for ci, (pts, owner) in enumerate(chains):
        closed = domain.components[ci].closed
        a = pts if closed else pts[:-1]
        b = np.roll(pts, -1, axis=0) if closed else pts[1:]
        n = len(a)
        for lo in range(0, n, 256):
            hit = _segments_intersect(a[lo:lo + 256], b[lo:lo + 256], a, b, tol)
            i, j = np.nonzero(hit)
            i = i + lo
            sep = np.abs(j - i)
            if closed:
                sep = np.minimum(sep, n - sep)
            bad = sep > 1
            if np.any(bad):
                k = int(np.argmax(bad))
                add(Violation("self_intersection", ci, int(owner[i[k]]),
                              f"edges {i[k]} and {j[k]} of the flattened curve meet"))
                break
        d = b - a
        u = d / np.linalg.norm(d, axis=1)[:, None]
        nxt = np.roll(u, -1, axis=0) if closed else u[1:]
        prev = u if closed else u[:-1]
        if np.any(np.sum(prev * nxt, axis=1) < -1 + 1e-12):
            add(Violation("self_intersection", ci, None, "curve folds back on itself"))
    for ci in range(len(chains)):
        for cj in range(ci + 1, len(chains)):
            pa, pb = chains[ci][0], chains[cj][0]
            a1, b1 = pa, np.roll(pa, -1, axis=0)
            a2, b2 = pb, np.roll(pb, -1, axis=0)
            if domain.components[ci].closed is False:
                a1, b1 = pa[:-1], pa[1:]
            if domain.components[cj].closed is False:
                a2, b2 = pb[:-1], pb[1:]
            if np.any(_segments_intersect(a1, b1, a2, b2, tol)):
                add(Violation("components_intersect", ci, None, f"components {ci} and {cj} meet"))
    if not report.ok:
        return report

    if domain.clip_box is not None:
        region = build_region(domain)
        for ring in region.rings():
            if signed_area(ring) <= 0:
                add(Violation("orientation", 0, None, "clipped region must lie left of the curve"))
        return report
    areas = [signed_area(pts) for pts, _ in chains]
    outer = [i for i, a in enumerate(areas) if a > 0]
    if len(outer) != 1:
        add(Violation("orientation", 0, None,
                      "need exactly one positively oriented (outer) component, holes negatively oriented"))
        return report
    o = outer[0]
    region = build_region(Domain((domain.components[o],)))
    for ci, (pts, _) in enumerate(chains):
        if ci != o and not region.contains(pts[:1])[0]:
            add(Violation("hole_outside", ci, None, "hole is not inside the outer component"))
    return report


def junction_kinks(domain: Domain, tau_turn: float = TURN_TOL) -> list[tuple[int, int, float]]:
    """(component, junction index, angle) for piece junctions whose tangents disagree.

    Junction ``k`` sits between pieces ``k - 1`` and ``k``. Polyline neighbours
    get an allowance equal to their largest vertex turn (chord vs. tangent).
    """
    out = []
    for ci, comp in enumerate(domain.components):
        n = len(comp.pieces)
        ks = range(n) if comp.closed else range(1, n)
        for k in ks:
            prev, nxt = comp.pieces[k - 1], comp.pieces[k]
            t0 = prev.end_tangent()
            t1 = nxt.tangent(0.0)
            ang = abs(math.atan2(float(cross2(t0, t1)), float(np.dot(t0, t1))))
            allow = tau_turn
            for piece in (prev, nxt):
                if isinstance(piece, Polyline) and len(piece.points) > 2:
                    allow += float(np.max(np.abs(piece.vertex_turns())))
            if ang > allow:
                out.append((ci, k, ang))
    return out


def is_smooth(domain: Domain, tau_turn: float = TURN_TOL) -> bool:
    return not junction_kinks(domain, tau_turn)


@dataclass(frozen=True)
class TurningReport:
    sub_arc: tuple[int, float, float]
    turning: float
    net: float


def tangent_turning(domain: Domain, component: int, s_start: float, s_end: float) -> TurningReport:
    """Total variation of the tangent angle along ``[s_start, s_end]``.

    Arcs and segments contribute exactly; polylines contribute their vertex
    turns; piece junctions inside the range contribute their kink angle. A
    range covering a whole closed component also counts the closing junction.
    """
    comp = domain.component(component)
    L = comp.length
    if not (0 <= s_start < s_end) or s_end > (2 * L if comp.closed else L) + 1e-12 * L:
        raise ParameterOutOfRange(f"bad sub-arc [{s_start}, {s_end}] on a component of length {L}")
    full = comp.closed and s_end - s_start >= L * (1 - 1e-12)
    total = net = 0.0
    laps = 2 if comp.closed else 1
    for lap in range(laps):
        base = lap * L
        for k, piece in enumerate(comp.pieces):
            a, b = base + comp.offsets[k], base + comp.offsets[k + 1]
            lo, hi = max(a, s_start), min(b, s_end)
            if hi > lo:
                tv, nt = piece.turning(lo - a, hi - a)
                total += tv
                net += nt
            if k == 0 and not comp.closed:
                continue
            if (s_start < a < s_end) or (full and lap == 0 and k == 0):
                t0 = comp.pieces[k - 1].end_tangent()
                t1 = piece.tangent(0.0)
                ang = math.atan2(float(cross2(t0, t1)), float(np.dot(t0, t1)))
                total += abs(ang)
                net += ang
    return TurningReport((component, float(s_start), float(s_end)), float(total), float(net))


@dataclass(frozen=True)
class SegmentDecomposition:
    segments: list[tuple[int, float, float]]
    lengths: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.segments)

    def complements(self, domain: Domain) -> list[tuple[int, float, float]]:
        """Non-straight remainder of every component, as parameter intervals."""
        out = []
        for ci, comp in enumerate(domain.components):
            L = comp.length
            segs = sorted((s0, s1) for c, s0, s1 in self.segments if c == ci)
            if not segs:
                out.append((ci, 0.0, L))
                continue
            if comp.closed:
                for (a0, a1), (b0, b1) in zip(segs, segs[1:] + [(segs[0][0] + L, segs[0][1] + L)]):
                    if b0 - a1 > 0:
                        out.append((ci, a1, b0))
            else:
                cursor = 0.0
                for a0, a1 in segs:
                    if a0 > cursor:
                        out.append((ci, cursor, a0))
                    cursor = a1
                if cursor < L:
                    out.append((ci, cursor, L))
        return out


def _straight_elements(comp):
    """(s0, s1, direction, strong) for every straight element; None marks a break."""
    out = []
    for k, piece in enumerate(comp.pieces):
        off = comp.offsets[k]
        if isinstance(piece, LineSegment):
            out.append((off, off + piece.length, piece.direction, True))
        elif isinstance(piece, Polyline):
            dirs = piece.edge_directions()
            cum = piece.cumulative
            for e in range(len(dirs)):
                out.append((off + cum[e], off + cum[e + 1], dirs[e], False))
        else:
            out.append(None)
    return out


def maximal_segments(domain: Domain, tau_collinear: float = COLLINEAR_TOL,
                     min_length: float | None = None) -> SegmentDecomposition:
    """Maximal straight sub-arcs of the boundary.

    A run of consecutive straight elements with directions equal within
    ``tau_collinear`` radians is one segment if it contains a line segment
    piece or at least two polyline edges. For closed components a run may wrap
    through parameter 0; its end is then reported past the component length.
    """
    min_length = MINLEN_REL * domain.diameter if min_length is None else min_length
    found = []
    for ci, comp in enumerate(domain.components):
        elems = _straight_elements(comp)
        L = comp.length

        def joins(e, f):
            if e is None or f is None:
                return False
            ang = math.atan2(float(cross2(e[2], f[2])), float(np.dot(e[2], f[2])))
            return abs(ang) <= tau_collinear

        n = len(elems)
        if comp.closed and n and all(joins(elems[i], elems[(i + 1) % n]) for i in range(n)):
            runs = [list(range(n))]
        else:
            start = 0
            if comp.closed:
                start = next(i for i in range(n) if not joins(elems[i - 1], elems[i]))
            order = [(start + i) % n for i in range(n)] if comp.closed else list(range(n))
            runs, cur = [], []
            for i in order:
                if cur and joins(elems[cur[-1]], elems[i]):
                    cur.append(i)
                else:
                    if cur:
                        runs.append(cur)
                    cur = [i] if elems[i] is not None else []
            if cur:
                runs.append(cur)
        for run in runs:
            items = [elems[i] for i in run]
            strong = any(it[3] for it in items)
            if not strong and len(items) < 2:
                continue
            s0 = items[0][0]
            length = sum(it[1] - it[0] for it in items)
            if length < min_length:
                continue
            found.append((ci, float(s0), float(s0 + length) if comp.closed else float(items[-1][1])))
    found.sort()
    return SegmentDecomposition(found, tuple(s1 - s0 for _, s0, s1 in found))


def _single(domain: Domain):
    if len(domain.components) != 1:
        raise NotSimplyBounded("convexity is defined here for a single boundary component")


def convexity_report(domain: Domain) -> dict:
    """Convexity verdicts plus a flag telling whether the clip closure decided them."""
    _single(domain)
    region = build_region(domain)
    curve = region.comp_of >= 0
    turns_ok = region.turn >= -CONVEX_TOL
    convex_curve = bool(np.all(turns_ok[curve]))
    convex = bool(np.all(turns_ok))
    segs = maximal_segments(domain)
    return {
        "convex": convex,
        "strictly_convex": convex and len(segs) == 0,
        "segments": len(segs),
        "clip_dependent": domain.clip_box is not None and convex != convex_curve,
    }


def is_convex(domain: Domain) -> bool:
    return convexity_report(domain)["convex"]


def is_strictly_convex(domain: Domain) -> bool:
    return convexity_report(domain)["strictly_convex"]


@dataclass(frozen=True)
class SupportingSegment:
    a: np.ndarray
    b: np.ndarray
    p: np.ndarray
    contact: BoundaryPoint
    direction: np.ndarray


def _ray_hit(region, origin, d, skip):
    a, b = region.edge_a, region.edge_b
    e = b - a
    denom = cross2(d[None], e)
    w = a - origin
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross2(w, e) / denom
        u = cross2(w, d[None]) / denom
    ok = (np.abs(denom) > 1e-300) & (u >= -1e-12) & (u <= 1 + 1e-12) & (t > skip)
    if not np.any(ok):
        return None
    return origin + np.min(t[ok]) * d


def supporting_segment(domain: Domain, samples: int = 41) -> SupportingSegment:
    """Chord inside the domain touching the boundary at one interior point only.

    Candidates are the middles of runs of reflex vertices of the flattened
    boundary; the chord follows the mean of the one-sided tangents there.
    """
    if len(domain.components) == 1 and is_convex(domain):
        raise ConvexDomain("convex domains have no locally supporting interior chord")
    region = build_region(domain)
    reflex = region.reflex & (region.comp_of >= 0)
    if not np.any(reflex):
        raise SearchFailed(f"no reflex vertex at flattening tolerance {region.flat_tol:.3g}")
    candidates = []
    for ci, comp in enumerate(domain.components):
        idx = np.nonzero(region.comp_of == ci)[0]
        flags = reflex[idx]
        if not np.any(flags):
            continue
        n = len(idx)
        start = int(np.argmin(flags)) if not np.all(flags) else 0
        run = []
        for k in range(n + 1):
            j = (start + k) % n
            if k < n and flags[j]:
                run.append(j)
            elif run:
                s0, s1 = region.param_of[idx[run[0]]], region.param_of[idx[run[-1]]]
                if s1 < s0:
                    s1 += comp.length
                candidates.append((ci, float(comp.wrap(0.5 * (s0 + s1))), s1 - s0))
                run = []
    candidates.sort(key=lambda c: -c[2])
    scale = domain.diameter
    for ci, s, _ in candidates:
        comp = domain.components[ci]
        p = comp.points(s)[0]
        t_in = comp.left_tangent(s)
        t_out = comp.tangents(s)[0]
        d = t_in + t_out
        if np.linalg.norm(d) < 1e-12:
            continue
        d = d / np.linalg.norm(d)
        skip = 1e-9 * scale
        a = _ray_hit(region, p, -d, skip)
        b = _ray_hit(region, p, d, skip)
        if a is None or b is None:
            continue
        fr = np.arange(1, samples + 1) / (samples + 1)
        grid = a + fr[:, None] * (b - a)
        grid = grid[np.linalg.norm(grid - p, axis=1) > 1e-6 * scale]
        if np.all(region.strictly_contains(grid)):
            return SupportingSegment(a, b, p, BoundaryPoint(ci, s), d)
    raise SearchFailed(f"no supporting chord found at flattening tolerance {region.flat_tol:.3g}")


__all__ = [
    "ValidationReport",
    "Violation",
    "validate",
    "junction_kinks",
    "is_smooth",
    "tangent_turning",
    "TurningReport",
    "maximal_segments",
    "SegmentDecomposition",
    "convexity_report",
    "is_convex",
    "is_strictly_convex",
    "supporting_segment",
    "SupportingSegment",
]
