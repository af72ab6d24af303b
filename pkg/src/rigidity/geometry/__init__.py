"""Planar domains with piecewise boundaries and their shape predicates."""

from .analysis import (
    SegmentDecomposition,
    SupportingSegment,
    TurningReport,
    ValidationReport,
    Violation,
    convexity_report,
    is_convex,
    is_smooth,
    is_strictly_convex,
    junction_kinks,
    maximal_segments,
    supporting_segment,
    tangent_turning,
    validate,
)
from .domain import (
    BoundaryComponent,
    BoundaryPoint,
    Domain,
    circle_component,
    dump_domain,
    load_domain,
    polygon_domain,
)
from .pieces import CircularArc, LineSegment, Polyline
from .polygon import Region, build_region

__all__ = [
    "BoundaryComponent",
    "BoundaryPoint",
    "CircularArc",
    "Domain",
    "LineSegment",
    "Polyline",
    "Region",
    "SegmentDecomposition",
    "SupportingSegment",
    "TurningReport",
    "ValidationReport",
    "Violation",
    "build_region",
    "circle_component",
    "convexity_report",
    "dump_domain",
    "is_convex",
    "is_smooth",
    "is_strictly_convex",
    "junction_kinks",
    "load_domain",
    "maximal_segments",
    "polygon_domain",
    "supporting_segment",
    "tangent_turning",
    "validate",
]
