"""Relative boundary metrics of planar domains and rigidity checks."""

from .geometry import BoundaryComponent, BoundaryPoint, Domain, load_domain
from .isometry import (
    BoundaryCorrespondence,
    check_intrinsic_isometry,
    check_local_isometry,
    check_local_isometry_ladder,
    find_congruence,
)
from .metric import geodesic, metric_matrix, metric_sample, relative_distance

__all__ = [
    "BoundaryComponent",
    "BoundaryCorrespondence",
    "BoundaryPoint",
    "Domain",
    "check_intrinsic_isometry",
    "check_local_isometry",
    "check_local_isometry_ladder",
    "find_congruence",
    "geodesic",
    "load_domain",
    "metric_matrix",
    "metric_sample",
    "relative_distance",
]
__version__ = "0.1.0"
