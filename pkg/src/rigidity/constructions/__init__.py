"""Explicit domain pairs and auxiliary constructions."""

from .cardioid import JunctionReport, cardioid_profile, junction_report, revolve_export
from .deformation import nonconvex_deformation
from .lemma41 import (
    JacobianReport,
    Lemma41Problem,
    Lemma41Solution,
    MapReport,
    PiecewiseQuadratic,
    fillet_model,
    jacobian,
    lemma41_map,
    lemma41_phi,
    lemma41_solve,
    random_problem,
    residual,
)
from .quadrature import quadrature
from .step5 import CounterexamplePair, step5_pair

__all__ = [
    "CounterexamplePair",
    "JacobianReport",
    "JunctionReport",
    "Lemma41Problem",
    "Lemma41Solution",
    "MapReport",
    "PiecewiseQuadratic",
    "cardioid_profile",
    "fillet_model",
    "jacobian",
    "junction_report",
    "lemma41_map",
    "lemma41_phi",
    "lemma41_solve",
    "nonconvex_deformation",
    "quadrature",
    "random_problem",
    "residual",
    "revolve_export",
    "step5_pair",
]
