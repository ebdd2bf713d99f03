"""Numerical toolkit for Grunsky matrices of exterior conformal maps,
Beltrami coefficient pairings, and metrics on deformation parameters.
"""

__version__ = "0.1.0"

from .beltrami import (affine_disk_map, affine_family, ahlfors_weill,
                       boundary_probe, chain_invert, chain_rule,
                       first_order_laurent, infinitesimal_grunsky,
                       infinitesimal_grunsky_matrix, moments, pairing,
                       teichmuller_norm_bracket)
from .disk import BeltramiField, PolarGrid, constant_field, field_from_function
from .grunsky import (GrunskyMatrix, convergence_report, grunsky_form,
                      grunsky_matrix, grunsky_norm, grunsky_norm_bound,
                      takagi_max_vector)
from .metrics import (DeformationGrid, MetricChainError, curvature_certificate,
                      direction_probes, envelope, generalized_laplacian,
                      metric_comparison, pullback_from_coeffs, pullback_metric,
                      usc_regularize)
from .quaddiff import (QuadDifferential, QuadratureError, a1_norm,
                       concentrating_sequence, psi_from_x,
                       teichmuller_beltrami, truncated_direction)
from .scmap import (EllipseMapSpec, ExteriorMapSpec, LaurentAccuracyError,
                    PolygonError, PolygonSpec, SolverError, b_norm,
                    boundary_trace, evaluate, hyperbolic_sup_norm,
                    laurent_coeffs, polygon_boundary_distance, pre_schwarzian,
                    schwarzian, solve_parameters)
from .series import TruncatedSeries, mul, log_unit, exp_unit

__all__ = [
    "__version__",
    "TruncatedSeries", "mul", "log_unit", "exp_unit",
    "PolarGrid", "BeltramiField", "constant_field", "field_from_function",
    "QuadDifferential", "QuadratureError", "psi_from_x", "a1_norm",
    "concentrating_sequence", "truncated_direction", "teichmuller_beltrami",
    "GrunskyMatrix", "grunsky_matrix", "grunsky_norm", "grunsky_form",
    "grunsky_norm_bound", "takagi_max_vector", "convergence_report",
    "PolygonError", "SolverError", "LaurentAccuracyError", "PolygonSpec",
    "EllipseMapSpec", "ExteriorMapSpec", "solve_parameters", "evaluate",
    "boundary_trace", "laurent_coeffs", "pre_schwarzian", "schwarzian",
    "hyperbolic_sup_norm", "b_norm", "polygon_boundary_distance",
    "pairing", "moments", "infinitesimal_grunsky", "infinitesimal_grunsky_matrix",
    "teichmuller_norm_bracket", "first_order_laurent", "affine_family",
    "affine_disk_map", "chain_rule", "chain_invert", "ahlfors_weill",
    "boundary_probe",
    "MetricChainError", "DeformationGrid", "direction_probes",
    "pullback_from_coeffs", "pullback_metric", "envelope", "usc_regularize",
    "generalized_laplacian", "curvature_certificate", "metric_comparison",
]
