"""Exact scattering diagrams and tropical counts on the skeleton of a log Calabi-Yau surface."""

from .counts import (
    BrokenLine, InconsistentDiagramError, assemble_cylinder_count, build_f_an, build_f_log,
    check_birational_invariance, check_splitting_identity, gluing_count, multinomial_count, theta_function,
    theta_product, trace_broken_lines, verify_exponential_formula,
)
from .geometry import Cone, CurveClass, Fan, Seed, build_fan, parallel_transport, star_subdivide
from .lattice import cokernel_order, smith_normal_form
from .scattering import (
    CoefficientTable, Monomial, ScatteringDiagram, Wall, complete_to_consistency, cross_wall,
    extract_coefficients, gps_diagram, path_ordered_product,
)
from .series import TruncatedSeries, exp_series, log_series
from .tropical import (
    DecoratedType, Spine, TropicalType, bend_at, extend_spine, is_balanced, is_transverse, spine_of_type,
    split_cylinder, subdivide_spine, validate_type,
)

__all__ = [
    "BrokenLine", "CoefficientTable", "Cone", "CurveClass", "DecoratedType", "Fan", "InconsistentDiagramError",
    "Monomial", "ScatteringDiagram", "Seed", "Spine", "TropicalType", "TruncatedSeries", "Wall",
    "assemble_cylinder_count", "bend_at", "build_f_an", "build_f_log", "build_fan", "check_birational_invariance",
    "check_splitting_identity", "cokernel_order", "complete_to_consistency", "cross_wall", "exp_series",
    "extend_spine", "extract_coefficients", "gluing_count", "gps_diagram", "is_balanced", "is_transverse",
    "log_series", "multinomial_count", "parallel_transport", "path_ordered_product", "smith_normal_form",
    "spine_of_type", "split_cylinder", "star_subdivide", "subdivide_spine", "theta_function", "theta_product",
    "trace_broken_lines", "validate_type", "verify_exponential_formula",
]
