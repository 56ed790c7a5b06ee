"""Function representations, quadrature and the spectral functionals G, D, H."""

from .fields import CosineSeries2D, GridFunction2D, DEFAULT_GRID, l2_error, l2_norm
from .profiles import TimeProfile
from .quadrature import QuadratureSpec, T_SPEC, quad_1d, simpson_weights
from .transforms import (
    ResolutionWarning,
    SpectralEvaluator,
    alpha_integral,
    cos_moment,
    cosine_transform_G,
    data_functional_H,
    default_alpha_nodes,
    grid_transform,
    h_evaluator,
    kernel_D,
    kernel_evaluator,
    mode_transform_closed,
    n_window,
    series_transform,
    synthesize,
    transform_evaluator,
)

__all__ = [
    "CosineSeries2D", "GridFunction2D", "DEFAULT_GRID", "l2_error", "l2_norm",
    "TimeProfile", "QuadratureSpec", "T_SPEC", "quad_1d", "simpson_weights",
    "ResolutionWarning", "SpectralEvaluator", "alpha_integral", "cos_moment",
    "cosine_transform_G", "data_functional_H", "default_alpha_nodes", "grid_transform",
    "h_evaluator", "kernel_D", "kernel_evaluator", "mode_transform_closed", "n_window",
    "series_transform", "synthesize", "transform_evaluator",
]
