"""Illuminant chromaticity estimation from diffuse interreflections.

Thin Python layer over the C++ core. Colors are (r, g, b) tuples in linear
camera units; only their direction matters. See the project README for the
dataset, annotation and CSV formats used by ``run_simulation`` and
``estimate_scene``.
"""

from ._core import (
    ConfigError,
    DataError,
    Error,
    EstimationError,
    __version__,
    angular_error_deg,
    build_color_line,
    chroma_to_illuminant,
    estimate_from_observations,
    estimate_pure,
    estimate_scene,
    geometric_median_lines,
    intersect_least_squares,
    point_line_distance,
    project_chroma,
    run_simulation,
    summarize_errors,
)

__all__ = [
    "Error",
    "ConfigError",
    "DataError",
    "EstimationError",
    "angular_error_deg",
    "build_color_line",
    "chroma_to_illuminant",
    "estimate_from_observations",
    "estimate_pure",
    "estimate_scene",
    "geometric_median_lines",
    "intersect_least_squares",
    "point_line_distance",
    "project_chroma",
    "run_simulation",
    "summarize_errors",
    "__version__",
]
