"""Finite element solver for the parabolic p-Laplacian equation with
nonlinear memory.

Thin re-export of the compiled module; see the README for the CLI and the
configuration format.
"""

from ._core import (
    CaseCheck,
    ConfigError,
    FeSpace,
    InadmissibleStepError,
    Kernel,
    ManufacturedCase,
    MissingHistoryError,
    NonConvergenceError,
    NonFiniteInputError,
    QuadEntry,
    QuadWeights,
    UnsupportedExponentError,
    brute_force_y,
    build_space,
    case_MS1,
    case_MS2,
    check_delta_admissible,
    evaluate,
    evaluate_deriv,
    interpolate,
    l2_error,
    l2_norm,
    node_values,
    quad_weights,
    solve_case,
    spatial_study,
    temporal_study,
)

__version__ = "0.1.0"

__all__ = [
    "CaseCheck",
    "ConfigError",
    "FeSpace",
    "InadmissibleStepError",
    "Kernel",
    "ManufacturedCase",
    "MissingHistoryError",
    "NonConvergenceError",
    "NonFiniteInputError",
    "QuadEntry",
    "QuadWeights",
    "UnsupportedExponentError",
    "brute_force_y",
    "build_space",
    "case_MS1",
    "case_MS2",
    "check_delta_admissible",
    "evaluate",
    "evaluate_deriv",
    "interpolate",
    "l2_error",
    "l2_norm",
    "node_values",
    "quad_weights",
    "solve_case",
    "spatial_study",
    "temporal_study",
]
