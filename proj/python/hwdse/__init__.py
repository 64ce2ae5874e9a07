"""Gaussian-process design-space exploration: surrogates, Pareto fronts, regression."""

from ._core import (
    Error,
    GPModel,
    exit_code_for,
    fit_gp,
    fit_lasso_path,
    fit_linear,
    kernel_eval,
    load_gp,
    normalized_rmse,
    pareto_frontier,
    run_cli,
    task_correlation,
)

__all__ = [
    "Error",
    "GPModel",
    "exit_code_for",
    "fit_gp",
    "fit_lasso_path",
    "fit_linear",
    "kernel_eval",
    "load_gp",
    "normalized_rmse",
    "pareto_frontier",
    "run_cli",
    "task_correlation",
]
