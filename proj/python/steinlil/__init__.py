"""Gaussian subordinated sequences: variance laws, Stein bounds, distances."""

import json

from ._steinlil import (
    CostCapError,
    CovarianceModel,
    DistanceReport,
    DomainError,
    EmbeddingError,
    Error,
    EvaluationError,
    OutOfRangeError,
    OverflowError,
    RegimeError,
    breuer_major_sigma2,
    carre_du_champ,
    comparison_rhs,
    critical_hurst,
    critical_variance_constant,
    hermite,
    kolmogorov_two_sample,
    kolmogorov_vs_gaussian,
    partial_sum_variance,
    sample_paths,
    stein_factor,
    stein_w1_bound,
    theta_bound_sequence,
    wasserstein_assignment,
    wasserstein_sorted,
)
from ._steinlil import _run

EXPERIMENTS = ("variance-table", "cross-cov", "distance-decay", "comparison", "lil-trajectory", "audit")


def _value(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ", ".join(_value(x) for x in v)
    return str(v)


def run(experiment, config="", **settings):
    """Run an experiment and return its report as a dict.

    `config` is key = value text; keyword settings override it.
    """
    lines = [config] + [f"{k} = {_value(v)}" for k, v in settings.items()]
    return json.loads(_run(experiment, "\n".join(lines) + "\n"))


__all__ = [n for n in dir() if not n.startswith("_")]
