"""Python bindings for the mimic defense simulation core."""

from ._mimic import (
    ConfigError,
    cluster_chunk,
    config_settings,
    distance,
    k_order_similarity,
    merge_summary,
    run_experiment,
    tolerant_intersection,
    total_cost,
)

__all__ = [
    "ConfigError",
    "cluster_chunk",
    "config_settings",
    "distance",
    "k_order_similarity",
    "merge_summary",
    "run_experiment",
    "tolerant_intersection",
    "total_cost",
]
