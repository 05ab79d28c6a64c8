"""Latent-state bandit simulator, policies and experiment harness."""

import json

from ._core import (
    ArmLinearModel,
    ConfigError,
    GateConfig,
    NoStationaryDistribution,
    code_version,
    combined_features,
    compute_gates,
    known_algorithms,
    lagged_features,
    optimal_tau,
    regret_rate_bound,
    sample_instance,
    simulate_idealized_probing,
    stationary_distribution,
    transition_matrix,
    winning_rates,
)
from . import _core

__all__ = [
    "ArmLinearModel",
    "ConfigError",
    "GateConfig",
    "NoStationaryDistribution",
    "code_version",
    "combined_features",
    "compute_gates",
    "known_algorithms",
    "lagged_features",
    "optimal_tau",
    "regret_rate_bound",
    "run_episode",
    "run_sweep",
    "sample_instance",
    "simulate_idealized_probing",
    "stationary_distribution",
    "transition_matrix",
    "winning_rates",
]


def run_episode(algorithm, rewards, p_stay, sigma, horizon, seed, params=None, dual_regret="mean"):
    """Run one episode and return its record as a dict of per-round lists."""
    payload = _core._run_episode(
        algorithm, json.dumps(params or {}), rewards, p_stay, sigma, horizon, seed, dual_regret
    )
    return json.loads(payload)


def run_sweep(config, workers=1, out_dir=None):
    """Run a sweep described by a config dict.

    Returns a dict with per-cell summaries and the summary.csv text. When
    ``out_dir`` is given the result files are written there as well.
    """
    payload = _core._run_sweep(json.dumps(config), workers, str(out_dir) if out_dir else "")
    return json.loads(payload)
