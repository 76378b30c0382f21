"""Tabular episodic RL laboratory: UCBMQ, baselines and exact solvers."""

from ._core import (
    BonusMode,
    BoundParams,
    ConfigError,
    DeterministicPolicy,
    GridCell,
    GridWorldSpec,
    RateBundle,
    RegretRecord,
    TabularMDP,
    ValueTable,
    __version__,
    backward_induction,
    build_chain,
    build_gridworld,
    build_random_mdp,
    compute_rates,
    evaluate_policy,
    exploration_threshold,
    format_records,
    greedy_policy,
    run_check_suite,
    run_experiment,
    simplified_bonus,
    theoretical_bound_log10,
    variance_of_return,
)

__all__ = [
    "BonusMode",
    "BoundParams",
    "ConfigError",
    "DeterministicPolicy",
    "GridCell",
    "GridWorldSpec",
    "RateBundle",
    "RegretRecord",
    "TabularMDP",
    "ValueTable",
    "backward_induction",
    "build_chain",
    "build_gridworld",
    "build_random_mdp",
    "compute_rates",
    "evaluate_policy",
    "exploration_threshold",
    "format_records",
    "greedy_policy",
    "run_check_suite",
    "run_experiment",
    "simplified_bonus",
    "theoretical_bound_log10",
    "variance_of_return",
]
