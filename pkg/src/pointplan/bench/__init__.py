"""Experiment orchestration and the command-line interface."""

from .config import (
    ConfigError,
    EXPERIMENT_SCHEMA,
    load_config,
    method_documents,
    validate,
)
from .runner import (
    MethodOutcome,
    build_env,
    evaluate_planner_on_problems,
    evaluate_policy_on_problems,
    export_policy_field,
    load_policy,
    make_problems,
    run_experiment,
    write_report,
)

__all__ = [
    "ConfigError", "EXPERIMENT_SCHEMA", "load_config", "method_documents",
    "validate", "MethodOutcome", "build_env", "evaluate_planner_on_problems",
    "evaluate_policy_on_problems", "export_policy_field", "load_policy",
    "make_problems", "run_experiment", "write_report",
]
