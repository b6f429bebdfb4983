"""Synthetic drifting apps with scripted agents and a multi-pass harness."""

from .agent import AgentConfig, ClusterBuffer, EpisodeResult, evolve_after_episode, run_episode
from .app import (
    AppSpec,
    AppVersion,
    DriftKind,
    DriftOp,
    TaskSpec,
    apply_drift,
    demonstrate,
    generate_app,
    generate_tasks,
    solve_task,
)
from .suite import Bank, Scenario, SuiteResult, build_initial_bank, evaluate_suite

__all__ = [
    "AgentConfig", "AppSpec", "AppVersion", "Bank", "ClusterBuffer", "DriftKind", "DriftOp",
    "EpisodeResult", "Scenario", "SuiteResult", "TaskSpec", "apply_drift", "build_initial_bank",
    "demonstrate", "evaluate_suite", "evolve_after_episode", "generate_app", "generate_tasks",
    "run_episode", "solve_task",
]
