"""Pinned scenarios shared by tests and the command line."""

from __future__ import annotations

from .agent import AgentConfig
from .app import AppSpec, DriftOp
from .suite import Scenario

SEED = 7
SIGMAS = (0.1, 0.3, 0.5)
ABLATION_AGENTS = (
    AgentConfig("none"),
    AgentConfig("stationary", stationary=True),
    AgentConfig("procedural", procedural=True),
    AgentConfig("both", procedural=True, stationary=True),
)


def ablation_scenario(sigma: float, seed: int = SEED) -> Scenario:
    """Five app versions; each new version adds appearance drift and two workflow moves.

    Run with ``iterations=4`` to cover versions 0..4.
    """
    drift = {i: (DriftOp.appearance(sigma), DriftOp.workflow(2)) for i in range(1, 5)}
    return Scenario(
        name=f"ablation-sigma-{sigma}", seed=seed, app=AppSpec(), n_tasks=30,
        drift=drift, agents=ABLATION_AGENTS,
    )


def adaptation_scenario(seed: int = SEED) -> Scenario:
    """The bank is built on version 0, then the app shifts hard before the first pass.

    Mild appearance drift continues in every later pass.  Run with ``iterations=3``.
    """
    drift = {0: (DriftOp.appearance(0.6), DriftOp.workflow(3))}
    drift.update({i: (DriftOp.appearance(0.4),) for i in (1, 2, 3)})
    return Scenario(
        name="adaptation", seed=seed, app=AppSpec(), n_tasks=30, drift=drift,
        agents=(AgentConfig("both", procedural=True, stationary=True),),
    )
