"""Multi-iteration evaluation of agents on a drifting app.

Pass 0 runs every agent with only the initial bank.  Before pass ``i`` the
drift scheduled for ``i`` is applied; after each pass the successful episodes
of that pass are folded into the agent's own memory (each agent evolves on its
own timeline).  Provenance percentages count retrieved entries (procedural)
and emitted patch variants (stationary) whose origin is the initial bank.
"""

from __future__ import annotations

import copy
import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .. import procedural, stationary
from ..cluster import DEFAULT_TAU, cluster_instructions
from ..embed import EmbeddingProvider, default_provider
from ..memstore import INITIAL, MemoryStore
from .agent import AgentConfig, ClusterBuffer, EpisodeResult, evolve_after_episode, run_episode
from .app import AppSpec, AppVersion, DriftOp, TaskSpec, apply_drift, demonstrate, generate_app, generate_tasks

COLUMNS = (
    "iteration", "agent", "version", "tasks", "successes", "success_rate",
    "proc_retrieved", "proc_pct", "stat_retrieved", "stat_pct",
)


@dataclass
class Scenario:
    name: str = "scenario"
    seed: int = 7
    app: AppSpec = field(default_factory=AppSpec)
    n_tasks: int = 30
    per_category: int = 3
    demos_per_category: int = 2
    # fraction of task categories demonstrated in the initial bank
    demo_coverage: float = 1.0
    drift: dict[int, tuple[DriftOp, ...]] = field(default_factory=dict)
    agents: tuple[AgentConfig, ...] = ()
    budget: int = 12
    tau: float = DEFAULT_TAU
    theta_match: float = stationary.THETA_MATCH
    theta_dup: float = stationary.THETA_DUP
    evolve: bool = True
    # seeded exploration when no step grounds
    explore: bool = True
    bank_path: str | None = None
    # build the initial bank on the app generated from this seed instead of the evaluated one
    bank_seed: int | None = None


@dataclass
class Bank:
    procedural: MemoryStore
    stationary: MemoryStore


@dataclass
class SuiteResult:
    rows: list[dict]
    episodes: dict[tuple[int, str], list[EpisodeResult]]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: "" if row[k] is None else row[k] for k in COLUMNS})
        return buf.getvalue()

    def transcripts(self) -> str:
        """Canonical JSON-lines dump of every episode transcript."""
        lines = []
        for (it, agent), results in sorted(self.episodes.items()):
            for n, res in enumerate(results):
                lines.append(json.dumps(
                    {"iteration": it, "agent": agent, "episode": n, "success": res.success,
                     "steps": res.steps_used, "transcript": res.transcript,
                     "provenance": res.provenance},
                    sort_keys=True, separators=(",", ":"),
                ))
        return "\n".join(lines) + "\n"

    def series(self, agent: str, column: str) -> list:
        return [r[column] for r in self.rows if r["agent"] == agent]

    def mean_success(self, agent: str) -> float:
        rows = [r for r in self.rows if r["agent"] == agent]
        return 100.0 * sum(r["successes"] for r in rows) / sum(r["tasks"] for r in rows)


def build_initial_bank(
    app: AppVersion,
    demos: list[TaskSpec],
    tau: float = DEFAULT_TAU,
    theta_match: float = stationary.THETA_MATCH,
    theta_dup: float = stationary.THETA_DUP,
    provider: EmbeddingProvider | None = None,
) -> Bank:
    """Construct both memories from scripted demonstrations on ``app``."""
    provider = provider or default_provider()
    proc = MemoryStore(provider)
    stat = MemoryStore(provider)
    trajectories = {}
    triplets = []
    for i, task in enumerate(demos):
        traj, trips = demonstrate(app, task)
        trajectories[i] = traj
        triplets.extend(trips)
    clusters = cluster_instructions([(i, t.instruction) for i, t in trajectories.items()], provider, tau)
    procedural.build_procedural_memory(proc, trajectories, clusters, INITIAL)
    stationary.ingest_triplets(stat, triplets, theta_match, theta_dup, INITIAL)
    return Bank(proc, stat)


def _pct(tally: dict) -> float | None:
    total = sum(tally.values())
    if total == 0:
        return None
    return round(100.0 * tally.get(INITIAL, 0) / total, 6)


def evaluate_suite(scenario: Scenario, iterations: int, bank: Bank | None = None) -> SuiteResult:
    """Run passes 0..iterations; returns per-pass, per-agent metric rows."""
    from ..io import load_bank  # io imports this module's types lazily as well

    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    base = generate_app(scenario.app, scenario.seed)
    tasks, demos = generate_tasks(
        base, scenario.n_tasks, scenario.seed + 1, scenario.per_category, scenario.demos_per_category
    )
    if bank is None and scenario.bank_path:
        bank = Bank(*load_bank(scenario.bank_path))
    if bank is None:
        source = base
        if scenario.bank_seed is not None:
            source = generate_app(scenario.app, scenario.bank_seed)
            _, demos = generate_tasks(
                source, scenario.n_tasks, scenario.bank_seed + 1, scenario.per_category, scenario.demos_per_category
            )
        n_demo_cats = round(len(demos) / max(1, scenario.demos_per_category) * scenario.demo_coverage)
        covered = demos[: n_demo_cats * scenario.demos_per_category]
        bank = build_initial_bank(source, covered, scenario.tau, scenario.theta_match, scenario.theta_dup)

    states = {}
    for agent in scenario.agents:
        own = copy.deepcopy(bank)
        states[agent.name] = (
            own.procedural if agent.procedural else None,
            own.stationary if agent.stationary else None,
            ClusterBuffer(scenario.tau, own.procedural.provider),
        )

    rows: list[dict] = []
    episodes: dict[tuple[int, str], list[EpisodeResult]] = {}
    app = base
    for it in range(iterations + 1):
        ops = scenario.drift.get(it, ())
        if ops:
            app = apply_drift(app, ops, scenario.seed + 1000 * (it + 1), tasks)
        for a, agent in enumerate(scenario.agents):
            proc, stat, buffer = states[agent.name]
            results = [
                run_episode(app, task, agent, proc, stat, scenario.budget,
                            rng=np.random.default_rng([scenario.seed, it, a, n]) if scenario.explore else None)
                for n, task in enumerate(tasks)
            ]
            episodes[(it, agent.name)] = results
            rows.append(_row(it, agent, app.version, results))
            if scenario.evolve:
                for res in results:
                    evolve_after_episode(
                        res, None, proc, stat, buffer if proc is not None else None,
                        scenario.theta_match, scenario.theta_dup,
                    )
    return SuiteResult(rows, episodes)


def _row(it: int, agent: AgentConfig, version: int, results: list[EpisodeResult]) -> dict:
    proc: dict = {}
    stat: dict = {}
    for res in results:
        for origin, n in res.provenance.get("procedural", {}).items():
            proc[origin] = proc.get(origin, 0) + n
        for origin, n in res.provenance.get("stationary", {}).items():
            stat[origin] = stat.get(origin, 0) + n
    wins = sum(r.success for r in results)
    return {
        "iteration": it,
        "agent": agent.name,
        "version": version,
        "tasks": len(results),
        "successes": wins,
        "success_rate": round(100.0 * wins / len(results), 6) if results else 0.0,
        "proc_retrieved": sum(proc.values()) if agent.procedural else None,
        "proc_pct": _pct(proc) if agent.procedural else None,
        "stat_retrieved": sum(stat.values()) if agent.stationary else None,
        "stat_pct": _pct(stat) if agent.stationary else None,
    }
