"""Scripted planner/actor agents and post-episode memory evolution.

The planner instantiates the top retrieved workflow as a step plan (no plan
without procedural memory).  The actor scores each on-screen element against
the current step by text cosine, plus ``lam`` times the feature match of any
retrieved stationary patch that anchors on that element, plus a discounted
one-screen lookahead.  Plan steps that cannot be grounded are skipped when
the following step grounds instead.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .. import procedural, stationary
from ..cluster import DEFAULT_TAU, maximal_cliques, build_similarity_graph
from ..embed import EmbeddingProvider, default_provider
from ..errors import NoMatch, UnboundPlaceholder
from ..memstore import ONLINE, MemoryStore, RetrievalConfig
from ..procedural import Action, ActionKind, Trajectory
from ..stationary import K_ICONS, THETA_DUP, THETA_MATCH, IngestReport, Triplet
from .app import AppVersion, Screen, TaskSpec, click_triplet

_TYPE_STEP = re.compile(r"^Type (?P<arg>.+) into (?P<target>.+)$")
REPEAT_PENALTY = 0.25
# floors keep stage 2 from ranking workflows or records of unrelated tasks
PROC_RETRIEVAL = RetrievalConfig(n_candidates=5, k_results=5, min_similarity=0.7)
STAT_RETRIEVAL = RetrievalConfig(n_candidates=5, k_results=2, min_similarity=0.3)


@dataclass(frozen=True)
class AgentConfig:
    name: str
    procedural: bool = False
    stationary: bool = False
    lam: float = 1.0
    k_icons: int = K_ICONS
    # well above chance feature cosine in 16 dimensions
    hint_floor: float = 0.75
    step_threshold: float = 0.5
    lookahead: float = 0.5
    proc_retrieval: RetrievalConfig = PROC_RETRIEVAL
    stat_retrieval: RetrievalConfig = STAT_RETRIEVAL
    # every retrieved variant is template-matched; the best match counts
    variants_per_record: int = 4


@dataclass
class EpisodeResult:
    success: bool
    steps_used: int
    transcript: list[tuple[str, str, float]]
    provenance: dict[str, dict[str, int]]
    trajectory: Trajectory
    observations: list[Triplet] = field(default_factory=list)


class _Grounder:
    """Per-episode scorer; caches one stationary retrieval per distinct query."""

    def __init__(self, agent: AgentConfig, stat_store: MemoryStore | None, provider, tally: Counter):
        self.agent = agent
        self.store = stat_store if agent.stationary else None
        self.provider = provider
        self.tally = tally
        self._hits: dict[str, list] = {}

    def hits(self, query: str):
        if self.store is None:
            return []
        if query not in self._hits:
            found = stationary.retrieve_elements(
                self.store, query, self.agent.stat_retrieval, self.agent.variants_per_record
            )
            for hit in found:
                self.tally[hit.origin] += 1
            self._hits[query] = found
        return self._hits[query]

    def scores(self, screen: Screen, query: str | None) -> np.ndarray:
        if query is None:
            return np.full(len(screen.elements), -np.inf)
        qv = self.provider.embed(query)
        text = np.array([float(qv @ self.provider.embed(el.display_text)) for el in screen.elements])
        bonus = np.zeros(len(screen.elements))
        observed = [el.observe() for el in screen.elements]
        index = {el.id: i for i, el in enumerate(screen.elements)}
        for hit in self.hits(query):
            try:
                hint = stationary.grounding_hint(observed, hit.descriptor, self.agent.k_icons, self.agent.hint_floor)
            except NoMatch:
                continue
            i = index[hint.anchor_id]
            bonus[i] = max(bonus[i], hint.score)
        return text + self.agent.lam * bonus


def _plan(agent: AgentConfig, task: TaskSpec, proc_store: MemoryStore | None, tally: Counter):
    if not agent.procedural or proc_store is None:
        return None
    entries = proc_store.retrieve(task.intent, agent.proc_retrieval)
    for entry in entries:
        tally[entry.origin] += 1
    for entry in entries:
        try:
            return procedural.instantiate(entry.payload, task.arg_bindings)
        except UnboundPlaceholder:
            continue
    return None


def _explore(screen: Screen, visits: Counter, screen_id: str, rng: np.random.Generator) -> int:
    links = [i for i, el in enumerate(screen.elements) if el.nav_target]
    fresh = [i for i in links if visits[(screen_id, screen.elements[i].id)] == 0]
    pool = fresh or links or list(range(len(screen.elements)))
    return pool[int(rng.integers(len(pool)))]


def _is_subsequence(needle, haystack) -> bool:
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


def run_episode(
    app: AppVersion,
    task: TaskSpec,
    agent: AgentConfig,
    proc_store: MemoryStore | None = None,
    stat_store: MemoryStore | None = None,
    budget: int = 12,
    provider: EmbeddingProvider | None = None,
    rng: np.random.Generator | None = None,
) -> EpisodeResult:
    """Play one task.  With ``rng``, steps where nothing grounds explore an unvisited link."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    provider = provider or (proc_store or stat_store or MemoryStore()).provider
    proc_tally: Counter = Counter()
    stat_tally: Counter = Counter()
    plan = _plan(agent, task, proc_store, proc_tally)
    grounder = _Grounder(agent, stat_store, provider, stat_tally)

    screen_id = app.entry_screen
    step = 0
    used = 0
    visits: Counter = Counter()
    clicked: list[str] = []
    actions: list[Action] = []
    observations: list[Triplet] = []
    transcript: list[tuple[str, str, float]] = []
    typed_any = False

    while used < budget and screen_id != task.goal_screen:
        screen = app.screens[screen_id]
        cur = plan[step] if plan and step < len(plan) else task.intent
        nxt = plan[step + 1] if plan and step + 1 < len(plan) else None
        own_cur = grounder.scores(screen, cur)

        # typing never navigates, so a groundable Type step goes first
        typing = _TYPE_STEP.match(cur) if plan else None
        if typing:
            fields = [i for i, el in enumerate(screen.elements) if el.role]
            if fields:
                i = max(fields, key=lambda j: own_cur[j])
                if own_cur[i] >= agent.step_threshold:
                    el = screen.elements[i]
                    actions.append(Action(ActionKind.TYPE, el.function_label, typing.group("arg"), el.role))
                    transcript.append((screen_id, el.id, float(own_cur[i])))
                    step += 1
                    used += 1
                    continue

        own_nxt = grounder.scores(screen, nxt)

        ahead_cur = np.zeros(len(screen.elements))
        ahead_nxt = np.zeros(len(screen.elements))
        for i, el in enumerate(screen.elements):
            if el.nav_target and el.nav_target in app.screens:
                target = app.screens[el.nav_target]
                ahead_cur[i] = max(0.0, grounder.scores(target, cur).max())
                if nxt is not None:
                    ahead_nxt[i] = max(0.0, grounder.scores(target, nxt).max())

        combined = np.maximum(own_cur, own_nxt) + agent.lookahead * np.maximum(ahead_cur, ahead_nxt)
        combined -= REPEAT_PENALTY * np.array([visits[(screen_id, el.id)] for el in screen.elements])
        best = int(np.argmax(combined))  # first index wins ties
        theta = agent.step_threshold
        grounded = max(own_cur.max(), own_nxt.max(), ahead_cur.max(), ahead_nxt.max()) >= theta
        if rng is not None and not grounded:
            best = _explore(screen, visits, screen_id, rng)
        el = screen.elements[best]

        # without a plan, the bound value is typed before following the link the intent names
        if not plan and not typed_any and el.nav_target and own_cur[best] >= theta:
            field_el = next((f for f in screen.elements if f.role in task.arg_bindings), None)
            if field_el is not None:
                typed_any = True
                actions.append(Action(ActionKind.TYPE, field_el.function_label,
                                      task.arg_bindings[field_el.role], field_el.role))
                transcript.append((screen_id, field_el.id, float(own_cur[best])))
                used += 1
                continue

        performed = None
        if plan:
            if own_cur[best] >= theta and own_cur[best] >= own_nxt[best]:
                performed, step = cur, step + 1
            elif own_nxt[best] >= theta:
                performed, step = nxt, step + 2
            elif el.nav_target and ahead_nxt[best] >= theta and ahead_nxt[best] > ahead_cur[best]:
                step += 1

        typed = performed is not None and el.role and _TYPE_STEP.match(performed)
        visits[(screen_id, el.id)] += 1
        used += 1
        transcript.append((screen_id, el.id, float(combined[best])))
        if typed:
            actions.append(Action(ActionKind.TYPE, el.function_label, typed.group("arg"), el.role))
            continue
        act = Action(ActionKind.CLICK, el.function_label)
        actions.append(act)
        clicked.append(el.function_label)
        observations.append(click_triplet(app, screen_id, el, act))
        if el.nav_target:
            screen_id = el.nav_target

    success = screen_id == task.goal_screen and _is_subsequence(task.required_clicks, clicked)
    provenance = {}
    if agent.procedural and proc_store is not None:
        provenance["procedural"] = dict(proc_tally)
    if agent.stationary and stat_store is not None:
        provenance["stationary"] = dict(stat_tally)
    return EpisodeResult(
        success=success,
        steps_used=used,
        transcript=transcript,
        provenance=provenance,
        trajectory=Trajectory(task.intent, tuple(actions) or (Action(ActionKind.STOP, argument="aborted"),), success),
        observations=observations,
    )


class ClusterBuffer:
    """Successful trajectories waiting to form a clique of similar instructions."""

    def __init__(self, tau: float = DEFAULT_TAU, provider: EmbeddingProvider | None = None):
        self.tau = tau
        self.provider = provider or default_provider()
        self.items: dict[int, Trajectory] = {}
        self._next = 0

    def __len__(self):
        return len(self.items)

    def add(self, trajectory: Trajectory) -> int:
        ident = self._next
        self._next += 1
        self.items[ident] = trajectory
        return ident

    def cliques_with(self, ident: int):
        graph = build_similarity_graph(
            [(i, t.instruction) for i, t in self.items.items()], self.provider, self.tau
        )
        return [c for c in maximal_cliques(graph) if ident in c and len(c) >= 2]


@dataclass
class EvolutionReport:
    workflows: int = 0
    stationary: IngestReport = field(default_factory=IngestReport)


def evolve_after_episode(
    result: EpisodeResult,
    trajectory: Trajectory | None,
    proc_store: MemoryStore | None,
    stat_store: MemoryStore | None,
    cluster_buffer: ClusterBuffer | None,
    theta_match: float = THETA_MATCH,
    theta_dup: float = THETA_DUP,
    origin: str = ONLINE,
) -> EvolutionReport:
    report = EvolutionReport()
    if not result.success:
        return report
    trajectory = trajectory or result.trajectory
    if proc_store is not None and cluster_buffer is not None:
        ident = cluster_buffer.add(trajectory)
        for clique in cluster_buffer.cliques_with(ident):
            if not all(m in cluster_buffer.items for m in clique):
                continue
            members = [cluster_buffer.items[m] for m in clique]
            made = procedural.abstract_workflows(members)
            for wf in made:
                procedural.record_workflow(proc_store, wf, origin)
                report.workflows += 1
            if made:
                for m in clique:
                    del cluster_buffer.items[m]
    if stat_store is not None:
        report.stationary = stationary.ingest_triplets(
            stat_store, result.observations, theta_match, theta_dup, origin
        )
    return report
