"""Synthetic app model with task generation and drift.

Agents see an element's ``display_text`` and ``features`` plus its ``box``,
never its ``function_label``.  Appearance drift perturbs the first two; workflow drift
interposes pass-through screens on navigation edges.  Labels and goals are
never removed, so every task stays completable.
"""

from __future__ import annotations

import copy
import enum
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..embed import token_hash
from ..errors import DegenerateSpec, ReachabilityLost
from ..procedural import Action, ActionKind, Trajectory
from ..stationary import PatchDescriptor, ScreenElement, Triplet
from . import vocab

FEATURE_DIM = 16
ELEMENT_NOISE = 0.15
MAX_DRIFT_RETRIES = 8
# chance per element and unit sigma that appearance drift resamples its display text
TEXT_DRIFT_RATE = 2.0
INTENT_TEMPLATE = "open {goal} then type {value} in {goal}"


@dataclass
class UIElement:
    id: str
    function_label: str
    display_text: str
    features: np.ndarray
    box: tuple[float, float, float, float]
    nav_target: str | None = None
    role: str = ""

    @property
    def center(self) -> tuple[float, float]:
        x, y, w, h = self.box
        return (x + w / 2, y + h / 2)

    def observe(self) -> ScreenElement:
        return ScreenElement(self.id, self.center, self.box, self.features)


@dataclass
class Screen:
    id: str
    title: str
    elements: list[UIElement] = field(default_factory=list)


@dataclass
class AppVersion:
    version: int
    screens: dict[str, Screen]
    entry_screen: str
    rng_seed: int

    def element(self, element_id: str) -> UIElement:
        screen_id = element_id.rsplit(".", 1)[0]
        for el in self.screens[screen_id].elements:
            if el.id == element_id:
                return el
        raise KeyError(element_id)

    def elements(self):
        for screen in self.screens.values():
            yield from screen.elements

    def labels(self) -> list[str]:
        return sorted(el.function_label for el in self.elements())

    def reachable(self, start: str | None = None) -> set[str]:
        start = start or self.entry_screen
        seen = {start}
        queue = deque([start])
        while queue:
            for el in self.screens[queue.popleft()].elements:
                if el.nav_target and el.nav_target not in seen:
                    seen.add(el.nav_target)
                    queue.append(el.nav_target)
        return seen

    def describe(self, element: UIElement) -> str:
        """Function description in the ``click <element> to <purpose>`` shape."""
        if element.nav_target:
            return f"click {element.function_label} to open {self.screens[element.nav_target].title}"
        return f"click {element.function_label} to use {element.function_label}"


@dataclass(frozen=True)
class AppSpec:
    n_screens: int = 10
    elements_per_screen: int = 6
    cross_links: int = 2


@dataclass(frozen=True)
class TaskSpec:
    intent: str
    goal_screen: str
    required_clicks: tuple[str, ...]
    arg_bindings: dict = field(default_factory=dict, hash=False)


class DriftKind(str, enum.Enum):
    APPEARANCE = "appearance"
    WORKFLOW = "workflow"


@dataclass(frozen=True)
class DriftOp:
    kind: DriftKind
    sigma: float = 0.0
    moves: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", DriftKind(self.kind))
        if self.kind is DriftKind.APPEARANCE and self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.kind is DriftKind.WORKFLOW and self.moves < 1:
            raise ValueError("workflow drift needs moves >= 1")

    @classmethod
    def appearance(cls, sigma: float) -> "DriftOp":
        return cls(DriftKind.APPEARANCE, sigma=sigma)

    @classmethod
    def workflow(cls, moves: int) -> "DriftOp":
        return cls(DriftKind.WORKFLOW, moves=moves)


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def label_anchor(label: str) -> np.ndarray:
    """Canonical feature direction of a function label."""
    rng = np.random.default_rng(token_hash(label))
    return _unit(rng.standard_normal(FEATURE_DIM))


def _element_features(label: str, rng: np.random.Generator) -> np.ndarray:
    noise = rng.standard_normal(FEATURE_DIM) / np.sqrt(FEATURE_DIM)
    return _unit(label_anchor(label) + ELEMENT_NOISE * noise)


def _box(slot: int) -> tuple[float, float, float, float]:
    return (10.0 + (slot % 2) * 180.0, 100.0 + (slot // 2) * 120.0, 160.0, 100.0)


def generate_app(spec: AppSpec, seed: int) -> AppVersion:
    n, per = spec.n_screens, spec.elements_per_screen
    if n < 1 or per < 1:
        raise DegenerateSpec("need at least one screen and one element per screen")
    has_input = per >= 3
    plain_slots = per - int(has_input)
    if n > 1 and plain_slots < 2:
        raise DegenerateSpec("multi-screen apps need at least two plain elements per screen")
    if n * plain_slots > len(vocab.LABELS):
        raise DegenerateSpec(f"vocabulary holds {len(vocab.LABELS)} labels, the app needs {n * plain_slots}")

    rng = np.random.default_rng(seed)
    ids = [f"s{i}" for i in range(n)]
    # random recursive tree; each screen keeps one slot that is never a child link
    children: dict[int, list[int]] = {i: [] for i in range(n)}
    for child in range(1, n):
        open_parents = [p for p in range(child) if len(children[p]) < plain_slots - 1]
        if not open_parents:
            raise DegenerateSpec("not enough navigation slots for the requested screens")
        children[int(rng.choice(open_parents))].append(child)

    labels = [str(x) for x in rng.permutation(sorted(vocab.LABELS))]
    input_names = sorted(vocab.INPUTS)
    plan: dict[int, list[tuple]] = {}
    for s in range(n):
        kinds = [("nav", c) for c in children[s]]
        kinds += [("action", None)] * (plain_slots - len(kinds))
        if has_input:
            kinds.append(("input", input_names[int(rng.integers(len(input_names)))]))
        order = rng.permutation(len(kinds))
        plan[s] = [kinds[i] for i in order]

    # cross links turn some action slots into extra edges
    action_slots = [(s, i) for s in range(n) for i, k in enumerate(plan[s]) if k[0] == "action"]
    if n > 1 and action_slots:
        picks = rng.permutation(len(action_slots))[: spec.cross_links]
        for p in sorted(picks):
            s, i = action_slots[p]
            target = int(rng.choice([t for t in range(n) if t != s]))
            plan[s][i] = ("link", target)

    titles = {0: "home"}
    screens: dict[str, Screen] = {}
    for s in range(n):
        elements = []
        for slot, (kind, arg) in enumerate(plan[s]):
            eid = f"{ids[s]}.e{slot}"
            if kind == "input":
                role = vocab.INPUTS[arg][0]
                el = UIElement(eid, arg, arg, _element_features(arg, rng), _box(slot), None, role)
            else:
                label = labels.pop()
                target = ids[arg] if kind in ("nav", "link") else None
                if kind == "nav":
                    titles[arg] = label
                el = UIElement(eid, label, vocab.LABELS[label][0], _element_features(label, rng), _box(slot), target)
            elements.append(el)
        screens[ids[s]] = Screen(ids[s], "", elements)
    for s in range(n):
        screens[ids[s]].title = titles[s]
    return AppVersion(0, screens, ids[0], int(seed))


def _tree_path(app: AppVersion, goal: str) -> list[UIElement] | None:
    """Shortest click path from the entry to ``goal``."""
    prev: dict[str, tuple[str, UIElement] | None] = {app.entry_screen: None}
    queue = deque([app.entry_screen])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            break
        for el in app.screens[cur].elements:
            if el.nav_target and el.nav_target not in prev:
                prev[el.nav_target] = (cur, el)
                queue.append(el.nav_target)
    if goal not in prev:
        return None
    path = []
    node = goal
    while prev[node] is not None:
        node, el = prev[node]
        path.append(el)
    return path[::-1]


def _input_on(screen: Screen) -> UIElement | None:
    for el in screen.elements:
        if el.role:
            return el
    return None


def generate_tasks(
    app: AppVersion, count: int, seed: int, per_category: int = 3, demos_per_category: int = 0
) -> tuple[list[TaskSpec], list[TaskSpec]]:
    """Tasks grouped in categories that share a click path and differ in the typed value.

    Returns (tasks, demos); demo values never reuse task values.  Tasks are
    interleaved across categories.
    """
    rng = np.random.default_rng(seed)
    eligible = []
    for sid in sorted(app.screens):
        if sid == app.entry_screen:
            continue
        path = _tree_path(app, sid)
        if path is None or len(path) < 2:
            continue
        holder = app.screens[_screen_of(app, path[-1])]
        field_el = _input_on(holder)
        if field_el is not None:
            eligible.append((sid, path, field_el))
    if not eligible:
        raise DegenerateSpec("app has no screen deep enough to host a typed task")

    n_cat = -(-count // per_category)
    need = per_category + demos_per_category
    order = [eligible[i] for i in rng.permutation(len(eligible))]
    buckets: list[list[TaskSpec]] = []
    demos: list[TaskSpec] = []
    used: dict[str, set] = {}
    i = 0
    # goals are reused round-robin while they still have unused argument values
    while len(buckets) < n_cat:
        live = [g for g in order if len(_free_values(g[2], used.get(g[0], set()))) >= need]
        if not live:
            raise DegenerateSpec(f"not enough argument values for {n_cat} task categories")
        goal, path, field_el = live[i % len(live)]
        i += 1
        values = _free_values(field_el, used.setdefault(goal, set()))
        picked = [str(v) for v in rng.choice(values, size=need, replace=False)]
        used[goal].update(picked)
        made = [_make_task(app, goal, path, field_el, v) for v in picked]
        buckets.append(made[:per_category])
        demos.extend(made[per_category:])
    tasks = [b[i] for i in range(per_category) for b in buckets][:count]
    return tasks, demos


def _free_values(field_el: UIElement, used: set) -> list[str]:
    return [v for v in vocab.INPUTS[field_el.function_label][1] if v not in used]


def _make_task(app: AppVersion, goal: str, path, field_el: UIElement, value: str) -> TaskSpec:
    return TaskSpec(
        INTENT_TEMPLATE.format(goal=app.screens[goal].title, value=value),
        goal,
        tuple(el.function_label for el in path),
        {field_el.role: value},
    )


def _screen_of(app: AppVersion, element: UIElement) -> str:
    return element.id.rsplit(".", 1)[0]


def solve_task(app: AppVersion, task: TaskSpec) -> list[UIElement] | None:
    """Shortest click sequence that completes a task, or None.

    Searches (screen, clicks matched so far) states so the required labels are
    clicked in order on the way to the goal.
    """
    need = task.required_clicks
    start = (app.entry_screen, 0)
    prev: dict[tuple, tuple | None] = {start: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        screen, done = state
        if screen == task.goal_screen and done == len(need):
            path = []
            while prev[state] is not None:
                state, el = prev[state]
                path.append(el)
            return path[::-1]
        for el in app.screens[screen].elements:
            if not el.nav_target:
                continue
            nxt = (el.nav_target, done + int(done < len(need) and el.function_label == need[done]))
            if nxt not in prev:
                prev[nxt] = (state, el)
                queue.append(nxt)
    return None


def demonstrate(app: AppVersion, task: TaskSpec) -> tuple[Trajectory, list[Triplet]]:
    """Scripted expert run: the solved click path, typing the argument before the last click."""
    path = solve_task(app, task)
    if path is None:
        raise ReachabilityLost(f"task {task.intent!r} is not completable")
    actions: list[Action] = []
    triplets: list[Triplet] = []
    last_screen = _screen_of(app, path[-1])
    for i, el in enumerate(path):
        here = _screen_of(app, el)
        if i == len(path) - 1:
            field_el = _input_on(app.screens[last_screen])
            if field_el is not None and field_el.role in task.arg_bindings:
                actions.append(Action(ActionKind.TYPE, field_el.function_label,
                                      task.arg_bindings[field_el.role], field_el.role))
        act = Action(ActionKind.CLICK, el.function_label)
        actions.append(act)
        triplets.append(click_triplet(app, here, el, act))
    return Trajectory(task.intent, tuple(actions), True), triplets


def click_triplet(app: AppVersion, screen_id: str, el: UIElement, action: Action) -> Triplet:
    return Triplet(
        pre_screen=screen_id,
        action=action,
        click_point=el.center,
        element_box=el.box,
        descriptor=PatchDescriptor(el.features),
        description=app.describe(el),
        post_screen=el.nav_target or screen_id,
    )


def task_completable(app: AppVersion, task: TaskSpec) -> bool:
    return solve_task(app, task) is not None


def _appearance(app: AppVersion, sigma: float, rng: np.random.Generator) -> None:
    if sigma == 0:
        return
    p_text = min(1.0, TEXT_DRIFT_RATE * sigma)
    for screen_id in sorted(app.screens):
        for el in app.screens[screen_id].elements:
            noise = rng.standard_normal(FEATURE_DIM) / np.sqrt(FEATURE_DIM)
            el.features = _unit(el.features + sigma * noise)
            if rng.random() < p_text:
                synonyms = _synonyms(el.function_label)
                el.display_text = str(synonyms[int(rng.integers(len(synonyms)))])


def _synonyms(label: str) -> tuple[str, ...]:
    if label in vocab.LABELS:
        return vocab.LABELS[label]
    for name, syn in (vocab.CONTINUE, vocab.DISMISS):
        if label == name:
            return syn
    return (label,)


def _workflow(app: AppVersion, moves: int, rng: np.random.Generator) -> None:
    edges = [
        el for sid in sorted(app.screens) for el in app.screens[sid].elements if el.nav_target
    ]
    if not edges:
        return
    picks = rng.permutation(len(edges))[:moves]
    prefix = f"v{app.version}p"
    base = sum(1 for sid in app.screens if sid.startswith(prefix))
    for j, p in enumerate(sorted(picks)):
        el = edges[p]
        sid = f"{prefix}{base + j}"
        target = el.nav_target
        go = UIElement(f"{sid}.e0", vocab.CONTINUE[0], vocab.CONTINUE[1][0],
                       _element_features(vocab.CONTINUE[0], rng), (0, 0, 0, 0), target)
        stay = UIElement(f"{sid}.e1", vocab.DISMISS[0], vocab.DISMISS[1][0],
                         _element_features(vocab.DISMISS[0], rng), (0, 0, 0, 0), app.entry_screen)
        pair = [go, stay] if rng.random() < 0.5 else [stay, go]
        for slot, item in enumerate(pair):
            item.id = f"{sid}.e{slot}"
            item.box = _box(slot)
        app.screens[sid] = Screen(sid, el.function_label, pair)
        el.nav_target = sid


def apply_drift(app: AppVersion, ops, seed: int, tasks=()) -> AppVersion:
    """Next app version under ``ops``; verifies every task stays completable."""
    for attempt in range(MAX_DRIFT_RETRIES):
        new = copy.deepcopy(app)
        new.version = app.version + 1
        rng = np.random.default_rng([int(seed), new.version, attempt])
        for op in ops:
            if op.kind is DriftKind.APPEARANCE:
                _appearance(new, op.sigma, rng)
            else:
                _workflow(new, op.moves, rng)
        ok = new.reachable() >= app.reachable() and all(task_completable(new, t) for t in tasks)
        if ok:
            return new
    raise ReachabilityLost(f"drift kept breaking reachability after {MAX_DRIFT_RETRIES} tries")
