"""Workflow memory: placeholder templates abstracted from aligned trajectories.

Step rendering per action kind:

    click        Tap <target>
    type         Type <arg> into <target>      (Type <arg> without a target)
    scroll       Scroll <arg> on <target>      (Scroll <arg> without a target)
    press_home   Press home
    press_back   Press back
    press_enter  Press enter
    stop         Stop with status <arg>        (Stop without an argument)

Abstraction is strict positional alignment: every member of a cluster must
have the same length (at least 3) and the same (kind, target) at each
position.  Positions whose argument differs across members become a
``[Role]`` placeholder; agreeing literals are kept verbatim.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import EmptyCluster, InvalidWorkflow, UnboundPlaceholder, UnsuccessfulTrajectory
from .memstore import INITIAL, MemoryStore, RetrievalConfig

MIN_STEPS = 3
PLACEHOLDER = re.compile(r"\[([A-Z][A-Za-z0-9]*)\]")
_ROLE = re.compile(r"[A-Z][A-Za-z0-9]*")


class ActionKind(str, enum.Enum):
    CLICK = "click"
    TYPE = "type"
    SCROLL = "scroll"
    PRESS_HOME = "press_home"
    PRESS_BACK = "press_back"
    PRESS_ENTER = "press_enter"
    STOP = "stop"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    target_label: str = ""
    argument: str = ""
    arg_role: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", ActionKind(self.kind))
        if self.kind is ActionKind.CLICK and not self.target_label:
            raise ValueError("click needs a target label")
        if self.kind is ActionKind.TYPE and not self.argument:
            raise ValueError("type needs an argument")


@dataclass(frozen=True)
class Trajectory:
    instruction: str
    actions: tuple[Action, ...]
    success: bool = True

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(self.actions))
        if not self.actions:
            raise ValueError("trajectory needs at least one action")


def check_template(text: str) -> None:
    """Reject brackets that are not well-formed ``[UpperCamel]`` placeholders."""
    stripped = PLACEHOLDER.sub("", text)
    if "[" in stripped or "]" in stripped:
        raise InvalidWorkflow(f"malformed placeholder in {text!r}")


def placeholders(text: str) -> list[str]:
    return PLACEHOLDER.findall(text)


@dataclass(frozen=True)
class Workflow:
    name: str
    steps: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if not self.name.strip():
            raise InvalidWorkflow("workflow name is empty")
        if len(self.steps) < MIN_STEPS:
            raise InvalidWorkflow(f"workflow needs >= {MIN_STEPS} steps, got {len(self.steps)}")
        for step in self.steps:
            check_template(step)

    @property
    def placeholders(self) -> list[str]:
        seen: dict[str, None] = {}
        for step in self.steps:
            for name in placeholders(step):
                seen.setdefault(name)
        return list(seen)


def render_step(action: Action, argument: str | None = None) -> str:
    arg = action.argument if argument is None else argument
    target = action.target_label
    kind = action.kind
    if kind is ActionKind.CLICK:
        return f"Tap {target}"
    if kind is ActionKind.TYPE:
        return f"Type {arg} into {target}" if target else f"Type {arg}"
    if kind is ActionKind.SCROLL:
        return f"Scroll {arg} on {target}" if target else f"Scroll {arg}"
    if kind is ActionKind.STOP:
        return f"Stop with status {arg}" if arg else "Stop"
    return {
        ActionKind.PRESS_HOME: "Press home",
        ActionKind.PRESS_BACK: "Press back",
        ActionKind.PRESS_ENTER: "Press enter",
    }[kind]


def _placeholder_names(columns: Sequence[tuple[str, ...]], roles: Sequence[str]) -> list[str | None]:
    """Name each varying column; reuse a name only for identical value columns."""
    names: list[str | None] = []
    taken: dict[str, tuple[str, ...]] = {}
    for pos, (values, role) in enumerate(zip(columns, roles)):
        if len(set(values)) < 2:
            names.append(None)
            continue
        base = role if _ROLE.fullmatch(role or "") else f"Arg{pos + 1}"
        name, suffix = base, 1
        while name in taken and taken[name] != values:
            suffix += 1
            name = f"{base}{suffix}"
        taken[name] = values
        names.append(name)
    return names


def abstract_workflows(cluster_trajectories: Sequence[Trajectory]) -> list[Workflow]:
    """Abstract one workflow from an aligned cluster, or nothing."""
    if not cluster_trajectories:
        raise EmptyCluster("cannot abstract an empty cluster")
    for traj in cluster_trajectories:
        if not traj.success:
            raise UnsuccessfulTrajectory(traj.instruction)

    length = len(cluster_trajectories[0].actions)
    if length < MIN_STEPS or any(len(t.actions) != length for t in cluster_trajectories):
        return []
    shape = [(a.kind, a.target_label) for a in cluster_trajectories[0].actions]
    for traj in cluster_trajectories[1:]:
        if [(a.kind, a.target_label) for a in traj.actions] != shape:
            return []

    reference = min(cluster_trajectories, key=lambda t: t.instruction)
    columns = [tuple(t.actions[i].argument for t in cluster_trajectories) for i in range(length)]
    roles = [a.arg_role for a in reference.actions]
    names = _placeholder_names(columns, roles)

    steps = []
    spans: dict[str, str] = {}
    for action, ph in zip(reference.actions, names):
        if ph is None:
            steps.append(render_step(action))
            continue
        steps.append(render_step(action, f"[{ph}]"))
        if action.argument:
            spans.setdefault(action.argument, f"[{ph}]")
    name = reference.instruction
    if spans:
        # one pass, longest literal first, so inserted placeholders are never rewritten
        pattern = re.compile("|".join(re.escape(s) for s in sorted(spans, key=len, reverse=True)))
        name = pattern.sub(lambda m: spans[m.group(0)], name)
    try:
        return [Workflow(name, steps)]
    except InvalidWorkflow:
        # literal text carrying stray brackets cannot form a template
        return []


def bindings_for(workflow: Workflow, trajectory: Trajectory) -> dict[str, str]:
    """Recover placeholder values a trajectory supplies for an aligned workflow."""
    out = {}
    for step, action in zip(workflow.steps, trajectory.actions):
        for ph in placeholders(step):
            out[ph] = action.argument
    return out


def instantiate(workflow: Workflow, bindings: Mapping[str, str]) -> list[str]:
    missing = [p for p in workflow.placeholders if p not in bindings]
    if missing:
        raise UnboundPlaceholder(*missing)
    return [PLACEHOLDER.sub(lambda m: bindings[m.group(1)], step) for step in workflow.steps]


def record_workflow(store: MemoryStore, workflow: Workflow, origin: str = INITIAL) -> int:
    if not isinstance(workflow, Workflow):
        raise TypeError("expected a Workflow")
    return store.insert(workflow.name, workflow, origin)


def retrieve_workflows(
    store: MemoryStore, instruction: str, config: RetrievalConfig | None = None
) -> list[Workflow]:
    return [entry.payload for entry in store.retrieve(instruction, config)]


def build_procedural_memory(
    store: MemoryStore,
    trajectories: Mapping,
    clusters: Iterable,
    origin: str = INITIAL,
) -> list[int]:
    """Abstract every cluster independently and record what aligns.

    ``trajectories`` maps instruction id to Trajectory; ``clusters`` yields
    collections of those ids.
    """
    ids = []
    for cluster in clusters:
        members = [trajectories[i] for i in sorted(cluster, key=str) if trajectories[i].success]
        if not members:
            continue
        for wf in abstract_workflows(members):
            ids.append(record_workflow(store, wf, origin))
    return ids
