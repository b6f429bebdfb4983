"""Cluster instructions, abstract a workflow, then reuse it for a new task.

Run: python3 demos/workflow_abstraction.py
"""

from dualmem.cluster import cluster_instructions
from dualmem.memstore import MemoryStore, RetrievalConfig
from dualmem.procedural import (
    Action, ActionKind, Trajectory, build_procedural_memory, instantiate, retrieve_workflows,
)

CLICK, TYPE = ActionKind.CLICK, ActionKind.TYPE


def install(app):
    return Trajectory(f"install {app} from the store", [
        Action(CLICK, "store icon"),
        Action(CLICK, "search field"),
        Action(TYPE, "search field", app, "AppName"),
        Action(CLICK, "install button"),
    ])


trajectories = {
    0: install("maps"),
    1: install("zoom"),
    2: Trajectory("check the weather", [Action(CLICK, "weather"), Action(CLICK, "today"), Action(CLICK, "close")]),
}
clusters = cluster_instructions([(i, t.instruction) for i, t in trajectories.items()], tau=0.7)
print("clusters:", [sorted(c.member_ids) for c in clusters])

store = MemoryStore()
build_procedural_memory(store, trajectories, clusters)
for entry in store:
    print(f"\nworkflow {entry.payload.name!r}")
    for step in entry.payload.steps:
        print("  ", step)

# with every workflow in stage 1, the newer one wins the retention tie
unfiltered = retrieve_workflows(store, "install slack from the store")
print("\nunfiltered top:", unfiltered[0].name)

(wf,) = retrieve_workflows(store, "install slack from the store", RetrievalConfig(20, 1, min_similarity=0.5))
print("\nplan for slack:")
for step in instantiate(wf, {"AppName": "slack"}):
    print("  ", step)
