"""Retention-ranked retrieval on a tiny store.

Stage 1 keeps the N most similar keys; stage 2 orders only those by
retention, so N (or a similarity floor) decides what can compete at all.

Run: python3 demos/memory_basics.py
"""

from dualmem.memstore import MemoryStore, RetrievalConfig


def show(store, query, config):
    print(f"\nquery {query!r}, counter {store.global_counter}")
    for c in store.candidates(query, config):
        e = c.entry
        print(f"  id={e.id} sim={c.similarity:.3f} R={c.retention:.3f} seq={e.created_seq} n={e.count}  {e.key}")


store = MemoryStore()
for key in ["open mail", "open mail app", "check the weather", "play music"]:
    store.insert(key, payload=None)

# only the two mail entries survive stage 1
config = RetrievalConfig(n_candidates=2, k_results=1)
for _ in range(3):
    show(store, "open mail", config)
    store.retrieve("open mail", config)

# unrelated traffic ages both mail entries, but the frequently used one decays slower
for _ in range(4):
    store.retrieve("check the weather", config)
show(store, "open mail", config)
