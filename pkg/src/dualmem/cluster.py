"""Instruction clustering: threshold similarity graph + maximal cliques."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .embed import EmbeddingProvider, default_provider
from .errors import DuplicateId, GraphTooLarge

DEFAULT_TAU = 0.85
MAX_NODES = 5000


@dataclass(frozen=True)
class SimilarityGraph:
    node_ids: tuple
    edges: frozenset = frozenset()
    tau: float = DEFAULT_TAU

    def __post_init__(self):
        nodes = set(self.node_ids)
        if len(nodes) != len(self.node_ids):
            raise DuplicateId("graph node ids must be unique")
        for edge in self.edges:
            if len(edge) != 2 or not edge <= nodes:
                raise ValueError(f"bad edge {set(edge)}")

    def neighbors(self) -> dict:
        adj = {n: set() for n in self.node_ids}
        for edge in self.edges:
            a, b = tuple(edge)
            adj[a].add(b)
            adj[b].add(a)
        return adj

    @classmethod
    def from_pairs(cls, node_ids: Iterable, pairs: Iterable[tuple], tau: float = DEFAULT_TAU):
        return cls(tuple(node_ids), frozenset(frozenset(p) for p in pairs), tau)


@dataclass(frozen=True)
class Cluster:
    member_ids: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "member_ids", frozenset(self.member_ids))
        if not self.member_ids:
            raise ValueError("cluster must be nonempty")

    def __len__(self):
        return len(self.member_ids)

    def __iter__(self):
        return iter(sorted(self.member_ids, key=_order))

    def __contains__(self, item):
        return item in self.member_ids


def _sort_key(cluster: Cluster):
    return (-len(cluster), sorted(_order(m) for m in cluster.member_ids))


def build_similarity_graph(
    instructions: Sequence[tuple[Hashable, str]],
    provider: EmbeddingProvider | None = None,
    tau: float = DEFAULT_TAU,
) -> SimilarityGraph:
    """Connect every pair of instructions whose embedding cosine exceeds ``tau``."""
    provider = provider or default_provider()
    ids = [i for i, _ in instructions]
    if len(set(ids)) != len(ids):
        raise DuplicateId("instruction ids must be unique")
    if not ids:
        return SimilarityGraph((), frozenset(), tau)
    vecs = np.stack([np.asarray(provider.embed(text), dtype=float) for _, text in instructions])
    unit = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    sims = np.clip(unit @ unit.T, -1.0, 1.0)
    rows, cols = np.nonzero(np.triu(sims > tau, k=1))
    edges = frozenset(frozenset((ids[r], ids[c])) for r, c in zip(rows, cols))
    return SimilarityGraph(tuple(ids), edges, tau)


def maximal_cliques(graph: SimilarityGraph, max_nodes: int = MAX_NODES) -> list[Cluster]:
    """All maximal cliques, sorted by (size desc, sorted members asc).

    Bron-Kerbosch with Tomita pivoting; isolated nodes come out as singletons.
    """
    if len(graph.node_ids) > max_nodes:
        raise GraphTooLarge(f"{len(graph.node_ids)} nodes exceeds guard of {max_nodes}")
    adj = graph.neighbors()
    found: list[Cluster] = []
    if not adj:
        return found

    # explicit stack keeps deep recursion off the interpreter stack
    stack = [(frozenset(), set(adj), set())]
    while stack:
        r, p, x = stack.pop()
        if not p and not x:
            found.append(Cluster(r))
            continue
        pivot = max(p | x, key=lambda u: (len(p & adj[u]), _order(u)))
        for v in sorted(p - adj[pivot], key=_order):
            stack.append((r | {v}, p & adj[v], x & adj[v]))
            p = p - {v}
            x = x | {v}
    found.sort(key=_sort_key)
    return found


def _order(node):
    # sortable key for mixed-type ids
    return (type(node).__name__, node)


def cluster_instructions(
    instructions: Sequence[tuple[Hashable, str]],
    provider: EmbeddingProvider | None = None,
    tau: float = DEFAULT_TAU,
) -> list[Cluster]:
    return maximal_cliques(build_similarity_graph(instructions, provider, tau))
