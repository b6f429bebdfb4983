"""Evolving memory store with retention-ranked two-stage retrieval.

Every entry carries a creation sequence number, the value of the store's
global retrieval counter at its last access, and a retrieval count.  A
retrieval event filters the top-N entries by key similarity, ranks those by
``exp(-gap / count)`` (newer entries first on ties), returns the top-K and
then advances the counter once and refreshes only the returned entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterator

import numpy as np

from .embed import EmbeddingProvider, cosine_many, default_provider
from .errors import CounterRegression, ProviderMismatch

INITIAL = "initial"
ONLINE = "online"


@dataclass
class MemoryEntry:
    id: int
    key: str
    key_embedding: np.ndarray = field(repr=False)
    payload: Any
    created_seq: int
    last_access: int
    count: int = 1
    origin: str = INITIAL


@dataclass(frozen=True)
class RetrievalConfig:
    n_candidates: int = 20
    k_results: int = 3
    min_similarity: float | None = None

    def __post_init__(self):
        if self.n_candidates < 1 or self.k_results < 1:
            raise ValueError("N and K must be >= 1")
        if self.k_results > self.n_candidates:
            raise ValueError(f"K={self.k_results} exceeds N={self.n_candidates}")


@dataclass(frozen=True)
class Candidate:
    """A stage-1 survivor with its scores, as seen before any update."""

    entry: MemoryEntry
    similarity: float
    retention: float


@dataclass(frozen=True)
class StoreStats:
    count: int
    c_global: int
    histogram: tuple[int, ...]
    bin_edges: tuple[float, ...]


def retention_score(gap: int, count: int) -> float:
    return math.exp(-gap / count)


def retention(entry, c_global: int) -> float:
    """Retention of anything with ``last_access`` and ``count`` at counter ``c_global``."""
    if c_global < entry.last_access:
        raise CounterRegression(f"counter {c_global} precedes last access {entry.last_access}")
    if entry.count < 1:
        raise ValueError("count must be >= 1")
    return retention_score(c_global - entry.last_access, entry.count)


def stage2_key(retention_value: float, created_seq: int, ident: int):
    return (-retention_value, -created_seq, ident)


class MemoryStore:
    """Single-writer store: one mutating call (insert/retrieve) at a time."""

    def __init__(self, provider: EmbeddingProvider | None = None):
        self.provider = provider or default_provider()
        self.global_counter = 0
        self.next_seq = 0
        self.next_id = 0
        self._entries: dict[int, MemoryEntry] = {}
        self._matrix: np.ndarray | None = None

    @property
    def provider_name(self) -> str:
        return self.provider.name

    @property
    def dim(self) -> int:
        return self.provider.dim

    def __len__(self):
        return len(self._entries)

    def __iter__(self) -> Iterator[MemoryEntry]:
        return iter(sorted(self._entries.values(), key=lambda e: e.created_seq))

    def __contains__(self, entry_id):
        return entry_id in self._entries

    def get(self, entry_id: int) -> MemoryEntry:
        return self._entries[entry_id]

    def allocate_seq(self) -> int:
        seq = self.next_seq
        self.next_seq += 1
        return seq

    def insert(self, key: str, payload: Any, origin: str = INITIAL) -> int:
        emb = self.provider.embed(key)
        entry = MemoryEntry(
            id=self.next_id,
            key=key,
            key_embedding=emb,
            payload=payload,
            created_seq=self.allocate_seq(),
            last_access=self.global_counter,
            count=1,
            origin=origin,
        )
        self.next_id += 1
        self._entries[entry.id] = entry
        self._matrix = None
        return entry.id

    def restore(self, entry: MemoryEntry) -> None:
        """Put back a fully specified entry (used by the loader)."""
        if entry.id in self._entries:
            raise ValueError(f"duplicate entry id {entry.id}")
        self._entries[entry.id] = entry
        self._matrix = None

    def rebind(self, provider: EmbeddingProvider) -> None:
        """Swap the provider, re-embedding every key."""
        for entry in self._entries.values():
            entry.key_embedding = provider.embed(entry.key)
        self.provider = provider
        self._matrix = None

    def similarities(self, query: str) -> tuple[list[MemoryEntry], np.ndarray]:
        entries = list(self._entries.values())
        if not entries:
            self.provider.embed(query)  # still validate the query
            return entries, np.zeros(0)
        if self._matrix is None:
            self._matrix = np.stack([e.key_embedding for e in entries])
        q = self.provider.embed(query)
        if q.shape[0] != self._matrix.shape[1]:
            raise ProviderMismatch("query and key embeddings differ in dimension")
        return entries, cosine_many(q, self._matrix)

    def candidates(self, query: str, config: RetrievalConfig | None = None) -> list[Candidate]:
        """Stages 1 and 2 without side effects: the ranked top-N survivors."""
        config = config or RetrievalConfig()
        entries, sims = self.similarities(query)
        pool = [(float(s), e) for s, e in zip(sims, entries)]
        if config.min_similarity is not None:
            pool = [(s, e) for s, e in pool if s >= config.min_similarity]
        pool.sort(key=lambda se: (-se[0], se[1].id))
        pool = pool[: config.n_candidates]
        ranked = [Candidate(e, s, retention(e, self.global_counter)) for s, e in pool]
        ranked.sort(key=lambda c: stage2_key(c.retention, c.entry.created_seq, c.entry.id))
        return ranked

    def retrieve(self, query: str, config: RetrievalConfig | None = None) -> list[MemoryEntry]:
        config = config or RetrievalConfig()
        chosen = self.candidates(query, config)[: config.k_results]
        if not chosen:
            return []
        self.global_counter += 1
        out = []
        for cand in chosen:
            entry = cand.entry
            entry.last_access = self.global_counter
            entry.count += 1
            out.append(replace(entry))
        return out

    def stats(self, bins: int = 10) -> StoreStats:
        values = [retention(e, self.global_counter) for e in self._entries.values()]
        hist, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
        return StoreStats(
            count=len(self._entries),
            c_global=self.global_counter,
            histogram=tuple(int(h) for h in hist),
            bin_edges=tuple(float(x) for x in edges),
        )


def insert(store: MemoryStore, key: str, payload: Any, origin: str = INITIAL) -> int:
    return store.insert(key, payload, origin)


def retrieve(store: MemoryStore, query: str, config: RetrievalConfig | None = None):
    return store.retrieve(query, config)


def stats(store: MemoryStore) -> StoreStats:
    return store.stats()
