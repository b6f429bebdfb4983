"""Dual memory for GUI agents: procedural workflows plus stationary element patches."""

from .cluster import Cluster, SimilarityGraph, build_similarity_graph, cluster_instructions, maximal_cliques
from .embed import HashEmbedder, cosine, default_provider, embed_text
from .errors import DataError, DualMemError, NoMatch, ReachabilityLost
from .memstore import MemoryEntry, MemoryStore, RetrievalConfig, retention_score
from .procedural import (
    Action,
    ActionKind,
    Trajectory,
    Workflow,
    abstract_workflows,
    build_procedural_memory,
    instantiate,
    retrieve_workflows,
)
from .stationary import (
    ElementRecord,
    PatchDescriptor,
    PatchVariant,
    Triplet,
    grounding_hint,
    ingest_triplets,
    retrieve_elements,
    upsert_element,
)

__version__ = "0.1.0"

__all__ = [
    "Action", "ActionKind", "Cluster", "DataError", "DualMemError", "ElementRecord", "HashEmbedder",
    "MemoryEntry", "MemoryStore", "NoMatch", "PatchDescriptor", "PatchVariant", "ReachabilityLost",
    "RetrievalConfig", "SimilarityGraph", "Trajectory", "Triplet", "Workflow", "abstract_workflows",
    "build_procedural_memory", "build_similarity_graph", "cluster_instructions", "cosine",
    "default_provider", "embed_text", "grounding_hint", "ingest_triplets", "instantiate",
    "maximal_cliques", "retention_score", "retrieve_elements", "retrieve_workflows", "upsert_element",
]
