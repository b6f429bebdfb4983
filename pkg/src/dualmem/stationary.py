"""Element-function memory.

Each memory entry is keyed by a function description (``click X to Y``) and
holds an :class:`ElementRecord` whose visual variants each keep their own
usage metadata.  New observations are routed by :func:`upsert_element`.  A
matching description with a near-identical patch is discarded, and one with a
new look appends a variant.  An unmatched description creates a record.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .embed import cosine
from .errors import DataError, NoMatch
from .memstore import INITIAL, MemoryStore, RetrievalConfig, retention
from .procedural import Action, ActionKind

FEATURE_DIM = 16
THETA_MATCH = 0.90
THETA_DUP = 0.95
K_ICONS = 3


class PatchDescriptor:
    """Visual feature vector plus an optional raw patch blob that is never interpreted."""

    __slots__ = ("features", "blob")

    def __init__(self, features, blob: bytes | None = None):
        feats = np.array(features, dtype=float)
        if feats.ndim != 1 or feats.size == 0:
            raise DataError("features must be a nonempty 1-d vector")
        if not np.all(np.isfinite(feats)):
            raise DataError("features must be finite")
        if np.linalg.norm(feats) == 0.0:
            raise DataError("features must have positive norm")
        feats.setflags(write=False)
        self.features = feats
        self.blob = None if blob is None else bytes(blob)

    def __eq__(self, other):
        if not isinstance(other, PatchDescriptor):
            return NotImplemented
        return np.array_equal(self.features, other.features) and self.blob == other.blob

    def __repr__(self):
        blob = "" if self.blob is None else f", blob={len(self.blob)}B"
        return f"PatchDescriptor(dim={self.features.size}{blob})"


@dataclass
class PatchVariant:
    descriptor: PatchDescriptor
    created_seq: int
    last_access: int
    count: int = 1
    origin: str = INITIAL


@dataclass
class ElementRecord:
    description: str
    variants: list[PatchVariant] = field(default_factory=list)

    def __post_init__(self):
        if not self.variants:
            raise DataError("an element record needs at least one variant")


@dataclass
class Triplet:
    pre_screen: str
    action: Action
    click_point: tuple[float, float]
    element_box: tuple[float, float, float, float]
    descriptor: PatchDescriptor
    description: str
    post_screen: str

    def validate(self) -> None:
        if self.action.kind is not ActionKind.CLICK:
            raise DataError(f"triplet action must be a click, got {self.action.kind.value}")
        x, y, w, h = self.element_box
        cx, cy = self.click_point
        if w < 0 or h < 0:
            raise DataError("negative box size")
        if not (x <= cx <= x + w and y <= cy <= y + h):
            raise DataError(f"click {self.click_point} outside box {self.element_box}")
        if not self.description.strip():
            raise DataError("empty description")


class Outcome(str, enum.Enum):
    CREATED = "created"
    APPENDED = "appended"
    DISCARDED = "discarded"


@dataclass
class IngestReport:
    created: int = 0
    appended: int = 0
    discarded: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    def tally(self, outcome: Outcome) -> None:
        setattr(self, outcome.value, getattr(self, outcome.value) + 1)


class ElementHit(NamedTuple):
    description: str
    descriptor: PatchDescriptor
    record_id: int
    variant_index: int
    origin: str


class ScreenElement(NamedTuple):
    id: object
    center: tuple[float, float]
    box: tuple[float, float, float, float]
    features: np.ndarray


class GroundingHint(NamedTuple):
    anchor_id: object
    hint_box: tuple[float, float, float, float]
    score: float


def best_match(store: MemoryStore, description: str):
    """Most description-similar record as (similarity, entry), or None; read-only."""
    entries, sims = store.similarities(description)
    if not entries:
        return None
    best = max(range(len(entries)), key=lambda i: (sims[i], -entries[i].id))
    return float(sims[best]), entries[best]


def upsert_element(
    store: MemoryStore,
    description: str,
    patch: PatchDescriptor,
    theta_match: float = THETA_MATCH,
    theta_dup: float = THETA_DUP,
    origin: str = INITIAL,
) -> Outcome:
    match = best_match(store, description)
    if match is not None and match[0] >= theta_match:
        record: ElementRecord = match[1].payload
        for variant in record.variants:
            if cosine(variant.descriptor.features, patch.features) >= theta_dup:
                return Outcome.DISCARDED
        record.variants.append(
            PatchVariant(patch, store.allocate_seq(), store.global_counter, 1, origin)
        )
        return Outcome.APPENDED
    # the record and its first variant share one creation event
    first = PatchVariant(patch, store.next_seq, store.global_counter, 1, origin)
    store.insert(description, ElementRecord(description, [first]), origin)
    return Outcome.CREATED


def ingest_triplets(
    store: MemoryStore,
    triplets: Sequence[Triplet],
    theta_match: float = THETA_MATCH,
    theta_dup: float = THETA_DUP,
    origin: str = INITIAL,
) -> IngestReport:
    report = IngestReport()
    for index, triplet in enumerate(triplets):
        try:
            triplet.validate()
            outcome = upsert_element(
                store, triplet.description, triplet.descriptor, theta_match, theta_dup, origin
            )
        except DataError as exc:
            report.errors.append((index, str(exc)))
            continue
        report.tally(outcome)
    return report


def variant_order(record: ElementRecord, c_global: int) -> list[int]:
    """Variant indices by (retention desc, creation desc, index asc)."""
    return sorted(
        range(len(record.variants)),
        key=lambda i: (
            -retention(record.variants[i], c_global),
            -record.variants[i].created_seq,
            i,
        ),
    )


def retrieve_elements(
    store: MemoryStore,
    subtask: str,
    config: RetrievalConfig | None = None,
    variants_per_record: int = 1,
) -> list[ElementHit]:
    before = store.global_counter
    entries = store.retrieve(subtask, config)
    now = store.global_counter
    hits = []
    for snap in entries:
        record: ElementRecord = store.get(snap.id).payload
        for idx in variant_order(record, before)[:variants_per_record]:
            variant = record.variants[idx]
            variant.last_access = now
            variant.count += 1
            hits.append(ElementHit(record.description, variant.descriptor, snap.id, idx, variant.origin))
    return hits


def _union(boxes):
    x0 = min(b[0] for b in boxes)
    y0 = min(b[1] for b in boxes)
    x1 = max(b[0] + b[2] for b in boxes)
    y1 = max(b[1] + b[3] for b in boxes)
    return (x0, y0, x1 - x0, y1 - y0)


def grounding_hint(
    screen_elements: Sequence,
    patch: PatchDescriptor,
    k: int = K_ICONS,
    floor: float = 0.0,
) -> GroundingHint:
    """Locate the best-matching element and box its ``k`` nearest neighbours."""
    if not screen_elements:
        raise DataError("no screen elements")
    if k < 1:
        raise ValueError("k must be >= 1")
    elements = [ScreenElement(*e) for e in screen_elements]
    scored = [(cosine(e.features, patch.features), e) for e in elements]
    score, anchor = min(scored, key=lambda se: (-se[0], _order(se[1].id)))
    if score < floor:
        raise NoMatch(f"best feature cosine {score:.3f} below floor {floor}")
    ax, ay = anchor.center
    nearest = sorted(
        elements,
        key=lambda e: (float(np.hypot(e.center[0] - ax, e.center[1] - ay)), _order(e.id)),
    )[:k]
    return GroundingHint(anchor.id, _union([e.box for e in nearest]), score)


def _order(ident):
    return (type(ident).__name__, ident)
