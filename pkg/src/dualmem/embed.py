"""Text embedding behind a small provider seam.

The built-in provider is a bag of hashed tokens: text is lowercased, split on
non-alphanumerics, each token is hashed with keyed BLAKE2b (64-bit digest,
key = ``HASH_SEED`` as 8 little-endian bytes) into one of ``dim`` buckets,
bucket counts are accumulated and the vector is L2-normalized.
"""

from __future__ import annotations

import hashlib
import re
from functools import lru_cache
from typing import Protocol, runtime_checkable

import numpy as np

from .errors import DimensionMismatch, EmptyText, ZeroVector

DEFAULT_DIM = 64
HASH_SEED = 0x6D656D6F72793031  # b"memory01" read as a big-endian integer

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")


@runtime_checkable
class EmbeddingProvider(Protocol):
    name: str
    dim: int

    def embed(self, text: str) -> np.ndarray: ...


def tokenize(text: str) -> list[str]:
    return [tok for tok in _TOKEN_SPLIT.split(text.lower()) if tok]


def token_hash(token: str, seed: int = HASH_SEED) -> int:
    """Stable unsigned 64-bit hash of a token."""
    digest = hashlib.blake2b(
        token.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")
    ).digest()
    return int.from_bytes(digest, "little")


class HashEmbedder:
    """Deterministic bag-of-hashed-tokens embedder."""

    def __init__(self, dim: int = DEFAULT_DIM, seed: int = HASH_SEED):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self.seed = int(seed)
        self.name = "hashbag-v1" if seed == HASH_SEED else f"hashbag-v1-{seed:x}"
        self._cached = lru_cache(maxsize=65536)(self._embed)

    def __repr__(self):
        return f"HashEmbedder(dim={self.dim}, name={self.name!r})"

    def bucket(self, token: str) -> int:
        return token_hash(token, self.seed) % self.dim

    def _embed(self, text: str) -> np.ndarray:
        tokens = tokenize(text)
        if not tokens:
            raise EmptyText(f"no alphanumeric token in {text!r}")
        vec = np.zeros(self.dim)
        for tok in tokens:
            vec[self.bucket(tok)] += 1.0
        vec /= np.linalg.norm(vec)
        vec.setflags(write=False)
        return vec

    def embed(self, text: str) -> np.ndarray:
        # cached vectors are shared, hence read-only
        return self._cached(text)


_default = HashEmbedder()


def default_provider() -> HashEmbedder:
    return _default


def embed_text(text: str, provider: EmbeddingProvider | None = None) -> np.ndarray:
    return (provider or _default).embed(text)


def cosine(a, b) -> float:
    """Cosine similarity of two nonzero vectors of equal length."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroVector("cosine of an all-zero vector is undefined")
    value = float(np.dot(a, b) / (na * nb))
    return min(1.0, max(-1.0, value))


def cosine_many(query: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    """Cosine of ``query`` against every row of ``matrix`` (rows assumed nonzero)."""
    if matrix.shape[0] == 0:
        return np.zeros(0)
    if matrix.shape[1] != query.shape[0]:
        raise DimensionMismatch(f"{query.shape[0]} vs {matrix.shape[1]}")
    norms = np.linalg.norm(matrix, axis=1) * np.linalg.norm(query)
    return np.clip(matrix @ query / norms, -1.0, 1.0)
