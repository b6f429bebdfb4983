import numpy as np
import pytest
from hypothesis import given, strategies as st

from dualmem.embed import DEFAULT_DIM, HashEmbedder, cosine, embed_text, tokenize
from dualmem.errors import DimensionMismatch, EmptyText, ZeroVector

words = st.text(alphabet="abcdefghij0123", min_size=1, max_size=6)
texts = st.lists(words, min_size=1, max_size=6).map(" ".join)
vectors = st.lists(st.floats(-10, 10), min_size=4, max_size=4).filter(
    lambda v: np.linalg.norm(v) > 1e-3
)


def test_deterministic():
    assert np.array_equal(embed_text("open settings"), embed_text("open settings"))
    assert np.array_equal(HashEmbedder().embed("open settings"), embed_text("open settings"))


def test_pure_repetition_collapses():
    assert np.array_equal(embed_text("a a"), embed_text("a"))


def test_paraphrase_cosine():
    # frozen from an independent keyed-BLAKE2b bag computation: 3 / sqrt(3 * 4)
    value = cosine(embed_text("tap search icon"), embed_text("tap the search icon"))
    assert value == pytest.approx(0.8660254037844387, abs=1e-12)
    assert value >= 0.8


def test_unit_norm_and_dim():
    v = embed_text("Hello, World! 42")
    assert v.shape == (DEFAULT_DIM,)
    assert np.all(np.isfinite(v))
    assert abs(np.linalg.norm(v) - 1.0) <= 1e-6


def test_tokenize_rules():
    assert tokenize("Tap  the SEARCH-icon!") == ["tap", "the", "search", "icon"]


def test_cosine_examples():
    v = np.array([0.3, -2.0, 5.0])
    assert cosine(v, v) == pytest.approx(1.0, abs=1e-12)
    assert cosine((1, 0), (0, 1)) == 0.0
    assert cosine((0.6, 0.8), (0.8, 0.6)) == pytest.approx(0.96, abs=1e-12)


def test_errors():
    with pytest.raises(EmptyText):
        embed_text("  ,;!  ")
    with pytest.raises(DimensionMismatch):
        cosine((1, 0), (1, 0, 0))
    with pytest.raises(ZeroVector):
        cosine((0, 0), (1, 0))


def test_seed_changes_provider_name():
    assert HashEmbedder().name == "hashbag-v1"
    assert HashEmbedder(seed=1).name != "hashbag-v1"
    with pytest.raises(ValueError):
        HashEmbedder(dim=0)


def test_cached_vectors_are_read_only():
    with pytest.raises(ValueError):
        embed_text("open settings")[0] = 1.0


@given(texts)
def test_embed_is_pure(text):
    assert np.array_equal(embed_text(text), embed_text(text))


@given(vectors, vectors)
def test_cosine_symmetric(a, b):
    assert abs(cosine(a, b) - cosine(b, a)) <= 1e-12


@given(vectors, vectors, st.floats(1e-3, 1e3))
def test_cosine_scale_invariant(a, b, alpha):
    assert abs(cosine(alpha * np.array(a), b) - cosine(a, b)) <= 1e-9
