import numpy as np
import pytest

from treff import ClassVocabulary, EmbeddingSet, SupportSet, ZeroShotHead


def random_instance(seed: int, d: int = 8, n: int = 3, k: int = 2, q: int = 4, tau: float = 1.0):
    """A seeded (support, head, queries, query labels) few-shot instance."""
    rng = np.random.default_rng(seed)
    vocab = ClassVocabulary(tuple(f"c{i}" for i in range(n)))
    support = SupportSet(
        embeddings=EmbeddingSet(rng.standard_normal((n * k, d))),
        labels=np.repeat(np.arange(n), k),
        vocab=vocab,
    )
    head = ZeroShotHead(
        text_embeddings=EmbeddingSet(rng.standard_normal((n, d))),
        vocab=vocab,
        tau=tau,
    )
    queries = EmbeddingSet(rng.standard_normal((q, d)))
    query_labels = rng.integers(0, n, size=q)
    return support, head, queries, query_labels


@pytest.fixture
def small_instance():
    return random_instance(0)
