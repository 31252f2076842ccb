"""Zero-shot head: scaled cosine similarity between query embeddings and one
text embedding per class."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .metrics import cosine_matrix, l2_normalize
from .store import ClassVocabulary, EmbeddingSet

DEFAULT_LOGIT_SCALE = 100.0


@dataclass(frozen=True)
class ZeroShotHead:
    """Class text embeddings (unit-normalized, vocabulary order) and a logit scale."""

    text_embeddings: EmbeddingSet
    vocab: ClassVocabulary
    tau: float = DEFAULT_LOGIT_SCALE

    def __post_init__(self):
        if self.text_embeddings.rows != self.vocab.size:
            raise ValueError(
                f"expected one text row per class: {self.text_embeddings.rows} rows "
                f"vs {self.vocab.size} classes"
            )
        if self.tau < 0:
            raise ValueError(f"logit scale must be nonnegative, got {self.tau}")
        object.__setattr__(self, "text_embeddings", l2_normalize(self.text_embeddings))

    @property
    def n_classes(self) -> int:
        return self.vocab.size


def zsl_logits(head: ZeroShotHead, queries: EmbeddingSet) -> np.ndarray:
    """tau * cos(query, class text), shape (q, n)."""
    return head.tau * cosine_matrix(queries, head.text_embeddings)


def zsl_predict(head: ZeroShotHead, queries: EmbeddingSet) -> np.ndarray:
    """Per-row argmax class id; ties resolve to the lowest id."""
    return np.argmax(zsl_logits(head, queries), axis=1)
