"""Numeric kernels shared by every head: normalization, cosine similarity,
exponential sharpness scaling, softmax, and cross-entropy.

All reductions run in float64. Functions are pure and parallel-safe.
"""

from __future__ import annotations

import numpy as np

from .store import EmbeddingSet

ZERO_NORM_EPS = 1e-12

# The similarity-sharpening exponential comes in two sign conventions:
# "corrected" (increasing in similarity, the retrieval-sensible choice) and
# "paper" (decreasing), kept selectable for ablation.
PHI_SIGNS = ("corrected", "paper")


def _row_norms(data: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(data, axis=1)
    if np.any(norms < ZERO_NORM_EPS):
        bad = int(np.argmin(norms))
        raise ValueError(f"row {bad} has near-zero norm ({norms[bad]:.3e})")
    return norms


def l2_normalize(emb: EmbeddingSet) -> EmbeddingSet:
    """Scale every row to unit Euclidean norm."""
    norms = _row_norms(emb.data)
    return EmbeddingSet(emb.data / norms[:, None])


def cosine_matrix(x: EmbeddingSet, y: EmbeddingSet) -> np.ndarray:
    """Pairwise cosine similarities, shape (x.rows, y.rows)."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    xn = x.data / _row_norms(x.data)[:, None]
    yn = y.data / _row_norms(y.data)[:, None]
    return xn @ yn.T


def phi_scale(s: np.ndarray, b: float, sign: str = "corrected") -> np.ndarray:
    """Elementwise exp(-b*(1-s)) ("corrected") or exp(b*(1-s)) ("paper").

    The corrected form is 1 at s=1 and increases with similarity, so the
    most similar supports dominate the label aggregation.
    """
    if b <= 0:
        raise ValueError(f"sharpness must be positive, got {b}")
    if sign not in PHI_SIGNS:
        raise ValueError(f"sign must be one of {PHI_SIGNS}, got {sign!r}")
    s = np.asarray(s, dtype=np.float64)
    direction = -1.0 if sign == "corrected" else 1.0
    return np.exp(direction * b * (1.0 - s))


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max-subtraction for stability."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def log_softmax_rows(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log-likelihood of the labeled class under row softmax."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= logits.shape[1]):
        raise ValueError(f"labels must lie in [0, {logits.shape[1]})")
    logp = log_softmax_rows(logits)
    return float(-logp[np.arange(labels.shape[0]), labels].mean())
