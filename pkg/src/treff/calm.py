"""Cross-attention linear model: a single weight matrix shared between query
and support embeddings, an affinity matrix over the transformed rows, and
label aggregation through the sharpness-scaled affinities.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .metrics import cosine_matrix, l2_normalize, phi_scale
from .store import EmbeddingSet, SupportSet, one_hot, read_embeddings, write_embeddings

DEFAULT_SHARPNESS = 5.5
DEFAULT_FUSION_WEIGHT = 1.0


@dataclass(frozen=True)
class AdapterParams:
    """Trainable square transform W, fixed sharpness b, fusion weight alpha."""

    W: np.ndarray
    b: float = DEFAULT_SHARPNESS
    alpha: float = DEFAULT_FUSION_WEIGHT

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError(f"W must be square, got shape {W.shape}")
        if not np.all(np.isfinite(W)):
            raise ValueError("W contains non-finite entries")
        if self.b <= 0:
            raise ValueError(f"sharpness must be positive, got {self.b}")
        W = np.ascontiguousarray(W)
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @property
    def dim(self) -> int:
        return self.W.shape[0]

    def with_updates(self, **kw) -> "AdapterParams":
        return replace(self, **kw)


def identity_init(d: int, b: float = DEFAULT_SHARPNESS) -> AdapterParams:
    """Parameters whose transform is the identity, reducing the affinity to
    plain cosine similarity; alpha starts at 1."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return AdapterParams(W=np.eye(d), b=b, alpha=DEFAULT_FUSION_WEIGHT)


def transform(params: AdapterParams, emb: EmbeddingSet) -> EmbeddingSet:
    """Unit-normalize each row, then apply the shared linear map.

    Output rows are not re-normalized; only the input is.
    """
    if emb.dim != params.dim:
        raise ValueError(f"dimension mismatch: {emb.dim} vs {params.dim}")
    normed = l2_normalize(emb)
    return EmbeddingSet(normed.data @ params.W.T)


def calm_affinity(
    params: AdapterParams, queries: EmbeddingSet, supports: EmbeddingSet
) -> np.ndarray:
    """Pairwise scores between transformed queries and transformed supports.

    The same W transforms both sides; with W = I this equals cosine_matrix.
    """
    eq = transform(params, queries)
    es = transform(params, supports)
    return eq.data @ es.data.T


def calm_forward(
    params: AdapterParams,
    queries: EmbeddingSet,
    support: SupportSet,
    phi_sign: str = "corrected",
) -> np.ndarray:
    """Aggregate support labels weighted by sharpened affinities.

    Returns unnormalized class scores (q x n). They are fused additively with
    zero-shot logits, so no normalization is applied here.
    """
    s = calm_affinity(params, queries, support.embeddings)
    weights = phi_scale(s, params.b, phi_sign)
    return weights @ one_hot(support.labels, support.n_classes)


def save_params(params: AdapterParams, path: str | Path) -> None:
    """Persist W in the embedding container plus a JSON sidecar for scalars."""
    path = Path(path)
    write_embeddings(EmbeddingSet(params.W), path)
    sidecar = {"b": params.b, "alpha": params.alpha}
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, sort_keys=True)
    )


def load_params(path: str | Path) -> AdapterParams:
    path = Path(path)
    emb, _, _ = read_embeddings(path)
    sidecar = json.loads(path.with_suffix(path.suffix + ".json").read_text())
    return AdapterParams(W=emb.data, b=float(sidecar["b"]), alpha=float(sidecar["alpha"]))
