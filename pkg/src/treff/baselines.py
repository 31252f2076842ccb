"""Comparison heads over the same frozen embeddings: the key/value cache
model, prototype distances, and attention-over-supports matching."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .adapter import PHI_DIRECTION, TrainConfig, FitReport
from .calm import DEFAULT_FUSION_WEIGHT, DEFAULT_SHARPNESS, AdapterParams
from .metrics import cosine_matrix, cross_entropy, l2_normalize, phi_scale, softmax_rows
from .store import EmbeddingSet, SupportSet, one_hot
from .zeroshot import ZeroShotHead, zsl_logits


@dataclass(frozen=True)
class TipCache:
    """Trainable keys (initialized to normalized support embeddings) and
    frozen one-hot values."""

    keys: np.ndarray
    values: np.ndarray
    beta: float = DEFAULT_SHARPNESS
    alpha: float = DEFAULT_FUSION_WEIGHT

    def __post_init__(self):
        keys = np.asarray(self.keys, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.float64)
        if not np.all(np.isfinite(keys)):
            raise ValueError("keys contain non-finite entries")
        if keys.shape[0] != values.shape[0]:
            raise ValueError(f"{keys.shape[0]} keys vs {values.shape[0]} value rows")
        if not np.array_equal(values.sum(axis=1), np.ones(values.shape[0])) or not set(
            np.unique(values)
        ) <= {0.0, 1.0}:
            raise ValueError("values must be one-hot rows")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        keys.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "values", values)


def tip_init(
    support: SupportSet,
    beta: float = DEFAULT_SHARPNESS,
    alpha: float = DEFAULT_FUSION_WEIGHT,
) -> TipCache:
    return TipCache(
        keys=l2_normalize(support.embeddings).data,
        values=one_hot(support.labels, support.n_classes),
        beta=beta,
        alpha=alpha,
    )


def tip_predict(
    cache: TipCache,
    head: ZeroShotHead,
    queries: EmbeddingSet,
    phi_sign: str = "corrected",
) -> np.ndarray:
    """Zero-shot logits plus alpha times sharpened key affinities aggregated
    over the cached one-hot values. Untrained keys make this identical to the
    training-free adapter."""
    if queries.dim != cache.keys.shape[1]:
        raise ValueError(f"dimension mismatch: {queries.dim} vs {cache.keys.shape[1]}")
    affinity = l2_normalize(queries).data @ cache.keys.T
    fsl = phi_scale(affinity, cache.beta, phi_sign) @ cache.values
    return zsl_logits(head, queries) + cache.alpha * fsl


def _tip_loss_and_grads(
    keys: np.ndarray,
    alpha: float,
    beta: float,
    head: ZeroShotHead,
    support: SupportSet,
    cfg: TrainConfig,
):
    A = l2_normalize(support.embeddings).data
    Y = one_hot(support.labels, support.n_classes)
    m = A.shape[0]
    direction = PHI_DIRECTION[cfg.phi_sign]

    S = A @ keys.T
    phi = np.exp(direction * beta * (1.0 - S))
    if not cfg.include_self:
        phi = phi * (1.0 - np.eye(m))
    F = phi @ Y

    Z = zsl_logits(head, support.embeddings)
    logits = Z + alpha * F if cfg.loss_includes_zsl else F
    loss = cross_entropy(logits, support.labels)

    G = (softmax_rows(logits) - Y) / m
    if cfg.loss_includes_zsl:
        g_alpha = float(np.sum(G * F))
        dF = alpha * G
    else:
        g_alpha = 0.0
        dF = G
    # phi = exp(direction*beta*(1-S)) so dphi/dS = -direction*beta*phi
    D = (dF @ Y.T) * (-direction * beta * phi)
    if not cfg.include_self:
        D = D * (1.0 - np.eye(m))
    g_keys = D.T @ A
    return loss, g_keys, g_alpha


def tip_finetune(
    cache: TipCache,
    head: ZeroShotHead,
    support: SupportSet,
    cfg: TrainConfig = TrainConfig(),
) -> tuple[tuple[float, ...], TipCache]:
    """Fine-tune the cache keys (and alpha) on the support set; values stay
    frozen. Mirrors the adapter trainer: one full-batch Adam step per epoch."""
    if support.embeddings.rows < 2 or np.unique(support.labels).size < 2:
        raise ValueError("fine-tuning needs >= 2 examples spanning >= 2 classes")

    keys = cache.keys.copy()
    alpha = cache.alpha
    beta = cache.beta

    mK = np.zeros_like(keys)
    vK = np.zeros_like(keys)
    ma = va = 0.0
    b1, b2, eps, lr = cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps, cfg.learning_rate

    losses = []
    for t in range(1, cfg.epochs + 1):
        loss, gK, ga = _tip_loss_and_grads(keys, alpha, beta, head, support, cfg)
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite training loss at epoch {t}: {loss}")
        losses.append(loss)

        mK = b1 * mK + (1 - b1) * gK
        vK = b2 * vK + (1 - b2) * gK * gK
        keys = keys - lr * (mK / (1 - b1**t)) / (np.sqrt(vK / (1 - b2**t)) + eps)

        if cfg.loss_includes_zsl:
            ma = b1 * ma + (1 - b1) * ga
            va = b2 * va + (1 - b2) * ga * ga
            alpha = alpha - lr * (ma / (1 - b1**t)) / (np.sqrt(va / (1 - b2**t)) + eps)

    trained = TipCache(keys=keys, values=cache.values, beta=beta, alpha=alpha)
    return tuple(losses), trained


def proto_predict(
    support: SupportSet, queries: EmbeddingSet, normalize_first: bool = False
) -> np.ndarray:
    """Negative squared Euclidean distance to per-class mean embeddings."""
    if queries.dim != support.embeddings.dim:
        raise ValueError(f"dimension mismatch: {queries.dim} vs {support.embeddings.dim}")
    emb = l2_normalize(support.embeddings).data if normalize_first else support.embeddings.data
    q = l2_normalize(queries).data if normalize_first else queries.data
    n = support.n_classes
    protos = np.zeros((n, emb.shape[1]))
    for c in range(n):
        members = emb[support.labels == c]
        if members.shape[0] == 0:
            raise ValueError(f"class {c} has no support examples")
        protos[c] = members.mean(axis=0)
    diff = q[:, None, :] - protos[None, :, :]
    return -np.sum(diff * diff, axis=2)


def match_predict(support: SupportSet, queries: EmbeddingSet) -> np.ndarray:
    """Softmax attention over support cosine similarities, aggregated through
    one-hot labels; rows are probabilities."""
    attention = softmax_rows(cosine_matrix(queries, support.embeddings))
    return attention @ one_hot(support.labels, support.n_classes)
