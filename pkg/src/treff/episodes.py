"""Episodic n-way k-shot sampling and evaluation.

Sampling is driven by numpy's PCG64 generator: identical seeds give identical
episodes on every platform. Episode i of an evaluation uses base_seed + i, so
episodes are independent work items and results never depend on execution
order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .adapter import TrainConfig, treff_finetune, treff_predict, treff_training_free
from .baselines import match_predict, proto_predict, tip_finetune, tip_init, tip_predict
from .store import ClassVocabulary, EmbeddingSet, SupportSet
from .zeroshot import ZeroShotHead, zsl_logits

METHODS = ("zsl", "treff-free", "treff-ft", "tip-free", "tip-ft", "proto", "match")


@dataclass(frozen=True)
class Episode:
    """One n-way k-shot task: chosen classes plus disjoint support/query rows."""

    class_ids: tuple[int, ...]
    support_indices: tuple[int, ...]
    query_indices: tuple[int, ...]
    seed: int


@dataclass(frozen=True)
class EvalSummary:
    mean_accuracy: float
    std_error: float
    per_episode: tuple[float, ...]
    episode_count: int
    config: dict

    def to_dict(self) -> dict:
        return {
            "mean_accuracy": self.mean_accuracy,
            "std_error": self.std_error,
            "per_episode": list(self.per_episode),
            "episode_count": self.episode_count,
            "config": self.config,
        }

    def csv_row(self) -> str:
        c = self.config
        return (
            f"{c['method']},{c['n']},{c['k']},{self.episode_count},"
            f"{self.mean_accuracy:.6f},{self.std_error:.6f}"
        )


def sample_episode(
    labels: np.ndarray, n: int, k: int, q_per_class: int, seed: int
) -> Episode:
    """Choose n classes uniformly, then k support + q_per_class query rows per
    class without replacement. Fully determined by seed."""
    labels = np.asarray(labels, dtype=np.int64)
    rng = np.random.default_rng(seed)
    class_ids = np.unique(labels)
    eligible = [c for c in class_ids if np.sum(labels == c) >= k + q_per_class]
    if len(eligible) < n:
        raise ValueError(
            f"need {n} classes with >= {k + q_per_class} examples, "
            f"only {len(eligible)} available"
        )
    chosen = rng.choice(np.asarray(eligible), size=n, replace=False)
    support, query = [], []
    for c in chosen:
        rows = np.flatnonzero(labels == c)
        # queries come off the permutation first so the query set for a given
        # seed does not depend on k (zero-shot results stay constant in k)
        picked = rng.permutation(rows)
        query.extend(int(i) for i in picked[:q_per_class])
        support.extend(int(i) for i in picked[q_per_class : q_per_class + k])
    return Episode(
        class_ids=tuple(int(c) for c in chosen),
        support_indices=tuple(support),
        query_indices=tuple(query),
        seed=seed,
    )


def _episode_task(
    dataset: SupportSet, text: EmbeddingSet, episode: Episode, tau: float
) -> tuple[SupportSet, EmbeddingSet, np.ndarray, ZeroShotHead]:
    """Materialize one episode: remap the chosen global classes to local ids
    0..n-1 and build the matching zero-shot head."""
    remap = {c: i for i, c in enumerate(episode.class_ids)}
    vocab = ClassVocabulary(tuple(dataset.vocab.names[c] for c in episode.class_ids))

    sup_rows = np.asarray(episode.support_indices)
    sup = SupportSet(
        embeddings=EmbeddingSet(dataset.embeddings.data[sup_rows]),
        labels=np.asarray([remap[int(c)] for c in dataset.labels[sup_rows]]),
        vocab=vocab,
    )
    qry_rows = np.asarray(episode.query_indices)
    queries = EmbeddingSet(dataset.embeddings.data[qry_rows])
    qry_labels = np.asarray([remap[int(c)] for c in dataset.labels[qry_rows]])

    head = ZeroShotHead(
        text_embeddings=EmbeddingSet(text.data[list(episode.class_ids)]),
        vocab=vocab,
        tau=tau,
    )
    return sup, queries, qry_labels, head


def _run_method(
    method: str,
    sup: SupportSet,
    queries: EmbeddingSet,
    head: ZeroShotHead,
    train_cfg: TrainConfig,
    phi_sign: str,
) -> np.ndarray:
    if method == "zsl":
        return zsl_logits(head, queries)
    if method == "treff-free":
        return treff_training_free(head, sup, queries, phi_sign=phi_sign)
    if method == "treff-ft":
        report = treff_finetune(head, sup, train_cfg)
        return treff_predict(report.final_params, head, sup, queries, phi_sign)
    if method == "tip-free":
        return tip_predict(tip_init(sup), head, queries, phi_sign)
    if method == "tip-ft":
        _, cache = tip_finetune(tip_init(sup), head, sup, train_cfg)
        return tip_predict(cache, head, queries, phi_sign)
    if method == "proto":
        return proto_predict(sup, queries)
    if method == "match":
        return match_predict(sup, queries)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def evaluate(
    method: str,
    dataset: SupportSet,
    text: EmbeddingSet,
    n: int,
    k: int,
    q_per_class: int = 5,
    episode_count: int = 100,
    base_seed: int = 0,
    tau: float = 100.0,
    train_cfg: TrainConfig = TrainConfig(),
    phi_sign: str = "corrected",
) -> EvalSummary:
    """Mean top-1 accuracy over seeded episodes, with standard error."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    accuracies = []
    for i in range(episode_count):
        episode = sample_episode(dataset.labels, n, k, q_per_class, base_seed + i)
        sup, queries, qry_labels, head = _episode_task(dataset, text, episode, tau)
        cfg = train_cfg.__class__(**{**train_cfg.__dict__, "seed": base_seed + i})
        scores = _run_method(method, sup, queries, head, cfg, phi_sign)
        predictions = np.argmax(scores, axis=1)
        accuracies.append(float(np.mean(predictions == qry_labels)))

    acc = np.asarray(accuracies)
    stderr = float(acc.std(ddof=1) / np.sqrt(len(acc))) if len(acc) > 1 else 0.0
    return EvalSummary(
        mean_accuracy=float(acc.mean()),
        std_error=stderr,
        per_episode=tuple(accuracies),
        episode_count=episode_count,
        config={
            "method": method,
            "n": n,
            "k": k,
            "q_per_class": q_per_class,
            "base_seed": base_seed,
            "tau": tau,
            "phi_sign": phi_sign,
            "epochs": train_cfg.epochs,
            "learning_rate": train_cfg.learning_rate,
            "include_self": train_cfg.include_self,
        },
    )


def shot_curve(
    method: str,
    dataset: SupportSet,
    text: EmbeddingSet,
    n: int,
    shots: list[int],
    **kwargs,
) -> list[tuple[int, EvalSummary]]:
    """evaluate() at each shot count with a shared base seed, ordered by k."""
    return [(k, evaluate(method, dataset, text, n, k, **kwargs)) for k in sorted(shots)]
