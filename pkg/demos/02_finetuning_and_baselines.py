"""Walkthrough: fine-tuning the shared linear transform, and how the adapter
compares with the cache-model, prototype, and matching baselines.

Fine-tuning starts from the identity matrix (so epoch zero IS the
training-free adapter) and minimizes support-set cross-entropy through the
fused logits with Adam. Only the d x d transform and the scalar fusion
weight train; the embeddings stay frozen.
"""

from treff import (
    SynthConfig,
    TrainConfig,
    evaluate,
    generate,
    sample_episode,
    treff_finetune,
)
from treff.episodes import _episode_task

dataset, text = generate(
    SynthConfig(n_classes=8, dim=32, per_class=25, kappa=4.0, text_noise=0.3, seed=1)
)

# Peek inside one episode's training run.
episode = sample_episode(dataset.labels, n=5, k=16, q_per_class=5, seed=7)
support, queries, query_labels, head = _episode_task(dataset, text, episode, tau=5.0)
report = treff_finetune(head, support, TrainConfig(epochs=20))
print("support-set loss per epoch (starts at the training-free value):")
print("  " + " ".join(f"{l:.3f}" for l in report.loss_per_epoch))
print(f"final fusion weight alpha: {report.final_params.alpha:.4f}\n")

# Head-to-head on 200 episodes.
print("5-way 16-shot, 200 episodes:")
for method in ("zsl", "proto", "match", "tip-free", "tip-ft", "treff-free", "treff-ft"):
    s = evaluate(method, dataset, text, n=5, k=16, episode_count=200, base_seed=42, tau=5.0)
    print(f"  {method:10s} {s.mean_accuracy:.4f} +/- {s.std_error:.4f}")

print(
    "\ntip-free and treff-free agree exactly (same formula before training);"
    "\nafter training they differ: the cache model moves its keys, the adapter"
    "\nmoves a transform shared by both sides of the affinity."
)
