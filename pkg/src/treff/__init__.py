"""Few-shot adapter heads over frozen cross-modal embeddings.

Library surface: embedding containers and the TREFFEMB file format, numeric
kernels, the cross-attention linear adapter with training-free and fine-tuned
modes, cache-model / prototype / matching baselines, an episodic n-way k-shot
evaluation harness, and a synthetic clustered benchmark generator.
"""

__version__ = "0.1.0"

from .store import (
    ClassVocabulary,
    EmbeddingSet,
    FormatError,
    SupportSet,
    one_hot,
    read_embeddings,
    write_embeddings,
)
from .metrics import cosine_matrix, cross_entropy, l2_normalize, phi_scale, softmax_rows
from .calm import (
    AdapterParams,
    calm_affinity,
    calm_forward,
    identity_init,
    load_params,
    save_params,
    transform,
)
from .zeroshot import ZeroShotHead, zsl_logits, zsl_predict
from .adapter import (
    FitReport,
    TrainConfig,
    grad_check,
    treff_finetune,
    treff_predict,
    treff_training_free,
)
from .baselines import (
    TipCache,
    match_predict,
    proto_predict,
    tip_finetune,
    tip_init,
    tip_predict,
)
from .episodes import Episode, EvalSummary, METHODS, evaluate, sample_episode, shot_curve
from .synth import SynthConfig, generate
