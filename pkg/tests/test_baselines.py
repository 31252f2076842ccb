import numpy as np
import pytest

from treff import (
    ClassVocabulary,
    EmbeddingSet,
    SupportSet,
    TipCache,
    TrainConfig,
    ZeroShotHead,
    cosine_matrix,
    match_predict,
    proto_predict,
    tip_finetune,
    tip_init,
    tip_predict,
    treff_training_free,
    zsl_logits,
)
from conftest import random_instance


class TestTipCache:
    def test_values_must_be_one_hot(self):
        with pytest.raises(ValueError, match="one-hot"):
            TipCache(keys=np.eye(2), values=np.array([[0.5, 0.5], [1.0, 0.0]]))

    def test_arity_checked(self):
        with pytest.raises(ValueError, match="keys"):
            TipCache(keys=np.eye(2), values=np.array([[1.0, 0.0]]))


class TestTipPredict:
    def test_untrained_equals_training_free(self):
        for seed in range(10):
            support, head, queries, _ = random_instance(seed)
            tip = tip_predict(tip_init(support), head, queries)
            free = treff_training_free(head, support, queries)
            assert np.allclose(tip, free, atol=1e-9)

    def test_alpha_zero(self, small_instance):
        support, head, queries, _ = small_instance
        cache = tip_init(support, alpha=0.0)
        assert np.allclose(tip_predict(cache, head, queries), zsl_logits(head, queries))

    def test_worked_example(self):
        vocab = ClassVocabulary(("a", "b"))
        support = SupportSet(EmbeddingSet([[1.0, 0.0], [0.0, 1.0]]), [0, 1], vocab)
        head = ZeroShotHead(EmbeddingSet([[1.0, 0.0], [0.0, 1.0]]), vocab, tau=1.0)
        p = tip_predict(tip_init(support), head, EmbeddingSet([[0.8, 0.6]]))
        assert np.allclose(p, [[1.132871, 0.710803]], atol=1e-5)


class TestTipFinetune:
    def test_deterministic(self, small_instance):
        support, head, _, _ = small_instance
        cfg = TrainConfig(epochs=10)
        l1, c1 = tip_finetune(tip_init(support), head, support, cfg)
        l2, c2 = tip_finetune(tip_init(support), head, support, cfg)
        assert l1 == l2
        assert np.array_equal(c1.keys, c2.keys)

    def test_loss_decreases(self):
        for seed in range(5):
            support, head, _, _ = random_instance(seed, k=4)
            losses, _ = tip_finetune(tip_init(support), head, support, TrainConfig(epochs=20))
            assert losses[-1] <= losses[0]

    def test_keys_drift_from_support(self, small_instance):
        # the semantic drift the cache critique is about: trained keys move
        support, head, _, _ = small_instance
        cache0 = tip_init(support)
        _, trained = tip_finetune(cache0, head, support, TrainConfig(epochs=20))
        assert np.linalg.norm(trained.keys - cache0.keys) > 0


class TestProto:
    def test_one_shot_exact_query(self):
        vocab = ClassVocabulary(("a", "b"))
        support = SupportSet(EmbeddingSet([[1.0, 0.0], [0.0, 1.0]]), [0, 1], vocab)
        logits = proto_predict(support, EmbeddingSet([[1.0, 0.0]]))
        assert logits[0, 0] == pytest.approx(0.0)
        assert logits[0, 1] < 0

    def test_identical_supports_mean(self):
        vocab = ClassVocabulary(("a",))
        support = SupportSet(EmbeddingSet([[0.3, 0.4], [0.3, 0.4]]), [0, 0], vocab)
        logits = proto_predict(support, EmbeddingSet([[0.3, 0.4]]))
        assert logits[0, 0] == pytest.approx(0.0)

    def test_mean_prototype(self):
        vocab = ClassVocabulary(("a",))
        support = SupportSet(EmbeddingSet([[1.0, 0.0], [0.0, 1.0]]), [0, 0], vocab)
        # prototype (0.5, 0.5); distance^2 from origin query would be 0.5
        logits = proto_predict(support, EmbeddingSet([[0.5, 0.5]]))
        assert logits[0, 0] == pytest.approx(0.0)


class TestMatch:
    def test_single_support_probability_one(self):
        vocab = ClassVocabulary(("a",))
        support = SupportSet(EmbeddingSet([[1.0, 2.0]]), [0], vocab)
        probs = match_predict(support, EmbeddingSet([[0.5, 0.5]]))
        assert probs[0, 0] == pytest.approx(1.0)

    def test_exact_match_wins(self):
        vocab = ClassVocabulary(("a", "b", "c"))
        support = SupportSet(
            EmbeddingSet([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]),
            [0, 1, 2],
            vocab,
        )
        probs = match_predict(support, EmbeddingSet([[0.0, 1.0, 0.0]]))
        assert np.argmax(probs) == 1

    def test_rows_sum_to_one(self, small_instance):
        support, _, queries, _ = small_instance
        probs = match_predict(support, queries)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)

    def test_one_shot_matches_nearest_neighbor(self):
        for seed in range(20):
            support, _, queries, _ = random_instance(seed, d=8, n=4, k=1, q=6)
            probs = match_predict(support, queries)
            nn = np.argmax(cosine_matrix(queries, support.embeddings), axis=1)
            nn_classes = support.labels[nn]
            assert np.array_equal(np.argmax(probs, axis=1), nn_classes)
