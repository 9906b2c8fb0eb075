import math

import numpy as np
import pytest

from rtm.corpus import Corpus, TokenSeq, tokenize
from rtm.interpretants import (
    FdaConfig,
    WittenBellLM,
    build_ngram_weights,
    select_interpretants,
    train_language_model,
)


def seqs(*texts):
    return [tokenize(t) for t in texts]


class TestSelectInterpretants:
    def test_picks_only_overlapping_sentence(self):
        corpus = Corpus(seqs("a b", "c d"))
        sel = select_interpretants(corpus, seqs("a b"), FdaConfig(budget=1))
        assert sel.selected_indices == [0]

    def test_duplicate_copy_scores_exactly_decay_times_first(self):
        # two identical copies of the only matching sentence, nothing else overlaps
        corpus = Corpus(seqs("a b c", "a b c", "x y z"))
        sel = select_interpretants(
            corpus, seqs("a b c"), FdaConfig(max_order=2, decay=0.5, budget=2)
        )
        assert sel.selected_indices == [0, 1]
        assert sel.selection_scores[1] == pytest.approx(0.5 * sel.selection_scores[0], rel=1e-12)

    def test_full_budget_is_permutation(self):
        corpus = Corpus(seqs("a b", "b c", "c d", "e f"))
        sel = select_interpretants(corpus, seqs("a b c"), FdaConfig(budget=4))
        assert sorted(sel.selected_indices) == [0, 1, 2, 3]

    def test_scores_non_increasing(self):
        rng = np.random.default_rng(0)
        vocab = [f"w{i}" for i in range(20)]
        corpus = Corpus(
            [TokenSeq.from_tokens(rng.choice(vocab, size=rng.integers(2, 6))) for _ in range(40)]
        )
        task = [TokenSeq.from_tokens(rng.choice(vocab, size=5)) for _ in range(4)]
        sel = select_interpretants(corpus, task, FdaConfig(budget=40))
        assert all(a >= b - 1e-12 for a, b in zip(sel.selection_scores, sel.selection_scores[1:]))

    def test_no_decay_keeps_static_order(self):
        # decay=1: selection order must equal descending static-score order
        corpus = Corpus(seqs("a b c d", "a b", "a", "x"))
        sel = select_interpretants(corpus, seqs("a b c d"), FdaConfig(decay=1.0, budget=4))
        static = sel.selection_scores
        assert static == sorted(static, reverse=True)
        assert sel.selected_indices[-1] == 3

    def test_errors(self):
        corpus = Corpus(seqs("a b"))
        with pytest.raises(ValueError):
            select_interpretants(corpus, [], FdaConfig(budget=1))
        with pytest.raises(ValueError):
            select_interpretants(corpus, seqs("a"), FdaConfig(budget=2))


class TestNGramWeights:
    def test_unigram_relative_frequency(self):
        table = build_ngram_weights(seqs("a a b"))
        assert table.weight(("a",)) == pytest.approx(2 / 3)
        assert table.weight(("b",)) == pytest.approx(1 / 3)

    def test_single_bigram(self):
        table = build_ngram_weights(seqs("a b"))
        assert table.weight(("a", "b")) == 1.0

    def test_bigram_split(self):
        table = build_ngram_weights(seqs("a b", "b a"))
        assert table.weight(("a", "b")) == pytest.approx(0.5)
        assert table.weight(("b", "a")) == pytest.approx(0.5)

    def test_orders_sum_to_one(self):
        table = build_ngram_weights(seqs("a b c d", "b c", "a"))
        for n, weights in table.weights.items():
            if weights:
                assert sum(weights.values()) == pytest.approx(1.0, abs=1e-9)

    def test_unseen_floor(self):
        table = build_ngram_weights(seqs("a a b"))  # 3 unigram tokens
        assert table.weight(("zzz",)) == pytest.approx(1 / 6)

    def test_all_empty_rejected(self):
        with pytest.raises(ValueError):
            build_ngram_weights([])


class TestWittenBellLM:
    def test_repeated_sentence_near_certain(self):
        sentences = seqs(*["the cat sat on the mat"] * 40)
        lm = train_language_model(sentences, order=3)
        logprob, events = lm.sequence_logprob2(sentences[0])
        assert -logprob / events < 0.2

    def test_uniform_closed_model_is_three_bits(self):
        # 8 equally frequent words, order 1, no boundaries/unknown -> exactly uniform
        sent = TokenSeq.from_tokens([f"w{i}" for i in range(8)])
        lm = WittenBellLM([sent], order=1, use_boundaries=False, use_unk=False)
        query = TokenSeq.from_tokens(["w0", "w3", "w5", "w7"])
        logprob, events = lm.sequence_logprob2(query)
        assert -logprob / events == pytest.approx(3.0, abs=1e-12)

    def test_conditional_distributions_normalize(self):
        rng = np.random.default_rng(1)
        vocab = [f"w{i}" for i in range(15)]
        sentences = [
            TokenSeq.from_tokens(rng.choice(vocab, size=rng.integers(1, 7))) for _ in range(30)
        ]
        lm = train_language_model(sentences, order=3)
        words = sorted(lm.prediction_vocab())
        histories = [tuple(rng.choice(vocab + ["<unk>"], size=rng.integers(0, 3))) for _ in range(100)]
        histories += [("<s>", "<s>"), ("<s>", words[0])]
        for hist in histories:
            total = sum(lm.prob(w, hist) for w in words)
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_any_sentence_has_positive_probability(self):
        lm = train_language_model(seqs("a b c"), order=2)
        logprob, _ = lm.sequence_logprob2(tokenize("zz qq a"))
        assert math.isfinite(logprob)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            train_language_model(seqs("a b"), order=0)
        with pytest.raises(ValueError):
            WittenBellLM(seqs("a b"), order=2, use_boundaries=False)

    def test_singleton_mapping(self):
        lm = WittenBellLM(seqs("a a b"), order=1, map_singletons=True)
        assert lm.in_vocab("a") and not lm.in_vocab("b")
