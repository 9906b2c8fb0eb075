"""Interpretant selection and the n-gram statistics trained from it.

Interpretants are corpus sentences close to the task texts.  They are picked
with a greedy feature-decay pass: task-side n-grams start at weight 1, a
sentence scores the sum of the distinct task n-grams it contains (length
normalized), and every selected sentence decays the weights of its features,
pushing later picks towards uncovered material.

The selected sentences feed two resources: a relative-frequency n-gram weight
table (likelihood source for the weighted overlap features) and an
interpolated Witten-Bell language model.
"""

from __future__ import annotations

import collections
import math
from dataclasses import dataclass, field

from .corpus import Corpus, TokenSeq, extract_ngrams

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


@dataclass(frozen=True)
class FdaConfig:
    """Knobs of the feature-decay selection."""

    max_order: int = 2
    decay: float = 0.5
    budget: int = 100
    length_exponent: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.decay <= 1.0:
            raise ValueError("decay must be in (0, 1]")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.length_exponent < 0:
            raise ValueError("length_exponent must be >= 0")


@dataclass
class InterpretantSet:
    """Selected corpus indices with their at-selection scores (non-increasing)."""

    selected_indices: list[int]
    selection_scores: list[float]

    def __len__(self) -> int:
        return len(self.selected_indices)


def _sentence_ngrams(seq: TokenSeq, max_order: int) -> set:
    grams = set()
    for n in range(1, max_order + 1):
        grams.update(extract_ngrams(seq, n))
    return grams


def select_interpretants(
    corpus: Corpus, task_texts: list[TokenSeq], cfg: FdaConfig
) -> InterpretantSet:
    """Greedy feature-decay selection of ``cfg.budget`` sentences.

    Each round picks the sentence with the highest score
    ``sum(weight of matching task n-grams) / len**length_exponent``
    (ties -> lowest index), then multiplies the weight of every feature the
    winner contains by ``cfg.decay``.
    """
    if not task_texts:
        raise ValueError("task_texts must be nonempty")
    if cfg.budget > len(corpus):
        raise ValueError(f"budget {cfg.budget} exceeds corpus size {len(corpus)}")

    task_features: set = set()
    for text in task_texts:
        task_features.update(_sentence_ngrams(text, cfg.max_order))
    weights = {g: 1.0 for g in task_features}

    # Per sentence: its matching features and 1/len**a normalizer.
    sent_features: list[tuple] = []
    inv_norm: list[float] = []
    containing: dict = collections.defaultdict(list)
    for i, sent in enumerate(corpus.sentences):
        feats = tuple(_sentence_ngrams(sent, cfg.max_order) & task_features)
        sent_features.append(feats)
        inv_norm.append(1.0 / (len(sent) ** cfg.length_exponent))
        for g in feats:
            containing[g].append(i)

    def score(i: int) -> float:
        return sum(weights[g] for g in sent_features[i]) * inv_norm[i]

    scores = [score(i) for i in range(len(corpus))]
    active = [True] * len(corpus)
    selected: list[int] = []
    picked_scores: list[float] = []
    for _ in range(cfg.budget):
        best, best_score = -1, -math.inf
        for i, s in enumerate(scores):
            if active[i] and s > best_score:
                best, best_score = i, s
        selected.append(best)
        picked_scores.append(best_score)
        active[best] = False
        touched = set()
        for g in sent_features[best]:
            weights[g] *= cfg.decay
            touched.update(containing[g])
        for i in touched:
            if active[i]:
                scores[i] = score(i)
    return InterpretantSet(selected, picked_scores)


@dataclass
class NGramWeightTable:
    """Relative-frequency weights of n-grams (orders 1..max_order).

    Unseen n-grams fall back to a floor of ``1 / (2 * total count of that
    order)``, i.e. half the weight of a singleton.
    """

    weights: dict[int, dict] = field(default_factory=dict)
    totals: dict[int, int] = field(default_factory=dict)
    max_order: int = 3

    def floor(self, n: int) -> float:
        total = self.totals.get(n, 0)
        return 1.0 / (2.0 * total) if total else 0.0

    def weight(self, gram: tuple) -> float:
        n = len(gram)
        w = self.weights.get(n, {}).get(gram)
        return w if w is not None else self.floor(n)


def build_ngram_weights(sentences: list[TokenSeq], max_order: int = 3) -> NGramWeightTable:
    """Count n-grams over ``sentences`` and normalize each order to sum to 1."""
    if not sentences or all(len(s) == 0 for s in sentences):
        raise ValueError("need at least one nonempty sentence")
    weights: dict[int, dict] = {}
    totals: dict[int, int] = {}
    for n in range(1, max_order + 1):
        counts: collections.Counter = collections.Counter()
        for sent in sentences:
            counts.update(extract_ngrams(sent, n))
        total = sum(counts.values())
        totals[n] = total
        weights[n] = {g: c / total for g, c in counts.items()} if total else {}
    return NGramWeightTable(weights, totals, max_order)


class WittenBellLM:
    """Interpolated Witten-Bell n-gram model with boundary and unknown symbols.

    P(w | h) = (c(h,w) + T(h) * P(w | h')) / (c(h) + T(h)) where T(h) is the
    number of distinct types following h and h' drops the oldest context word.
    The recursion bottoms out in a uniform distribution over the prediction
    vocabulary, which gives the unknown symbol its continuation mass.

    ``use_boundaries=False`` (only valid with order 1) and ``use_unk=False``
    produce a closed-vocabulary model without sentence-end events; with equal
    unigram counts that degenerates to the exact uniform distribution.
    """

    def __init__(
        self,
        sentences: list[TokenSeq],
        order: int = 3,
        use_boundaries: bool = True,
        use_unk: bool = True,
        map_singletons: bool = False,
    ):
        if order < 1:
            raise ValueError("order must be >= 1")
        if not use_boundaries and order != 1:
            raise ValueError("use_boundaries=False requires order=1")
        if not sentences or all(len(s) == 0 for s in sentences):
            raise ValueError("need at least one nonempty sentence")
        self.order = order
        self.use_boundaries = use_boundaries
        self.use_unk = use_unk

        token_counts: collections.Counter = collections.Counter()
        for sent in sentences:
            token_counts.update(sent.tokens)
        if map_singletons:
            if not use_unk:
                raise ValueError("map_singletons requires use_unk")
            keep = {w for w, c in token_counts.items() if c > 1}
        else:
            keep = set(token_counts)
        self.vocab = set(keep)

        pred_vocab = set(keep)
        if use_unk:
            pred_vocab.add(UNK)
        if use_boundaries:
            pred_vocab.add(EOS)
        self._pred_vocab = pred_vocab
        self._p0 = 1.0 / len(pred_vocab)

        # counts[n][ngram], context_totals[n][history], types_after[n][history]
        self._counts = {n: collections.Counter() for n in range(1, order + 1)}
        self._context_totals = {n: collections.Counter() for n in range(1, order + 1)}
        self._types_after = {n: collections.defaultdict(int) for n in range(1, order + 1)}
        for sent in sentences:
            if len(sent) == 0:
                continue
            toks = [t if t in keep else UNK for t in sent.tokens]
            if use_boundaries:
                padded = [BOS] * (order - 1) + toks + [EOS]
                start = order - 1
            else:
                padded = toks
                start = 0
            for j in range(start, len(padded)):
                for n in range(1, order + 1):
                    if n - 1 > j:
                        continue
                    gram = tuple(padded[j - n + 1 : j + 1])
                    hist = gram[:-1]
                    if self._counts[n][gram] == 0:
                        self._types_after[n][hist] += 1
                    self._counts[n][gram] += 1
                    self._context_totals[n][hist] += 1

    def _map(self, word: str) -> str:
        if word in self._pred_vocab:
            return word
        if not self.use_unk:
            raise ValueError(f"out-of-vocabulary word {word!r} in closed model")
        return UNK

    def prob(self, word: str, history: tuple = ()) -> float:
        """Smoothed P(word | history); history longer than order-1 is truncated."""
        word = self._map(word)
        hist = tuple(self._map(w) if w != BOS else BOS for w in history)
        hist = hist[max(0, len(hist) - (self.order - 1)) :]
        return self._prob(word, hist)

    def _prob(self, word: str, hist: tuple) -> float:
        if not hist:
            c = self._counts[1].get((word,), 0)
            total = self._context_totals[1].get((), 0)
            t = self._types_after[1].get((), 0)
            return (c + t * self._p0) / (total + t)
        n = len(hist) + 1
        total = self._context_totals[n].get(hist, 0)
        lower = self._prob(word, hist[1:])
        if total == 0:
            return lower
        t = self._types_after[n].get(hist, 0)
        c = self._counts[n].get(hist + (word,), 0)
        return (c + t * lower) / (total + t)

    def sequence_logprob2(self, seq: TokenSeq) -> tuple[float, int]:
        """(log2 probability of ``seq`` including boundary events, event count)."""
        if self.use_boundaries:
            padded = [BOS] * (self.order - 1) + list(seq.tokens) + [EOS]
            start = self.order - 1
        else:
            padded = list(seq.tokens)
            start = 0
        logprob = 0.0
        for j in range(start, len(padded)):
            hist = tuple(padded[max(0, j - self.order + 1) : j])
            logprob += math.log2(self.prob(padded[j], hist))
        return logprob, max(1, len(padded) - start)

    def in_vocab(self, word: str) -> bool:
        return word in self.vocab

    def prediction_vocab(self) -> set:
        return set(self._pred_vocab)


def train_language_model(sentences: list[TokenSeq], order: int = 3, **kwargs) -> WittenBellLM:
    return WittenBellLM(sentences, order=order, **kwargs)
