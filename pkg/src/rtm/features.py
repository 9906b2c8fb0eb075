"""Translation-performance features between a source and a target TokenSeq.

Each (src, tgt) pair yields a fixed 41-feature vector:

* 30 overlap features: for each of the order sets {1}, {2}, {3}, {1,2} and
  {1,2,3}, the likelihood-weighted precision/recall/F1/geometric mean over
  distinct n-grams plus the plain (unweighted) recall and precision;
* 3 language-model features of the source (log2 probability, bits per word,
  OOV rate);
* 2 word-alignment features (1 - WER of the aligned sequence, alignment F1);
* 6 length features (token and char counts, ratios).

Weighted recall credits a target n-gram with its relative frequency in the
interpretant corpus, so matching frequent material counts more; n-grams never
seen there get half a singleton's weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .corpus import TokenSeq, extract_ngrams
from .interpretants import NGramWeightTable, WittenBellLM

ORDER_SETS: tuple[tuple[int, ...], ...] = ((1,), (2,), (3,), (1, 2), (1, 2, 3))

_OVERLAP_PARTS = ("wprec", "wrec", "wf1", "wgm", "rec", "prec")


def feature_manifest() -> tuple[str, ...]:
    """Ordered feature names; every feature vector follows this layout."""
    names = []
    for orders in ORDER_SETS:
        tag = "".join(str(n) for n in orders)
        names.extend(f"{part}_{tag}" for part in _OVERLAP_PARTS)
    names.extend(["lm_logprob", "lm_bpw", "lm_oov"])
    names.extend(["align_1mwer", "align_f1"])
    names.extend(
        ["src_tokens", "tgt_tokens", "src_chars", "tgt_chars", "token_ratio", "char_ratio"]
    )
    return tuple(names)


FEATURE_NAMES = feature_manifest()
N_FEATURES = len(FEATURE_NAMES)


class OverlapScores(NamedTuple):
    wprec: float
    wrec: float
    wf1: float
    wgm: float
    rec: float
    prec: float


def _distinct_ngrams(seq: TokenSeq, orders) -> set:
    grams = set()
    for n in orders:
        grams.update(extract_ngrams(seq, n))
    return grams


def weighted_overlap(
    src: TokenSeq, tgt: TokenSeq, table: NGramWeightTable, orders
) -> OverlapScores:
    """Likelihood-weighted and plain n-gram overlap over the given orders.

    wrec sums the weights of target n-grams also present in the source over
    the total target weight; wprec mirrors it on the source side.  Any empty
    denominator makes all six outputs 0.
    """
    orders = tuple(orders)
    if not orders:
        raise ValueError("orders must be nonempty")
    src_grams = _distinct_ngrams(src, orders)
    tgt_grams = _distinct_ngrams(tgt, orders)
    src_total = sum(table.weight(g) for g in src_grams)
    tgt_total = sum(table.weight(g) for g in tgt_grams)
    if not src_grams or not tgt_grams or src_total == 0.0 or tgt_total == 0.0:
        return OverlapScores(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    common = src_grams & tgt_grams
    common_w = sum(table.weight(g) for g in common)
    wprec = common_w / src_total
    wrec = common_w / tgt_total
    wf1 = 2.0 * wprec * wrec / (wprec + wrec) if wprec + wrec > 0 else 0.0
    wgm = math.sqrt(wprec * wrec)
    rec = len(common) / len(tgt_grams)
    prec = len(common) / len(src_grams)
    return OverlapScores(wprec, wrec, wf1, wgm, rec, prec)


def lm_features(lm: WittenBellLM, seq: TokenSeq) -> tuple[float, float, float]:
    """(log2 prob, bits per word, OOV rate) of ``seq`` under ``lm``."""
    logprob, n_events = lm.sequence_logprob2(seq)
    bpw = -logprob / n_events
    if len(seq):
        oov = sum(1 for t in seq.tokens if not lm.in_vocab(t)) / len(seq)
    else:
        oov = 0.0
    return logprob, bpw, oov


NULL = "<null>"


class AlignmentModel:
    """IBM Model 1 lexical table t(target word | source word), EM-trained.

    A null source token absorbs target words with no good counterpart.  The
    table is stored sparsely over co-occurring pairs; for each source word the
    stored probabilities sum to 1.
    """

    def __init__(self, table: dict[str, dict[str, float]], log_likelihoods: list[float]):
        self.table = table
        self.log_likelihoods = log_likelihoods

    def prob(self, tgt_word: str, src_word: str) -> float:
        return self.table.get(src_word, {}).get(tgt_word, 0.0)

    def align(self, src: TokenSeq, tgt: TokenSeq) -> list[int | None]:
        """Viterbi link per target token: source index, or None for null.

        Ties prefer the lowest source index; null wins only by a strictly
        higher probability.  Target words with no probability mass anywhere
        go to null.
        """
        links: list[int | None] = []
        for f in tgt.tokens:
            best_i: int | None = None
            best_p = 0.0
            for i, e in enumerate(src.tokens):
                p = self.prob(f, e)
                if p > best_p:
                    best_i, best_p = i, p
            if self.prob(f, NULL) > best_p:
                best_i = None
            links.append(best_i)
        return links


def train_aligner(pairs: list[tuple[TokenSeq, TokenSeq]], iterations: int = 5) -> AlignmentModel:
    """Train IBM Model 1 by EM with uniform init over co-occurring word pairs.

    Records the corpus log-likelihood (natural log, including the 1/(l+1)
    alignment prior) under the parameters at the start of each iteration;
    the sequence is non-decreasing.
    """
    if not pairs:
        raise ValueError("pairs must be nonempty")
    cooc: dict[str, set] = {}
    for src, tgt in pairs:
        for e in list(src.tokens) + [NULL]:
            cooc.setdefault(e, set()).update(tgt.tokens)
    table = {e: {f: 1.0 / len(fs) for f in fs} for e, fs in cooc.items() if fs}

    lls = []
    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = {e: {} for e in table}
        totals: dict[str, float] = {e: 0.0 for e in table}
        ll = 0.0
        for src, tgt in pairs:
            src_words = list(src.tokens) + [NULL]
            for f in tgt.tokens:
                denom = sum(table[e].get(f, 0.0) for e in src_words)
                if denom <= 0.0:
                    continue
                ll += math.log(denom / len(src_words))
                for e in src_words:
                    p = table[e].get(f, 0.0)
                    if p > 0.0:
                        share = p / denom
                        counts[e][f] = counts[e].get(f, 0.0) + share
                        totals[e] += share
        lls.append(ll)
        for e, fs in counts.items():
            if totals[e] > 0.0:
                table[e] = {f: c / totals[e] for f, c in fs.items()}
    return AlignmentModel(table, lls)


def _levenshtein(a: list[str], b: list[str]) -> int:
    if not a:
        return len(b)
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        cur = [i]
        for j, y in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def alignment_features(model: AlignmentModel, src: TokenSeq, tgt: TokenSeq) -> tuple[float, float]:
    """(1 - WER, alignment F1) of the Viterbi alignment of tgt onto src.

    The aligned sequence is the source tokens hit by each target token in
    target order (null links dropped); WER is its Levenshtein distance to the
    source over max(len(src), 1).  F1 combines target coverage (non-null
    fraction) with source coverage (fraction of source positions hit).
    """
    if len(tgt) == 0:
        return 0.0, 0.0
    links = model.align(src, tgt)
    aligned = [src.tokens[i] for i in links if i is not None]
    wer = _levenshtein(aligned, list(src.tokens)) / max(len(src), 1)
    one_minus_wer = min(1.0, max(0.0, 1.0 - wer))
    tgt_cov = sum(1 for i in links if i is not None) / len(tgt)
    src_cov = len({i for i in links if i is not None}) / len(src) if len(src) else 0.0
    f1 = 2.0 * tgt_cov * src_cov / (tgt_cov + src_cov) if tgt_cov + src_cov > 0 else 0.0
    return one_minus_wer, min(1.0, max(0.0, f1))


def length_features(src: TokenSeq, tgt: TokenSeq) -> tuple[float, ...]:
    """Token/char counts of both sides and src/tgt ratios (0 when tgt empty)."""
    token_ratio = len(src) / len(tgt) if len(tgt) else 0.0
    char_ratio = src.char_count / tgt.char_count if tgt.char_count else 0.0
    return (
        float(len(src)),
        float(len(tgt)),
        float(src.char_count),
        float(tgt.char_count),
        token_ratio,
        char_ratio,
    )


@dataclass
class FeatureResources:
    """Everything feature extraction needs, trained on the interpretants."""

    weight_table: NGramWeightTable
    lm: WittenBellLM
    aligner: AlignmentModel


def extract_feature_vector(src: TokenSeq, tgt: TokenSeq, resources: FeatureResources) -> np.ndarray:
    """The full 41-feature vector for one (src, tgt) pair; never NaN/inf."""
    for name in ("weight_table", "lm", "aligner"):
        if getattr(resources, name, None) is None:
            raise ValueError(f"missing resource: {name}")
    values: list[float] = []
    for orders in ORDER_SETS:
        values.extend(weighted_overlap(src, tgt, resources.weight_table, orders))
    values.extend(lm_features(resources.lm, src))
    values.extend(alignment_features(resources.aligner, src, tgt))
    values.extend(length_features(src, tgt))
    vec = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(vec)):
        bad = FEATURE_NAMES[int(np.flatnonzero(~np.isfinite(vec))[0])]
        raise AssertionError(f"non-finite feature {bad}")
    return vec


def build_feature_matrix(rows: list[tuple[TokenSeq, TokenSeq]], resources: FeatureResources) -> np.ndarray:
    """Stack feature vectors for each (src, tgt) row, preserving order."""
    if not rows:
        return np.empty((0, N_FEATURES))
    return np.vstack([extract_feature_vector(s, t, resources) for s, t in rows])
