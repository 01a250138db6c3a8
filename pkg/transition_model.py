"""
File name: transition_model.py
Python Version: 3.11

Description:
    Tag n-gram statistics and smoothed trigram transitions:

        P(t | t'', t') = l1 * P^(t | t'', t') + l2 * P^(t | t') + l3 * P^(t)

    with l1..l3 estimated by deleted interpolation.

    Every sentence is counted as START START t1 .. tn END. START only
    appears in histories; END is a unigram like any emitted tag, so
    N = sum of unigram counts = tokens + sentences.

Usage:
    model = count_ngrams(corpus)
    model.lambdas = estimate_lambdas(model)
    transition_prob(model, START, START, "B-PER")

License:
    This code is released under the MIT License.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from corpus_io import Sentence
from errors import DegenerateCorpus, UnknownTag, UntaggedSentence

START = "<S>"
END = "</S>"

Lambdas = Tuple[float, float, float]


@dataclass(frozen=True)
class TagInventory:
    """
    Corpus tags in a stable (sorted) order with dense indices.
    START and END are reserved and never part of `tags`.
    """

    tags: Tuple[str, ...]

    def __post_init__(self) -> None:
        if START in self.tags or END in self.tags:
            raise ValueError("boundary symbols cannot be corpus tags")
        if len(set(self.tags)) != len(self.tags):
            raise ValueError("duplicate tags in inventory")
        object.__setattr__(self, "_index", {t: i for i, t in enumerate(self.tags)})

    @classmethod
    def from_tags(cls, tags: Iterable[str]) -> "TagInventory":
        """Build from any iterable of surface tags."""
        return cls(tuple(sorted(set(tags))))

    def index(self, tag: str) -> int:
        """Dense index of a corpus tag."""
        try:
            return self._index[tag]  # type: ignore[attr-defined]
        except KeyError as e:
            raise UnknownTag(f"tag {tag!r} not in inventory") from e

    def __len__(self) -> int:
        return len(self.tags)

    def __contains__(self, tag: object) -> bool:
        return tag in self._index  # type: ignore[attr-defined]


@dataclass
class TransitionModel:
    """
    Tag unigram/bigram/trigram counts and interpolation weights.
    Mutated only while training; treat as read-only afterwards.
    """

    unigram_counts: Counter = field(default_factory=Counter)
    bigram_counts: Counter = field(default_factory=Counter)
    trigram_counts: Counter = field(default_factory=Counter)
    total_tokens: int = 0
    lambdas: Optional[Lambdas] = None

    @property
    def sentence_count(self) -> int:
        """Number of training sentences, i.e. C(START) = C(START, START)."""
        return sum(c for (t1, _), c in self.bigram_counts.items() if t1 == START)

    @property
    def tags(self) -> Tuple[str, ...]:
        """Corpus tags seen in training (END excluded), sorted."""
        return tuple(sorted(t for t in self.unigram_counts if t != END))

    def history_count(self, t1: str) -> int:
        """C(t') as a bigram history."""
        if t1 == START:
            return self.sentence_count
        return self.unigram_counts.get(t1, 0)

    def pair_history_count(self, t2: str, t1: str) -> int:
        """C(t'', t') as a trigram history."""
        if t2 == START and t1 == START:
            return self.sentence_count
        return self.bigram_counts.get((t2, t1), 0)


def _ratio(num: float, den: float) -> float:
    # 0/0 (and any x/0) -> 0
    return num / den if den > 0 else 0.0


def count_ngrams(corpus: Sequence[Sentence]) -> TransitionModel:
    """
    Count tag n-grams over START START t1..tn END (lambdas left unset).
    """
    model = TransitionModel()
    for idx, sentence in enumerate(corpus):
        if not sentence.tags:
            raise UntaggedSentence(f"sentence {idx} has no NE tags")
        padded = [START, START] + [str(t) for t in sentence.tags] + [END]
        for i in range(2, len(padded)):
            model.unigram_counts[padded[i]] += 1
            model.bigram_counts[(padded[i - 1], padded[i])] += 1
            model.trigram_counts[(padded[i - 2], padded[i - 1], padded[i])] += 1
        model.total_tokens += len(padded) - 2
    return model


def estimate_lambdas(model: TransitionModel) -> Lambdas:
    """
    Deleted interpolation: each trigram's count goes to the order whose
    leave-one-out estimate is largest (ties go to the higher order).
    """
    n = model.total_tokens
    if n <= 1:
        raise DegenerateCorpus(f"need more than one tag position, got {n}")

    acc = [0, 0, 0]
    # sorted for a fixed accumulation order
    for (t2, t1, t), c in sorted(model.trigram_counts.items()):
        if c <= 0:
            continue
        tri = _ratio(c - 1, model.pair_history_count(t2, t1) - 1)
        bi = _ratio(model.bigram_counts[(t1, t)] - 1, model.history_count(t1) - 1)
        uni = _ratio(model.unigram_counts[t] - 1, n - 1)
        if tri >= bi and tri >= uni:
            acc[0] += c
        elif bi >= uni:
            acc[1] += c
        else:
            acc[2] += c

    total = sum(acc)
    if total == 0:
        raise DegenerateCorpus("deleted interpolation found no trigram mass")
    return (acc[0] / total, acc[1] / total, acc[2] / total)


def _check_symbols(model: TransitionModel, t2: str, t1: str, t: str) -> None:
    known = model.unigram_counts
    for h in (t2, t1):
        if h != START and (h == END or h not in known):
            raise UnknownTag(f"history tag {h!r} not in inventory")
    if t == START or t not in known:
        raise UnknownTag(f"tag {t!r} not in inventory")


def _require_lambdas(model: TransitionModel) -> Lambdas:
    if model.lambdas is None:
        raise DegenerateCorpus("lambdas are not estimated yet")
    return model.lambdas


def transition_prob(model: TransitionModel, t2: str, t1: str, t: str) -> float:
    """
    Smoothed P(t | t2, t1); t2, t1 in tags + START, t in tags + END.
    """
    l1, l2, l3 = _require_lambdas(model)
    _check_symbols(model, t2, t1, t)
    p3 = _ratio(model.trigram_counts.get((t2, t1, t), 0), model.pair_history_count(t2, t1))
    p2 = _ratio(model.bigram_counts.get((t1, t), 0), model.history_count(t1))
    p1 = _ratio(model.unigram_counts.get(t, 0), model.total_tokens)
    return l1 * p3 + l2 * p2 + l3 * p1


def bigram_prob(model: TransitionModel, t1: str, t: str) -> float:
    """
    Bigram-only variant, (l1 + l2) * P^(t | t1) + l3 * P^(t),
    used for the literal end term P(END | tn).
    """
    l1, l2, l3 = _require_lambdas(model)
    _check_symbols(model, START, t1, t)
    p2 = _ratio(model.bigram_counts.get((t1, t), 0), model.history_count(t1))
    p1 = _ratio(model.unigram_counts.get(t, 0), model.total_tokens)
    return (l1 + l2) * p2 + l3 * p1


def _safe_log(values: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(values)


def log_transition_cube(
    model: TransitionModel, inventory: TagInventory
) -> Dict[str, np.ndarray]:
    """
    Dense natural-log transitions for the decoder.

    Index K = len(inventory) stands for START in history axes and END in
    the last axis:
      "trigram": [t'', t', t] shape (K+1, K+1, K+1)
      "bigram_end": [t'] shape (K+1,), log bigram_prob(t', END)
    log(0) is -inf.
    """
    l1, l2, l3 = _require_lambdas(model)
    k = len(inventory)

    def hist(tag: str) -> int:
        return k if tag == START else inventory.index(tag)

    def nxt(tag: str) -> int:
        return k if tag == END else inventory.index(tag)

    tri = np.zeros((k + 1, k + 1, k + 1))
    for (t2, t1, t), c in model.trigram_counts.items():
        tri[hist(t2), hist(t1), nxt(t)] = c
    bi = np.zeros((k + 1, k + 1))
    for (t1, t), c in model.bigram_counts.items():
        bi[hist(t1), nxt(t)] = c
    uni = np.zeros(k + 1)
    for t, c in model.unigram_counts.items():
        uni[nxt(t)] = c

    # history totals equal the counts used by transition_prob
    tri_hist = tri.sum(axis=2, keepdims=True)
    bi_hist = bi.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p3 = np.where(tri_hist > 0, tri / np.where(tri_hist > 0, tri_hist, 1), 0.0)
        p2 = np.where(bi_hist > 0, bi / np.where(bi_hist > 0, bi_hist, 1), 0.0)
    p1 = uni / model.total_tokens

    smoothed = l1 * p3 + l2 * p2[None, :, :] + l3 * p1[None, None, :]
    bigram_end = (l1 + l2) * p2[:, k] + l3 * p1[k]
    return {"trigram": _safe_log(smoothed), "bigram_end": _safe_log(bigram_end)}


def train_transitions(corpus: Sequence[Sentence]) -> TransitionModel:
    """
    count_ngrams + estimate_lambdas.
    """
    model = count_ngrams(corpus)
    model.lambdas = estimate_lambdas(model)
    return model
