"""
File name: emission_model.py
Python Version: 3.11

Description:
    Observation probabilities.

    Known triplets:
        paper_faithful: P(o|t) = C(o,t) / C(o)
        standard:       P(o|t) = C(o,t) / C(t)

    Unknown triplets go through a suffix model built on rare pseudo words
    (word + US + pos + US + chunk, US = U+001F). Suffix estimates are
    smoothed with successively shorter suffixes:

        P(t|s_i) = (p^(t|s_i) + theta * P(t|s_i-1)) / (1 + theta)

    and turned into an emission score by dividing by the tag prior.

Usage:
    emissions = build_emission(corpus, "paper_faithful")
    suffixes = build_suffix_model(corpus, max_len=9)

License:
    This code is released under the MIT License.

Notes:
    Suffix probabilities are kept sparse: only (suffix, tag) pairs seen in
    rare words are explicit. Any other pair equals
    theta / (1 + theta) * P(t | parent suffix), so nothing is lost.
"""

from __future__ import annotations

import threading
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import numpy as np

from corpus_io import ObservationTriplet, Sentence
from errors import NoRareWords, UnknownObservation, UnknownTag, UntaggedSentence

EmissionMode = Literal["paper_faithful", "standard"]
EMISSION_MODES: Tuple[str, ...] = ("paper_faithful", "standard")

# joins word, pos and chunk into a pseudo word
FIELD_SEPARATOR = "\x1f"


def pseudo_word(o: ObservationTriplet) -> str:
    """
    word + US + pos + US + chunk; US counts as one character in suffixes.
    """
    return f"{o.word}{FIELD_SEPARATOR}{o.pos}{FIELD_SEPARATOR}{o.chunk}"


@dataclass
class EmissionModel:
    """
    Triplet/tag counts. joint_counts[o][t] = C(o,t).
    """

    joint_counts: Dict[ObservationTriplet, Counter] = field(default_factory=dict)
    obs_counts: Counter = field(default_factory=Counter)
    tag_counts: Counter = field(default_factory=Counter)
    mode: EmissionMode = "paper_faithful"

    def is_known(self, o: ObservationTriplet) -> bool:
        """True when the triplet was seen in training."""
        return self.obs_counts.get(o, 0) > 0


def build_emission(
    corpus: Sequence[Sentence], mode: EmissionMode = "paper_faithful"
) -> EmissionModel:
    """
    Accumulate C(o,t), C(o), C(t) over every token.
    """
    if mode not in EMISSION_MODES:
        raise ValueError(f"unknown emission mode {mode!r}")
    model = EmissionModel(mode=mode)
    for idx, sentence in enumerate(corpus):
        if not sentence.tags:
            raise UntaggedSentence(f"sentence {idx} has no NE tags")
        for o, tag in zip(sentence.tokens, sentence.tags):
            t = str(tag)
            model.joint_counts.setdefault(o, Counter())[t] += 1
            model.obs_counts[o] += 1
            model.tag_counts[t] += 1
    return model


def emission_prob(model: EmissionModel, o: ObservationTriplet, t: str) -> float:
    """
    P(o|t) for a known triplet, according to model.mode.
    Raises UnknownObservation for unseen triplets.
    """
    c_o = model.obs_counts.get(o, 0)
    if c_o == 0:
        raise UnknownObservation(f"triplet {o.word!r}/{o.pos}/{o.chunk} not seen in training")
    if t not in model.tag_counts:
        raise UnknownTag(f"tag {t!r} not in inventory")
    c_ot = model.joint_counts[o].get(t, 0)
    if c_ot == 0:
        return 0.0
    if model.mode == "paper_faithful":
        return c_ot / c_o
    return c_ot / model.tag_counts[t]


@dataclass
class SuffixModel:
    """
    Smoothed P(t | suffix) for suffixes (length 0..max_len) of rare
    pseudo words, plus the corpus tag priors used for Bayesian inversion.

    suffix_tag_probs holds the explicit entries only; use suffix_prob or
    suffix_distribution to read resolved values.
    """

    max_len: int
    theta: float
    suffix_tag_probs: Dict[str, Dict[str, float]]
    tag_priors: Dict[str, float]
    _cache: Dict[str, Dict[str, float]] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )
    _lock: threading.Lock = field(
        default_factory=threading.Lock, init=False, repr=False, compare=False
    )


def _tag_priors(corpus: Sequence[Sentence]) -> Dict[str, float]:
    counts: Counter = Counter(str(t) for s in corpus for t in s.tags)
    total = sum(counts.values())
    return {t: counts[t] / total for t in sorted(counts)}


def compute_theta(tag_priors: Dict[str, float]) -> float:
    """
    Sample standard deviation (ddof=1) of the unconditioned tag
    probabilities; 0 with fewer than two tags.
    """
    if len(tag_priors) < 2:
        return 0.0
    values = np.array([tag_priors[t] for t in sorted(tag_priors)], dtype=float)
    return float(np.std(values, ddof=1))


def _suffixes(word: str, max_len: int) -> List[str]:
    # "" first, then longer and longer
    longest = min(max_len, len(word))
    return [word[len(word) - i :] if i else "" for i in range(longest + 1)]


def build_suffix_model(
    corpus: Sequence[Sentence], max_len: int, rare_max: int = 2
) -> SuffixModel:
    """
    Harvest suffixes of pseudo words whose triplet frequency is <= rare_max
    and smooth them bottom-up, from the empty suffix to max_len.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    for idx, sentence in enumerate(corpus):
        if not sentence.tags:
            raise UntaggedSentence(f"sentence {idx} has no NE tags")

    triplet_freq: Counter = Counter(o for s in corpus for o in s.tokens)
    suffix_counts: Dict[str, Counter] = defaultdict(Counter)
    for sentence in corpus:
        for o, tag in zip(sentence.tokens, sentence.tags):
            if triplet_freq[o] > rare_max:
                continue
            for suffix in _suffixes(pseudo_word(o), max_len):
                suffix_counts[suffix][str(tag)] += 1

    if not suffix_counts:
        raise NoRareWords(f"no pseudo word with frequency <= {rare_max}")

    priors = _tag_priors(corpus)
    theta = compute_theta(priors)

    probs: Dict[str, Dict[str, float]] = {}
    # parents (shorter suffixes) are always smoothed before their children
    for suffix in sorted(suffix_counts, key=lambda s: (len(s), s)):
        counts = suffix_counts[suffix]
        total = sum(counts.values())
        if suffix == "":
            probs[suffix] = {t: counts[t] / total for t in sorted(counts)}
            continue
        parent = probs[suffix[1:]]
        # every tag seen with this suffix was also seen with its parent
        probs[suffix] = {
            t: (counts[t] / total + theta * parent[t]) / (1.0 + theta)
            for t in sorted(counts)
        }

    return SuffixModel(
        max_len=max_len, theta=theta, suffix_tag_probs=probs, tag_priors=priors
    )


def longest_suffix(model: SuffixModel, o: ObservationTriplet) -> str:
    """
    Longest stored suffix of pseudo_word(o) with length <= max_len.
    """
    word = pseudo_word(o)
    for suffix in reversed(_suffixes(word, model.max_len)):
        if suffix in model.suffix_tag_probs:
            return suffix
    return ""


def suffix_distribution(model: SuffixModel, suffix: str) -> Dict[str, float]:
    """
    Resolved P(t | suffix) for every tag with a prior, for a stored suffix.
    """
    cached = model._cache.get(suffix)  # pylint: disable=protected-access
    if cached is not None:
        return cached
    if suffix not in model.suffix_tag_probs:
        raise KeyError(f"suffix {suffix!r} not in model")

    # walk the chain from the empty suffix up
    chain = [suffix[len(suffix) - i :] if i else "" for i in range(len(suffix) + 1)]
    damp = model.theta / (1.0 + model.theta)
    dist = {t: 0.0 for t in model.tag_priors}
    for level, s in enumerate(chain):
        if level > 0:
            dist = {t: damp * p for t, p in dist.items()}
        dist.update(model.suffix_tag_probs[s])

    with model._lock:  # pylint: disable=protected-access
        model._cache[suffix] = dist  # pylint: disable=protected-access
    return dist


def suffix_prob(model: SuffixModel, suffix: str, t: str) -> float:
    """Resolved P(t | suffix) for one tag."""
    return suffix_distribution(model, suffix).get(t, 0.0)


def unknown_emission_score(
    model: SuffixModel, o: ObservationTriplet, t: str, suffix: Optional[str] = None
) -> float:
    """
    P(t | longest matching suffix) / P^(t). Proportional to P(o|t); the
    tag-independent P(o) factor is dropped.
    """
    prior = model.tag_priors.get(t, 0.0)
    if prior <= 0.0:
        raise UnknownTag(f"tag {t!r} has no prior in the suffix model")
    s = longest_suffix(model, o) if suffix is None else suffix
    return suffix_prob(model, s, t) / prior
