"""
File name: decoder.py
Python Version: 3.11

Description:
    Trigram Viterbi decoding of POS-tagged, chunked sentences into NE tags,
    plus the output repair that erases orphan I-runs.

    Score of a tag sequence (natural log, -inf for probability 0):

        sum_i [ log e(o_i, t_i) + log P(t_i | t_i-2, t_i-1) ] + log P(END | t_n-1, t_n)

    with START padding. e() is emission_prob for known triplets and
    unknown_emission_score otherwise.

Usage:
    model = train_model(corpus, max_suffix_len=9)
    tags = viterbi_decode(model, sentence)
    tagged = tag_corpus(model, corpus, workers=4)

License:
    This code is released under the MIT License.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

import config
from corpus_io import OUTSIDE, NeTag, ObservationTriplet, Sentence
from emission_model import (
    EmissionMode,
    EmissionModel,
    SuffixModel,
    build_emission,
    build_suffix_model,
    longest_suffix,
    suffix_distribution,
)
from errors import DecodeError, EmptySentence, NoViablePath
from log_helpers import log_json
from transition_model import (
    TagInventory,
    TransitionModel,
    log_transition_cube,
    train_transitions,
)
from utils import get_console_logger

logger = get_console_logger("decoder")

NEG_INF = float("-inf")


@dataclass(frozen=True)
class TrainedModel:
    """
    Everything needed to decode. All submodels share `inventory`.

    params records training settings for the model file header
    (language, rare_max, ...).
    """

    inventory: TagInventory
    transitions: TransitionModel
    emissions: EmissionModel
    suffixes: SuffixModel
    format_version: str = config.MODEL_FORMAT_VERSION
    params: Dict[str, str] = field(default_factory=dict, compare=False)
    # log emission rows per triplet, filled while decoding
    _rows: Dict[ObservationTriplet, np.ndarray] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    @cached_property
    def log_transitions(self) -> Dict[str, np.ndarray]:
        return log_transition_cube(self.transitions, self.inventory)

    @cached_property
    def tag_totals(self) -> np.ndarray:
        return np.array(
            [self.emissions.tag_counts[t] for t in self.inventory.tags], dtype=float
        )

    def known_log_emissions(self, o: ObservationTriplet) -> np.ndarray:
        """
        log emission_prob(o, t) for every inventory tag (o must be known).
        """
        counts = self.emissions.joint_counts[o]
        row = np.array([counts.get(t, 0) for t in self.inventory.tags], dtype=float)
        if self.emissions.mode == "paper_faithful":
            probs = row / self.emissions.obs_counts[o]
        else:
            probs = row / self.tag_totals
        with np.errstate(divide="ignore"):
            return np.log(probs)

    def unknown_log_emissions(self, o: ObservationTriplet) -> np.ndarray:
        """
        log unknown_emission_score(o, t) for every inventory tag.
        """
        dist = suffix_distribution(self.suffixes, longest_suffix(self.suffixes, o))
        priors = self.suffixes.tag_priors
        scores = np.array(
            [
                dist.get(t, 0.0) / priors[t] if priors.get(t, 0.0) > 0 else 0.0
                for t in self.inventory.tags
            ]
        )
        with np.errstate(divide="ignore"):
            return np.log(scores)

    def log_emissions(self, o: ObservationTriplet) -> np.ndarray:
        """
        Known path when the triplet was seen, suffix path otherwise.
        The returned row is shared: do not modify it. At most
        config.EMISSION_CACHE_SIZE rows are cached; later ones are recomputed.
        """
        row = self._rows.get(o)
        if row is None:
            if self.emissions.is_known(o):
                row = self.known_log_emissions(o)
            else:
                row = self.unknown_log_emissions(o)
            if len(self._rows) < config.EMISSION_CACHE_SIZE:
                self._rows[o] = row
        return row


def train_model(
    corpus: Sequence[Sentence],
    *,
    max_suffix_len: int = config.DEFAULT_SUFFIX_LEN,
    rare_max: int = config.RARE_MAX,
    mode: EmissionMode = "paper_faithful",
    language: Optional[str] = None,
) -> TrainedModel:
    """
    Build the full model from a tagged corpus.
    """
    transitions = train_transitions(corpus)
    log_json(
        logger,
        "train.counts",
        unigrams=len(transitions.unigram_counts),
        bigrams=len(transitions.bigram_counts),
        trigrams=len(transitions.trigram_counts),
        sentences=transitions.sentence_count,
    )
    log_json(
        logger,
        "train.lambdas",
        lambdas=list(transitions.lambdas or ()),
        tokens=transitions.total_tokens,
    )
    emissions = build_emission(corpus, mode)
    suffixes = build_suffix_model(corpus, max_suffix_len, rare_max)
    log_json(
        logger,
        "train.suffix_model",
        suffixes=len(suffixes.suffix_tag_probs),
        theta=suffixes.theta,
        max_len=max_suffix_len,
    )
    inventory = TagInventory.from_tags(emissions.tag_counts)
    params = {
        "mode": mode,
        "max_suffix_len": str(max_suffix_len),
        "rare_max": str(rare_max),
        "language": language or "",
    }
    return TrainedModel(inventory, transitions, emissions, suffixes, params=params)


class DecodeResult(NamedTuple):
    """Best path and its natural-log score."""

    tags: List[NeTag]
    log_score: float


def viterbi(
    model: TrainedModel, sentence: Sentence, strict_bigram_end: bool = False
) -> DecodeResult:
    """
    Trigram Viterbi over (t', t) pair states.

    delta[t', t] is the best score of a prefix ending in tags t', t; row K
    of the t' axis stands for START. Ties resolve to the lowest tag index.
    """
    n = len(sentence.tokens)
    if n == 0:
        raise EmptySentence("sentence has no tokens")

    k = len(model.inventory)
    cube = model.log_transitions["trigram"]
    body = cube[:, :k, :k]  # [t'', t' (tags only), t]

    backpointers: List[np.ndarray] = []
    delta = np.full((k + 1, k), NEG_INF)
    for i, o in enumerate(sentence.tokens):
        emit = model.log_emissions(o)
        if i == 0:
            step = np.full((k + 1, k), NEG_INF)
            step[k, :] = cube[k, k, :k] + emit
            new_delta, bp = step, np.full((k + 1, k), k, dtype=int)
        else:
            new_delta, bp = _advance(delta, body, emit, k)

        if not np.isfinite(new_delta).any() and model.emissions.is_known(o):
            # dead end on a known triplet: fall back to the suffix model
            emit = model.unknown_log_emissions(o)
            if i == 0:
                new_delta = np.full((k + 1, k), NEG_INF)
                new_delta[k, :] = cube[k, k, :k] + emit
            else:
                new_delta, bp = _advance(delta, body, emit, k)
        if not np.isfinite(new_delta).any():
            raise NoViablePath(f"no tag sequence has nonzero probability at token {i}")

        delta = new_delta
        backpointers.append(bp)

    if strict_bigram_end:
        end = model.log_transitions["bigram_end"][:k]
        final = delta + end[None, :]
    else:
        final = delta + cube[:, :k, k]
    if not np.isfinite(final).any():
        raise NoViablePath("no tag sequence can reach the sentence end")

    flat = int(np.argmax(final))
    t1, t = divmod(flat, k)
    log_score = float(final[t1, t])

    path = [t]
    prev, cur = t1, t
    for i in range(n - 1, 0, -1):
        path.append(prev)
        prev, cur = int(backpointers[i][prev, cur]), prev
    path.reverse()

    tags = [NeTag.parse(model.inventory.tags[j]) for j in path]
    return DecodeResult(tags, log_score)


def _advance(delta: np.ndarray, body: np.ndarray, emit: np.ndarray, k: int):
    # cand[t'', t', t] = delta[t'', t'] + log P(t | t'', t')
    cand = delta[:, :, None] + body
    bp = cand.argmax(axis=0)
    best = cand.max(axis=0) + emit[None, :]
    new_delta = np.full((k + 1, k), NEG_INF)
    new_delta[:k, :] = best
    full_bp = np.full((k + 1, k), k, dtype=int)
    full_bp[:k, :] = bp
    return new_delta, full_bp


def viterbi_decode(
    model: TrainedModel, sentence: Sentence, strict_bigram_end: bool = False
) -> List[NeTag]:
    """
    Most likely NE tag sequence for an (untagged) sentence.
    """
    return viterbi(model, sentence, strict_bigram_end).tags


def postprocess(tags: Sequence[NeTag]) -> List[NeTag]:
    """
    Erase orphan runs: an I (or the E closing the run) whose predecessor
    in the output is O becomes O. Sentence start counts as O.
    """
    out: List[NeTag] = []
    prev = OUTSIDE
    for tag in tags:
        if tag.kind in ("I", "E") and prev.kind == "O":
            tag = OUTSIDE
        out.append(tag)
        prev = tag
    return out


def _tag_one(
    model: TrainedModel, idx: int, sentence: Sentence, strict_bigram_end: bool
) -> Sentence:
    try:
        tags = viterbi_decode(model, sentence, strict_bigram_end)
    except DecodeError as e:
        raise type(e)(f"sentence {idx}: {e.message}") from e
    return sentence.with_tags(postprocess(tags))


def tag_corpus(
    model: TrainedModel,
    corpus: Sequence[Sentence],
    *,
    workers: int = 1,
    strict_bigram_end: bool = False,
) -> List[Sentence]:
    """
    Decode then postprocess every sentence. Output order = input order.
    """
    jobs = list(enumerate(corpus))
    if workers <= 1:
        out = [_tag_one(model, i, s, strict_bigram_end) for i, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            out = list(
                pool.map(lambda job: _tag_one(model, job[0], job[1], strict_bigram_end), jobs)
            )
    log_json(logger, "tag.done", sentences=len(out), workers=workers)
    return out
