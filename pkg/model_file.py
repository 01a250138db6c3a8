"""
File name: model_file.py
Python Version: 3.11

Description:
    Save/load a TrainedModel as a sectioned, line-oriented UTF-8 text file.

    Section order is fixed:
        HEADER, LAMBDAS, TAGS, UNIGRAM, BIGRAM, TRIGRAM, EMIT, OBSCOUNT,
        TAGPRIOR, THETA, MAXSUFLEN, SUFFIX
    each introduced by a line "#SECTION <NAME>". Records are tab separated,
    counts are decimal integers, floats use 17 significant digits, and
    text fields escape backslash as \\\\ and U+001F as \\x1f.

    See docs/model_file_format.md.

License:
    This code is released under the MIT License.
"""

from __future__ import annotations

import re
from collections import Counter
from pathlib import Path
from typing import Dict, List, Union

import config
from corpus_io import ObservationTriplet
from decoder import TrainedModel
from emission_model import EMISSION_MODES, EmissionModel, SuffixModel
from errors import ModelFormatError
from log_helpers import log_json
from transition_model import TagInventory, TransitionModel
from utils import get_console_logger, read_text, write_text_atomic

logger = get_console_logger("model_file")

SECTIONS = (
    "HEADER",
    "LAMBDAS",
    "TAGS",
    "UNIGRAM",
    "BIGRAM",
    "TRIGRAM",
    "EMIT",
    "OBSCOUNT",
    "TAGPRIOR",
    "THETA",
    "MAXSUFLEN",
    "SUFFIX",
)
SECTION_PREFIX = "#SECTION "
SUPPORTED_VERSIONS = (config.MODEL_FORMAT_VERSION,)

_UNESCAPE = re.compile(r"\\(\\|x1f)")


def escape(text: str) -> str:
    """Make a text field safe for a record line."""
    return text.replace("\\", "\\\\").replace("\x1f", "\\x1f")


def unescape(text: str) -> str:
    """Inverse of escape."""
    return _UNESCAPE.sub(lambda m: "\\" if m.group(1) == "\\" else "\x1f", text)


def fmt_float(value: float) -> str:
    """17 significant digits: float(fmt_float(x)) == x."""
    return format(value, ".17g")


def dumps_model(model: TrainedModel) -> str:
    """
    Serialize a model. Records are sorted, so the same model always
    gives the same bytes.
    """
    tr, em, sf = model.transitions, model.emissions, model.suffixes
    if tr.lambdas is None:
        raise ModelFormatError("cannot save a model without lambdas")
    out: List[str] = []

    def section(name: str) -> None:
        out.append(f"{SECTION_PREFIX}{name}")

    def record(*fields: object) -> None:
        out.append("\t".join(str(f) for f in fields))

    section("HEADER")
    record("format_version", model.format_version)
    record("mode", em.mode)
    for key in sorted(model.params):
        if key != "mode":
            record(key, escape(model.params[key]))

    section("LAMBDAS")
    record(*(fmt_float(x) for x in tr.lambdas))

    section("TAGS")
    for tag in model.inventory.tags:
        record(escape(tag))

    section("UNIGRAM")
    for tag, c in sorted(tr.unigram_counts.items()):
        record(escape(tag), c)

    section("BIGRAM")
    for (t1, t), c in sorted(tr.bigram_counts.items()):
        record(escape(t1), escape(t), c)

    section("TRIGRAM")
    for (t2, t1, t), c in sorted(tr.trigram_counts.items()):
        record(escape(t2), escape(t1), escape(t), c)

    def _key(o: ObservationTriplet):
        return (o.word, o.pos, o.chunk)

    section("EMIT")
    for o in sorted(em.joint_counts, key=_key):
        for tag, c in sorted(em.joint_counts[o].items()):
            record(escape(o.word), escape(o.pos), escape(o.chunk), escape(tag), c)

    section("OBSCOUNT")
    for o in sorted(em.obs_counts, key=_key):
        record(escape(o.word), escape(o.pos), escape(o.chunk), em.obs_counts[o])

    section("TAGPRIOR")
    for tag, p in sorted(sf.tag_priors.items()):
        record(escape(tag), fmt_float(p))

    section("THETA")
    record(fmt_float(sf.theta))

    section("MAXSUFLEN")
    record(sf.max_len)

    section("SUFFIX")
    for suffix in sorted(sf.suffix_tag_probs):
        for tag, p in sorted(sf.suffix_tag_probs[suffix].items()):
            record(escape(suffix), escape(tag), fmt_float(p))

    return "\n".join(out) + "\n"


def _split_sections(text: str) -> Dict[str, List[List[str]]]:
    sections: Dict[str, List[List[str]]] = {}
    current = None
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line:
            continue
        if line.startswith(SECTION_PREFIX):
            name = line[len(SECTION_PREFIX) :].strip()
            expected = SECTIONS[len(sections)] if len(sections) < len(SECTIONS) else None
            if name != expected:
                raise ModelFormatError(
                    f"expected section {expected}, found {name}", line=lineno
                )
            current = sections.setdefault(name, [])
            continue
        if current is None:
            raise ModelFormatError("record before the first section", line=lineno)
        current.append(line.split("\t"))
    missing = [s for s in SECTIONS if s not in sections]
    if missing:
        raise ModelFormatError(f"missing sections: {', '.join(missing)}")
    return sections


def _single(rows: List[List[str]], name: str) -> str:
    if len(rows) != 1 or len(rows[0]) != 1:
        raise ModelFormatError(f"section {name} must hold exactly one value")
    return rows[0][0]


def loads_model(text: str) -> TrainedModel:
    """
    Parse a model; unknown format versions are rejected.
    """
    sections = _split_sections(text)
    header = {r[0]: unescape(r[1]) for r in sections["HEADER"] if len(r) == 2}
    version = header.get("format_version")
    if version not in SUPPORTED_VERSIONS:
        raise ModelFormatError(f"unsupported model format_version {version!r}")
    mode = header.get("mode", "")
    if mode not in EMISSION_MODES:
        raise ModelFormatError(f"unknown emission mode {mode!r}")

    try:
        lam = sections["LAMBDAS"]
        if len(lam) != 1 or len(lam[0]) != 3:
            raise ModelFormatError("LAMBDAS must hold three values")
        transitions = TransitionModel(lambdas=tuple(float(x) for x in lam[0]))  # type: ignore[arg-type]
        for tag, c in sections["UNIGRAM"]:
            transitions.unigram_counts[unescape(tag)] = int(c)
        for t1, t, c in sections["BIGRAM"]:
            transitions.bigram_counts[(unescape(t1), unescape(t))] = int(c)
        for t2, t1, t, c in sections["TRIGRAM"]:
            transitions.trigram_counts[(unescape(t2), unescape(t1), unescape(t))] = int(c)
        transitions.total_tokens = sum(transitions.unigram_counts.values())

        emissions = EmissionModel(mode=mode)  # type: ignore[arg-type]
        for word, pos, chunk, tag, c in sections["EMIT"]:
            o = ObservationTriplet(unescape(word), unescape(pos), unescape(chunk))
            emissions.joint_counts.setdefault(o, Counter())[unescape(tag)] = int(c)
            emissions.tag_counts[unescape(tag)] += int(c)
        for word, pos, chunk, c in sections["OBSCOUNT"]:
            o = ObservationTriplet(unescape(word), unescape(pos), unescape(chunk))
            emissions.obs_counts[o] = int(c)

        priors = {unescape(t): float(p) for t, p in sections["TAGPRIOR"]}
        probs: Dict[str, Dict[str, float]] = {}
        for suffix, tag, p in sections["SUFFIX"]:
            probs.setdefault(unescape(suffix), {})[unescape(tag)] = float(p)
        suffixes = SuffixModel(
            max_len=int(_single(sections["MAXSUFLEN"], "MAXSUFLEN")),
            theta=float(_single(sections["THETA"], "THETA")),
            suffix_tag_probs=probs,
            tag_priors=priors,
        )
        inventory = TagInventory(tuple(unescape(r[0]) for r in sections["TAGS"]))
    except (ValueError, TypeError) as e:
        raise ModelFormatError(f"malformed record: {e}") from e

    if set(inventory.tags) != set(emissions.tag_counts):
        raise ModelFormatError("TAGS and EMIT sections disagree on the tag inventory")
    if "" not in suffixes.suffix_tag_probs:
        raise ModelFormatError("SUFFIX section lacks the empty suffix")

    params = {k: v for k, v in header.items() if k != "format_version"}
    return TrainedModel(
        inventory, transitions, emissions, suffixes, format_version=version, params=params
    )


def save_model(model: TrainedModel, path: Union[str, Path]) -> None:
    """Write atomically (temp file + rename)."""
    text = dumps_model(model)
    write_text_atomic(path, text)
    log_json(logger, "model.saved", path=str(path), bytes=len(text.encode("utf-8")))


def load_model(path: Union[str, Path]) -> TrainedModel:
    """Read a model file; format problems raise ModelFormatError with the path."""
    text = read_text(path)
    try:
        model = loads_model(text)
    except ModelFormatError as e:
        e.path = e.path or str(path)
        raise
    log_json(
        logger,
        "model.loaded",
        path=str(path),
        tags=len(model.inventory),
        version=model.format_version,
    )
    return model
