"""
File name: corpus_io.py
Python Version: 3.11

Description:
    Corpus formats and tag-scheme conversions.

    - parse_tsv / format_tsv: one token per line,
      word<TAB>pos<TAB>chunk[<TAB>netag], blank line between sentences;
      format_tsv_like keeps the blank-line layout of the source text
    - parse_ssf: the supported subset of the Shakti Standard Format
      (see docs/ssf_subset.md)
    - augment_end_tags: plain IOB -> B/I/E/O (E marks the last token of
      an entity of length >= 2; single-token entities stay B)
    - tags_to_spans / spans_to_tags: tag sequences <-> entity spans

Usage:
    from corpus_io import parse_tsv, augment_end_tags, tags_to_spans

License:
    This code is released under the MIT License.

Notes:
    All functions are pure; the dataclasses are frozen, so parsed corpora
    can be shared between threads.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Optional, Sequence, Tuple, Union

from errors import (
    CorpusFormatError,
    EmptyCorpus,
    InvalidScheme,
    MalformedLine,
    MalformedTokenLine,
    MissingSentenceDelimiter,
    OverlappingSpans,
    SpanOutOfBounds,
    UnbalancedGroup,
)
from utils import read_text

TagKind = Literal["O", "B", "I", "E"]
CorpusFormat = Literal["tsv", "ssf"]

_FORBIDDEN = ("\t", "\n", "\r")


@dataclass(frozen=True)
class ObservationTriplet:
    """
    The observed symbol: <word, POS-tag, chunk-tag>.
    Equality (and hashing) is exact on all three fields.
    """

    word: str
    pos: str
    chunk: str

    def __post_init__(self) -> None:
        if not self.word:
            raise ValueError("empty word")
        for name in ("word", "pos", "chunk"):
            value = getattr(self, name)
            if any(ch in value for ch in _FORBIDDEN):
                raise ValueError(f"{name} contains a tab or newline: {value!r}")


@dataclass(frozen=True)
class NeTag:
    """
    A named-entity tag. kind O has an empty category; all others have one.
    """

    kind: TagKind
    category: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("O", "B", "I", "E"):
            raise ValueError(f"invalid tag kind {self.kind!r}")
        if (self.kind == "O") != (self.category == ""):
            raise ValueError(f"kind {self.kind} with category {self.category!r}")
        if "-" in self.category or any(ch.isspace() for ch in self.category):
            raise ValueError(f"invalid category {self.category!r}")

    @classmethod
    def parse(cls, surface: str) -> "NeTag":
        """
        'O' -> O; 'B-PER' -> (B, PER). Raises ValueError otherwise.
        """
        if surface == "O":
            return OUTSIDE
        kind, sep, category = surface.partition("-")
        if not sep or kind not in ("B", "I", "E") or not category:
            raise ValueError(f"invalid NE tag {surface!r}")
        return cls(kind, category)  # type: ignore[arg-type]

    def __str__(self) -> str:
        return "O" if self.kind == "O" else f"{self.kind}-{self.category}"

    def with_kind(self, kind: TagKind) -> "NeTag":
        """Same category, other kind."""
        return OUTSIDE if kind == "O" else NeTag(kind, self.category)


OUTSIDE = NeTag("O")


@dataclass(frozen=True)
class Sentence:
    """
    Tokens plus, for tagged input, one NeTag per token.
    """

    tokens: Tuple[ObservationTriplet, ...]
    tags: Tuple[NeTag, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "tags", tuple(self.tags))
        if not self.tokens:
            raise ValueError("sentence without tokens")
        if self.tags and len(self.tags) != len(self.tokens):
            raise ValueError(
                f"{len(self.tokens)} tokens but {len(self.tags)} tags"
            )

    @property
    def is_tagged(self) -> bool:
        """True when tags are present."""
        return bool(self.tags)

    def __len__(self) -> int:
        return len(self.tokens)

    def with_tags(self, tags: Sequence[NeTag]) -> "Sentence":
        """Same tokens, new tags."""
        return Sentence(self.tokens, tuple(tags))


@dataclass(frozen=True)
class EntitySpan:
    """
    Typed entity over tokens start..end (both inclusive, 0-based).
    """

    category: str
    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span {self.start}..{self.end}")


Corpus = List[Sentence]


# ---------- TSV ----------
def parse_tsv(text: str) -> Corpus:
    """
    Parse the column format. 4-field lines give tagged sentences,
    3-field lines untagged ones; mixing within a sentence is an error.
    Runs of blank lines count as one separator.
    """
    corpus: Corpus = []
    tokens: List[ObservationTriplet] = []
    tags: List[NeTag] = []
    width: Optional[int] = None

    def _flush() -> None:
        nonlocal tokens, tags, width
        if tokens:
            corpus.append(Sentence(tuple(tokens), tuple(tags)))
        tokens, tags, width = [], [], None

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()

    for lineno, raw in enumerate(lines, start=1):
        line = raw[:-1] if raw.endswith("\r") else raw
        if not line.strip():
            _flush()
            continue

        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise MalformedLine(
                f"expected 3 or 4 tab-separated fields, found {len(fields)}",
                line=lineno,
            )
        if width is not None and len(fields) != width:
            raise MalformedLine(
                f"line has {len(fields)} fields, sentence started with {width}",
                line=lineno,
            )
        width = len(fields)

        try:
            tokens.append(ObservationTriplet(fields[0], fields[1], fields[2]))
            if width == 4:
                tags.append(NeTag.parse(fields[3]))
        except ValueError as e:
            raise MalformedLine(str(e), line=lineno) from e

    _flush()
    if not corpus:
        raise EmptyCorpus("no sentence found")
    return corpus


def format_tsv(corpus: Sequence[Sentence], strip: bool = False) -> str:
    """
    Canonical TSV: one token per line, a single blank line after every
    sentence. strip=True writes only word<TAB>netag.
    """
    out: List[str] = []
    for sentence in corpus:
        for i, tok in enumerate(sentence.tokens):
            tag = str(sentence.tags[i]) if sentence.tags else None
            if strip:
                out.append(f"{tok.word}\t{tag if tag is not None else 'O'}")
            elif tag is None:
                out.append(f"{tok.word}\t{tok.pos}\t{tok.chunk}")
            else:
                out.append(f"{tok.word}\t{tok.pos}\t{tok.chunk}\t{tag}")
        out.append("")
    return "\n".join(out) + "\n" if out else ""


def format_tsv_like(source: str, corpus: Sequence[Sentence], strip: bool = False) -> str:
    """
    format_tsv, but keeping the blank-line layout of `source`, the TSV text
    corpus was parsed from: one output line per source line.
    """
    rows = iter([line for line in format_tsv(corpus, strip).split("\n") if line])
    lines = source.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out = ["" if not line.strip() else next(rows) for line in lines]
    return "\n".join(out) + "\n" if out else ""


# ---------- SSF subset ----------
_SENT_OPEN = re.compile(r"^<Sentence(\s[^>]*)?>$", re.IGNORECASE)
_SENT_CLOSE = re.compile(r"^</Sentence>$", re.IGNORECASE)
_INDEX = re.compile(r"^\d+(\.\d+)*$")
_NE_ATTR = re.compile(r"""\bne\s*=\s*['"]?([^'"\s>]+)""")


@dataclass
class _Group:
    label: str
    ne: Optional[str]
    ne_id: int
    size: int = 0


class _IndexChecker:
    """
    Dotted indices must grow strictly among siblings (same parent prefix).
    Levels are not compared with each other.
    """

    def __init__(self) -> None:
        self.last: Dict[Tuple[int, ...], int] = {}

    def check(self, index: str, lineno: int) -> None:
        if not _INDEX.match(index):
            raise MalformedTokenLine(f"invalid index {index!r}", line=lineno)
        parts = tuple(int(p) for p in index.split("."))
        parent, last = parts[:-1], parts[-1]
        if parent in self.last and last <= self.last[parent]:
            raise MalformedTokenLine(
                f"index {index} not increasing within its level", line=lineno
            )
        self.last[parent] = last


def parse_ssf(text: str) -> Corpus:
    """
    Parse the SSF subset into IOB-tagged sentences (B/I/O, no E yet).

    chunk tag: B-/I- of the innermost enclosing group label.
    NE tag: B-/I- of the innermost enclosing group with an ne attribute.
    """
    corpus: Corpus = []
    in_sentence = False
    stack: List[_Group] = []
    tokens: List[ObservationTriplet] = []
    tags: List[NeTag] = []
    checker = _IndexChecker()
    open_line = 0
    prev_ne_id: Optional[int] = None
    next_ne_id = 0

    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip("\r")
        stripped = line.strip()
        if not stripped:
            continue

        if _SENT_OPEN.match(stripped):
            if in_sentence:
                raise MissingSentenceDelimiter(
                    f"<Sentence> opened before closing the one at line {open_line}",
                    line=lineno,
                )
            in_sentence, open_line = True, lineno
            stack, tokens, tags = [], [], []
            checker, prev_ne_id = _IndexChecker(), None
            continue

        if _SENT_CLOSE.match(stripped):
            if not in_sentence:
                raise MissingSentenceDelimiter("</Sentence> without <Sentence>", line=lineno)
            if stack:
                raise UnbalancedGroup(
                    f"{len(stack)} group(s) still open at </Sentence>", line=lineno
                )
            if tokens:
                corpus.append(Sentence(tuple(tokens), tuple(tags)))
            in_sentence = False
            continue

        if not in_sentence:
            # document wrappers such as <document> or <body>
            if stripped.startswith("<"):
                continue
            raise MissingSentenceDelimiter("content outside <Sentence>", line=lineno)

        fields = [f.strip() for f in line.split("\t")]

        present = [f for f in fields if f]
        if present[-1] == "))" and len(present) <= 2:
            if len(present) == 2 and not _INDEX.match(present[0]):
                raise MalformedTokenLine(f"invalid index {present[0]!r}", line=lineno)
            if not stack:
                raise UnbalancedGroup("'))' without an open group", line=lineno)
            stack.pop()
            continue

        if len(fields) < 3:
            raise MalformedTokenLine(
                f"expected at least 3 tab-separated fields, found {len(fields)}",
                line=lineno,
            )
        checker.check(fields[0], lineno)

        if fields[1] == "((":
            label = fields[2]
            if not label:
                raise MalformedTokenLine("group without a label", line=lineno)
            ne = None
            if len(fields) > 3:
                m = _NE_ATTR.search(fields[3])
                ne = m.group(1) if m else None
            stack.append(_Group(label=label, ne=ne, ne_id=next_ne_id))
            next_ne_id += 1
            continue

        if len(fields) > 4 or (len(fields) == 4 and not fields[3].startswith("<fs")):
            raise MalformedTokenLine("unexpected extra fields on token line", line=lineno)
        word, pos = fields[1], fields[2]
        if not stack:
            raise MalformedTokenLine(f"token {word!r} outside any chunk group", line=lineno)

        chunk_group = stack[-1]
        chunk = f"{'B' if chunk_group.size == 0 else 'I'}-{chunk_group.label}"
        chunk_group.size += 1

        ne_group = next((g for g in reversed(stack) if g.ne), None)
        try:
            tokens.append(ObservationTriplet(word, pos, chunk))
            if ne_group is None:
                tags.append(OUTSIDE)
                prev_ne_id = None
            else:
                kind = "I" if prev_ne_id == ne_group.ne_id else "B"
                tags.append(NeTag(kind, ne_group.ne))  # type: ignore[arg-type]
                prev_ne_id = ne_group.ne_id
        except ValueError as e:
            raise MalformedTokenLine(str(e), line=lineno) from e

    if in_sentence:
        raise MissingSentenceDelimiter(
            f"<Sentence> at line {open_line} never closed", line=open_line
        )
    if not corpus:
        raise EmptyCorpus("no sentence found")
    return corpus


def parse_corpus(
    text: str, fmt: CorpusFormat = "tsv", path: Optional[Union[str, Path]] = None
) -> Corpus:
    """
    Parse corpus text; errors carry path when given.
    """
    try:
        return parse_ssf(text) if fmt == "ssf" else parse_tsv(text)
    except CorpusFormatError as e:
        if path is not None:
            e.path = e.path or str(path)
        raise


def load_corpus(path: Union[str, Path], fmt: CorpusFormat = "tsv") -> Corpus:
    """
    Read and parse a corpus file; errors carry the path.
    """
    return parse_corpus(read_text(path), fmt, path)


# ---------- tag scheme ----------
def augment_end_tags(corpus: Sequence[Sentence]) -> Corpus:
    """
    Mark the last token of every entity of length >= 2 with E.
    Input must be plain IOB: an E tag already present raises InvalidScheme.
    """
    out: Corpus = []
    for idx, sentence in enumerate(corpus):
        if not sentence.tags:
            out.append(sentence)
            continue
        if any(t.kind == "E" for t in sentence.tags):
            raise InvalidScheme(f"sentence {idx} already contains E tags")

        tags = list(sentence.tags)
        for i, tag in enumerate(tags):
            if tag.kind != "I":
                continue
            prev = sentence.tags[i - 1] if i > 0 else OUTSIDE
            nxt = sentence.tags[i + 1] if i + 1 < len(tags) else OUTSIDE
            continues_prev = prev.kind in ("B", "I") and prev.category == tag.category
            continued = nxt.kind == "I" and nxt.category == tag.category
            if continues_prev and not continued:
                tags[i] = tag.with_kind("E")
        out.append(sentence.with_tags(tags))
    return out


def tags_to_spans(
    tags: Union[Sentence, Sequence[NeTag]], *, strict: bool = False
) -> List[EntitySpan]:
    """
    Extract entity spans.

    B opens a span; I/E of the same category continue it; E closes it;
    O, B or a category change close the previous one. An I/E with no
    same-category opener starts a new span (lenient) or raises
    InvalidScheme (strict).
    """
    seq = tags.tags if isinstance(tags, Sentence) else tags
    spans: List[EntitySpan] = []
    cat: Optional[str] = None
    start = 0

    for i, tag in enumerate(seq):
        if tag.kind == "O":
            if cat is not None:
                spans.append(EntitySpan(cat, start, i - 1))
            cat = None
            continue

        if tag.kind == "B" or cat != tag.category:
            if tag.kind != "B" and strict:
                raise InvalidScheme(f"{tag} at token {i} has no opening B-{tag.category}")
            if cat is not None:
                spans.append(EntitySpan(cat, start, i - 1))
            cat, start = tag.category, i

        if tag.kind == "E":
            spans.append(EntitySpan(cat, start, i))
            cat = None

    if cat is not None:
        spans.append(EntitySpan(cat, start, len(seq) - 1))
    return spans


def spans_to_tags(spans: Sequence[EntitySpan], length: int) -> List[NeTag]:
    """
    Inverse of tags_to_spans on well-formed input: B at the start, E at
    the end of multi-token spans, I in between, O elsewhere.
    """
    tags: List[NeTag] = [OUTSIDE] * length
    prev_end = -1
    for span in sorted(spans, key=lambda s: (s.start, s.end)):
        if span.end >= length:
            raise SpanOutOfBounds(
                f"span {span.category} {span.start}..{span.end} outside length {length}"
            )
        if span.start <= prev_end:
            raise OverlappingSpans(
                f"span {span.category} {span.start}..{span.end} overlaps a previous span"
            )
        tags[span.start] = NeTag("B", span.category)
        for i in range(span.start + 1, span.end):
            tags[i] = NeTag("I", span.category)
        if span.end > span.start:
            tags[span.end] = NeTag("E", span.category)
        prev_end = span.end
    return tags


# ---------- statistics ----------
def corpus_stats(corpus: Sequence[Sentence]) -> Dict[str, int]:
    """
    Token/sentence counts, NE categories and tag inventory size.
    """
    categories: Counter = Counter()
    inventory = set()
    for sentence in corpus:
        for tag in sentence.tags:
            inventory.add(str(tag))
            if tag.kind != "O":
                categories[tag.category] += 1
    return {
        "tokens": sum(len(s) for s in corpus),
        "sentences": len(corpus),
        "ne_types": len(categories),
        "tag_inventory": len(inventory),
    }
