"""
File name: errors.py
Python Version: 3.11

Description:
    Exception hierarchy shared by all tagger modules.
    Library code raises these; only cli.main turns them into exit codes.

    exit codes: 0 ok, 2 parse/config, 3 degenerate corpus,
    4 model error, 5 eval mismatch

License:
    This code is released under the MIT License.
"""

from __future__ import annotations

from typing import Optional


class TaggerError(RuntimeError):
    """
    Base class. Carries optional file/line context for one-line diagnostics.
    """

    exit_code = 1

    def __init__(
        self,
        message: str,
        *,
        line: Optional[int] = None,
        path: Optional[str] = None,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.line = line
        self.path = path

    def describe(self) -> str:
        """
        Render as `<file>:<line>: <message>`, dropping the missing parts.
        """
        where = ""
        if self.path is not None:
            where = str(self.path)
        if self.line is not None:
            where = f"{where}:{self.line}" if where else f"line {self.line}"
        text = self.message.replace("\n", " ")
        return f"{where}: {text}" if where else text


# corpus and scheme errors (exit 2)
class CorpusFormatError(TaggerError):
    """Input corpus does not follow the expected format."""

    exit_code = 2


class MalformedLine(CorpusFormatError):
    """TSV line with a wrong field count or an invalid field."""


class EmptyCorpus(CorpusFormatError):
    """No sentence could be parsed."""


class UnbalancedGroup(CorpusFormatError):
    """SSF group open/close lines do not match."""


class MissingSentenceDelimiter(CorpusFormatError):
    """SSF content outside <Sentence> ... </Sentence>."""


class MalformedTokenLine(CorpusFormatError):
    """SSF numbered line that cannot be parsed."""


class InvalidScheme(CorpusFormatError):
    """Tag sequence violates the expected B/I/E/O scheme."""


class OverlappingSpans(CorpusFormatError):
    """Two entity spans share a token."""


class SpanOutOfBounds(CorpusFormatError):
    """Entity span outside the sentence."""


class UntaggedSentence(CorpusFormatError):
    """A tagged corpus was required."""


class ConfigError(TaggerError):
    """Invalid yaml config or flag combination."""

    exit_code = 2


# training (exit 3)
class DegenerateCorpus(TaggerError):
    """Corpus too small or uniform to estimate a model."""

    exit_code = 3


class NoRareWords(DegenerateCorpus):
    """No pseudo word is rare enough to feed the suffix model."""


# model and decoding (exit 4)
class ModelError(TaggerError):
    """Model file or model query problem."""

    exit_code = 4


class ModelFormatError(ModelError):
    """Model file cannot be read, or has an unsupported format_version."""


class UnknownTag(ModelError):
    """Tag symbol outside the model inventory."""


class UnknownObservation(ModelError):
    """Triplet never seen in training: the suffix path must be used."""


class DecodeError(ModelError):
    """Decoding failed for one sentence."""


class EmptySentence(DecodeError):
    """Sentence with no tokens."""


class NoViablePath(DecodeError):
    """Every tag scores -inf at some position."""


# evaluation (exit 5)
class CorpusMismatch(TaggerError):
    """Gold and predicted corpora do not align."""

    exit_code = 5

    def __init__(self, message: str, *, sentence_index: int, **kwargs) -> None:
        super().__init__(message, **kwargs)
        self.sentence_index = sentence_index
