import itertools
from pathlib import Path

import pytest

from corpus_io import (
    OUTSIDE,
    EntitySpan,
    NeTag,
    ObservationTriplet,
    Sentence,
    augment_end_tags,
    corpus_stats,
    format_tsv,
    format_tsv_like,
    load_corpus,
    parse_ssf,
    parse_tsv,
    spans_to_tags,
    tags_to_spans,
)
from errors import (
    EmptyCorpus,
    InvalidScheme,
    MalformedLine,
    MalformedTokenLine,
    MissingSentenceDelimiter,
    OverlappingSpans,
    SpanOutOfBounds,
    UnbalancedGroup,
)

FIXTURES = Path(__file__).parent / "fixtures"


def tags(*surfaces):
    return [NeTag.parse(s) for s in surfaces]


def surfaces(seq):
    return [str(t) for t in seq]


def sentence_with(*surface_tags):
    tokens = [ObservationTriplet(f"w{i}", "NN", "B-NP") for i in range(len(surface_tags))]
    return Sentence(tuple(tokens), tuple(tags(*surface_tags)))


# ---------- types ----------
def test_netag_parse_and_str():
    assert NeTag.parse("O") is OUTSIDE
    tag = NeTag.parse("B-LOCATION")
    assert (tag.kind, tag.category) == ("B", "LOCATION")
    assert str(tag) == "B-LOCATION"


@pytest.mark.parametrize("surface", ["X-PER", "B-", "B", "O-PER", "B-NEP-X", ""])
def test_netag_rejects_bad_surface(surface):
    with pytest.raises(ValueError):
        NeTag.parse(surface)


def test_netag_category_rules():
    with pytest.raises(ValueError):
        NeTag("O", "PER")
    with pytest.raises(ValueError):
        NeTag("B", "")
    with pytest.raises(ValueError):
        NeTag("B", "NEW YORK")


def test_triplet_rejects_tabs_and_empty_word():
    with pytest.raises(ValueError):
        ObservationTriplet("", "NN", "B-NP")
    with pytest.raises(ValueError):
        ObservationTriplet("a\tb", "NN", "B-NP")


def test_sentence_length_check():
    o = ObservationTriplet("a", "NN", "B-NP")
    with pytest.raises(ValueError):
        Sentence((o, o), (OUTSIDE,))
    with pytest.raises(ValueError):
        Sentence(())


# ---------- TSV ----------
def test_parse_tsv_single_token():
    corpus = parse_tsv("Kolkata\tNNP\tB-NP\tB-LOCATION\n\n")
    assert len(corpus) == 1
    assert corpus[0].tokens == (ObservationTriplet("Kolkata", "NNP", "B-NP"),)
    assert surfaces(corpus[0].tags) == ["B-LOCATION"]


def test_parse_tsv_extra_blank_lines_and_crlf():
    text = "a\tNN\tB-NP\tO\r\n\r\n\r\nb\tNN\tB-NP\tB-PER\r\nc\tNN\tI-NP\tE-PER\r\n"
    corpus = parse_tsv(text)
    assert len(corpus) == 2
    assert [len(s) for s in corpus] == [1, 2]
    assert corpus[1].tokens[1].chunk == "I-NP"


def test_parse_tsv_untagged():
    corpus = parse_tsv("a\tNN\tB-NP\nb\tVM\tB-VGF\n")
    assert not corpus[0].is_tagged
    assert len(corpus[0]) == 2


def test_parse_tsv_wrong_field_count_names_line():
    with pytest.raises(MalformedLine) as exc:
        parse_tsv("a\tNN\tB-NP\tO\nb\tNN\n")
    assert exc.value.line == 2


def test_parse_tsv_mixed_widths():
    with pytest.raises(MalformedLine) as exc:
        parse_tsv("a\tNN\tB-NP\tO\nb\tNN\tB-NP\n")
    assert exc.value.line == 2


def test_parse_tsv_bad_tag_is_malformed_line():
    with pytest.raises(MalformedLine) as exc:
        parse_tsv("a\tNN\tB-NP\tQ-PER\n")
    assert exc.value.line == 1


def test_parse_tsv_empty():
    with pytest.raises(EmptyCorpus):
        parse_tsv("\n\n")


def test_tsv_canonical_round_trip():
    text = (FIXTURES / "sample_expected.tsv").read_text(encoding="utf-8")
    assert format_tsv(parse_tsv(text)) == text


def test_format_tsv_strip():
    corpus = parse_tsv("Ram\tNNP\tB-NP\tB-PER\nwent\tVM\tB-VGF\tO\n")
    assert format_tsv(corpus, strip=True) == "Ram\tB-PER\nwent\tO\n\n"


@pytest.mark.parametrize(
    "source",
    [
        "Ram\tNNP\tB-NP\n\n\n\nSita\tNNP\tB-NP\nwent\tVM\tB-VGF\n",
        "Ram\tNNP\tB-NP\n\n \n\t\nSita\tNNP\tB-NP\nwent\tVM\tB-VGF\n\n\n",
        "Ram\tNNP\tB-NP\r\n\r\nSita\tNNP\tB-NP\r\nwent\tVM\tB-VGF",
    ],
)
def test_format_tsv_like_keeps_source_layout(source):
    tags = [[NeTag.parse("B-PER")], [NeTag.parse("B-PER"), OUTSIDE]]
    corpus = [s.with_tags(t) for s, t in zip(parse_tsv(source), tags)]
    out = format_tsv_like(source, corpus)
    assert len(out.splitlines()) == len(source.splitlines())
    assert [bool(line.strip()) for line in out.splitlines()] == [
        bool(line.strip()) for line in source.splitlines()
    ]
    assert parse_tsv(out) == corpus
    assert format_tsv_like(source, corpus, strip=True).splitlines()[0] == "Ram\tB-PER"


def test_format_tsv_like_canonical_source_matches_format_tsv():
    text = (FIXTURES / "sample_expected.tsv").read_text(encoding="utf-8")
    corpus = parse_tsv(text)
    assert format_tsv_like(text, corpus) == format_tsv(corpus)


def test_parse_tsv_token_count_at_scale():
    n_tokens = 43732
    lines = []
    for i in range(n_tokens):
        lines.append(f"w{i % 997}\tNN\tB-NP\tO")
        if i % 17 == 16:
            lines.append("")
    corpus = parse_tsv("\n".join(lines) + "\n")
    assert sum(len(s) for s in corpus) == n_tokens


# ---------- SSF ----------
def test_parse_ssf_golden_file():
    text = (FIXTURES / "sample.ssf").read_text(encoding="utf-8")
    expected = (FIXTURES / "sample_expected.tsv").read_text(encoding="utf-8")
    assert format_tsv(augment_end_tags(parse_ssf(text))) == expected


def test_parse_ssf_two_token_group():
    text = (
        "<Sentence id=\"1\">\n"
        "1\t((\tNP\t<fs ne=PERSON>\n"
        "1.1\tRam\tNNP\n"
        "1.2\tKumar\tNNP\n"
        "\t))\n"
        "</Sentence>\n"
    )
    corpus = parse_ssf(text)
    assert surfaces(corpus[0].tags) == ["B-PERSON", "I-PERSON"]
    assert [o.chunk for o in corpus[0].tokens] == ["B-NP", "I-NP"]


def test_parse_ssf_without_ne_is_all_outside():
    text = "<Sentence id=\"1\">\n1\t((\tNP\n1.1\tthe\tDT\n1.2\tdog\tNN\n\t))\n</Sentence>\n"
    corpus = parse_ssf(text)
    assert surfaces(corpus[0].tags) == ["O", "O"]


def test_parse_ssf_outer_ne_covers_nested_chunks():
    text = (
        "<Sentence id=\"1\">\n"
        "1\t((\tNP\t<fs ne=ORGANIZATION>\n"
        "1.1\t((\tNP\n"
        "1.1.1\tState\tNNP\n"
        "1.1.2\tBank\tNNP\n"
        "\t))\n"
        "1.2\tIndia\tNNP\n"
        "\t))\n"
        "</Sentence>\n"
    )
    sentence = parse_ssf(text)[0]
    assert surfaces(sentence.tags) == ["B-ORGANIZATION", "I-ORGANIZATION", "I-ORGANIZATION"]
    assert [o.chunk for o in sentence.tokens] == ["B-NP", "I-NP", "B-NP"]


def test_parse_ssf_unbalanced_close():
    text = "<Sentence id=\"1\">\n1\t((\tNP\n1.1\ta\tNN\n\t))\n\t))\n</Sentence>\n"
    with pytest.raises(UnbalancedGroup) as exc:
        parse_ssf(text)
    assert exc.value.line == 5


def test_parse_ssf_group_left_open():
    text = "<Sentence id=\"1\">\n1\t((\tNP\n1.1\ta\tNN\n</Sentence>\n"
    with pytest.raises(UnbalancedGroup) as exc:
        parse_ssf(text)
    assert exc.value.line == 4


def test_parse_ssf_content_outside_sentence():
    with pytest.raises(MissingSentenceDelimiter) as exc:
        parse_ssf("1\t((\tNP\n")
    assert exc.value.line == 1


def test_parse_ssf_unclosed_sentence():
    with pytest.raises(MissingSentenceDelimiter):
        parse_ssf("<Sentence id=\"1\">\n1\t((\tNP\n1.1\ta\tNN\n\t))\n")


def test_parse_ssf_index_must_grow_within_level():
    text = (
        "<Sentence id=\"1\">\n"
        "1\t((\tNP\n"
        "1.2\ta\tNN\n"
        "1.1\tb\tNN\n"
        "\t))\n"
        "</Sentence>\n"
    )
    with pytest.raises(MalformedTokenLine) as exc:
        parse_ssf(text)
    assert exc.value.line == 4


def test_parse_ssf_token_outside_group():
    text = "<Sentence id=\"1\">\n1\ta\tNN\n</Sentence>\n"
    with pytest.raises(MalformedTokenLine):
        parse_ssf(text)


def test_load_corpus_sets_path(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("a\tb\n", encoding="utf-8")
    with pytest.raises(MalformedLine) as exc:
        load_corpus(bad)
    assert exc.value.path == str(bad)
    assert exc.value.describe().startswith(f"{bad}:1:")


# ---------- tag scheme ----------
@pytest.mark.parametrize(
    "before, after",
    [
        (["B-PER", "I-PER", "I-PER"], ["B-PER", "I-PER", "E-PER"]),
        (["B-LOC"], ["B-LOC"]),
        (["O", "O"], ["O", "O"]),
        (["B-PER", "I-PER", "B-PER", "I-PER"], ["B-PER", "E-PER", "B-PER", "E-PER"]),
        (["B-PER", "B-LOC", "I-LOC", "O"], ["B-PER", "B-LOC", "E-LOC", "O"]),
    ],
)
def test_augment_end_tags(before, after):
    out = augment_end_tags([sentence_with(*before)])
    assert surfaces(out[0].tags) == after


def test_augment_end_tags_rejects_existing_e():
    with pytest.raises(InvalidScheme):
        augment_end_tags([sentence_with("B-PER", "E-PER")])


@pytest.mark.parametrize(
    "seq, expected",
    [
        (["B-PER", "I-PER", "E-PER", "O"], [EntitySpan("PER", 0, 2)]),
        (["B-PER", "B-LOC"], [EntitySpan("PER", 0, 0), EntitySpan("LOC", 1, 1)]),
        (["O", "I-LOC", "I-LOC"], [EntitySpan("LOC", 1, 2)]),
        (["B-PER", "I-LOC"], [EntitySpan("PER", 0, 0), EntitySpan("LOC", 1, 1)]),
        (["B-PER", "E-PER", "E-PER"], [EntitySpan("PER", 0, 1), EntitySpan("PER", 2, 2)]),
    ],
)
def test_tags_to_spans(seq, expected):
    assert tags_to_spans(tags(*seq)) == expected


def test_tags_to_spans_strict_rejects_orphans():
    with pytest.raises(InvalidScheme):
        tags_to_spans(tags("O", "I-LOC"), strict=True)
    assert tags_to_spans(tags("B-LOC", "I-LOC", "E-LOC"), strict=True) == [
        EntitySpan("LOC", 0, 2)
    ]


def test_spans_to_tags():
    assert surfaces(spans_to_tags([EntitySpan("PER", 0, 1)], 3)) == ["B-PER", "E-PER", "O"]
    assert surfaces(spans_to_tags([], 2)) == ["O", "O"]


def test_spans_to_tags_errors():
    with pytest.raises(SpanOutOfBounds):
        spans_to_tags([EntitySpan("PER", 1, 3)], 3)
    with pytest.raises(OverlappingSpans):
        spans_to_tags([EntitySpan("PER", 0, 1), EntitySpan("LOC", 1, 2)], 3)


def _non_overlapping_span_sets(n):
    intervals = [(s, e) for s in range(n) for e in range(s, n)]
    for r in range(n + 1):
        for combo in itertools.combinations(intervals, r):
            ordered = sorted(combo)
            if all(a[1] < b[0] for a, b in zip(ordered, ordered[1:])):
                yield [EntitySpan("LOC", s, e) for s, e in ordered]


def test_spans_round_trip_exhaustive():
    for n in range(1, 6):
        for spans in _non_overlapping_span_sets(n):
            assert tags_to_spans(spans_to_tags(spans, n)) == spans


def test_lenient_extraction_is_stable_for_every_sequence():
    alphabet = ["O", "B-LOC", "I-LOC", "E-LOC"]
    for n in range(1, 5):
        for seq in itertools.product(alphabet, repeat=n):
            spans = tags_to_spans(tags(*seq))
            again = tags_to_spans(spans_to_tags(spans, n))
            assert again == spans


def test_well_formed_iob_matches_span_form():
    for n in range(1, 5):
        for seq in itertools.product(["O", "B-PER", "I-PER"], repeat=n):
            plain = tags(*seq)
            try:
                tags_to_spans(plain, strict=True)
            except InvalidScheme:
                continue
            sentence = sentence_with(*seq)
            canonical = augment_end_tags([sentence])[0].tags
            assert list(canonical) == spans_to_tags(tags_to_spans(plain), n)


def test_corpus_stats():
    corpus = parse_tsv((FIXTURES / "sample_expected.tsv").read_text(encoding="utf-8"))
    assert corpus_stats(corpus) == {
        "tokens": 12,
        "sentences": 3,
        "ne_types": 3,
        "tag_inventory": 7,
    }
