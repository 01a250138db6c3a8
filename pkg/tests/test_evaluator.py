import random

import pytest

from corpus_io import (
    EntitySpan,
    NeTag,
    ObservationTriplet,
    Sentence,
    spans_to_tags,
    tags_to_spans,
)
from errors import CorpusMismatch, InvalidScheme, UntaggedSentence
from evaluator import CategoryScore, evaluate, format_report

CATEGORIES = ["PER", "LOC", "ORG"]


def sent(words, surface_tags):
    return Sentence(
        tuple(ObservationTriplet(w, "NN", "B-NP") for w in words),
        tuple(NeTag.parse(t) for t in surface_tags),
    )


WORDS = [
    ["Ram", "Kumar", "went"],
    ["Delhi", "is", "big"],
    ["the", "cat", "sat"],
    ["Infosys", "hired", "Sita"],
    ["ok", "fine"],
]
GOLD_TAGS = [
    ["B-PER", "E-PER", "O"],
    ["B-LOC", "O", "O"],
    ["O", "O", "O"],
    ["B-ORG", "O", "B-PER"],
    ["O", "O"],
]
PRED_TAGS = [
    ["B-PER", "E-PER", "O"],
    ["B-LOC", "I-LOC", "O"],
    ["O", "O", "O"],
    ["B-ORG", "O", "O"],
    ["O", "O"],
]


def fixture():
    gold = [sent(w, t) for w, t in zip(WORDS, GOLD_TAGS)]
    pred = [sent(w, t) for w, t in zip(WORDS, PRED_TAGS)]
    return gold, pred


def test_identical_corpora_score_one():
    gold, _ = fixture()
    report = evaluate(gold, gold)
    assert report.overall.precision == 1.0
    assert report.overall.recall == 1.0
    assert report.overall.f_measure == 1.0


def test_all_outside_prediction():
    gold, _ = fixture()
    pred = [s.with_tags([NeTag("O")] * len(s)) for s in gold]
    overall = evaluate(gold, pred).overall
    assert (overall.precision, overall.recall, overall.f_measure) == (0.0, 0.0, 0.0)
    assert overall.gold_count == 4


def test_hand_built_fixture():
    gold, pred = fixture()
    report = evaluate(gold, pred)
    overall = report.overall
    assert (overall.true_positives, overall.predicted_count, overall.gold_count) == (2, 3, 4)
    assert overall.precision == pytest.approx(2 / 3)
    assert overall.recall == pytest.approx(1 / 2)
    assert overall.f_measure == pytest.approx(4 / 7)

    assert report.per_category["PER"] == CategoryScore(1, 1, 2)
    assert report.per_category["LOC"] == CategoryScore(0, 1, 1)
    assert report.per_category["ORG"] == CategoryScore(1, 1, 1)


def test_token_mode():
    gold, pred = fixture()
    overall = evaluate(gold, pred, mode="token").overall
    assert (overall.true_positives, overall.predicted_count, overall.gold_count) == (4, 5, 5)
    assert overall.f_measure == pytest.approx(0.8)


def test_categories_are_union_of_gold_and_pred():
    gold = [sent(["a", "b"], ["B-PER", "O"])]
    pred = [sent(["a", "b"], ["B-PER", "B-MISC"])]
    report = evaluate(gold, pred)
    assert set(report.per_category) == {"PER", "MISC"}
    assert report.per_category["MISC"] == CategoryScore(0, 1, 0)
    assert report.overall == CategoryScore(1, 2, 1)


def test_prediction_read_leniently_gold_strictly():
    gold = [sent(["a", "b", "c"], ["O", "B-LOC", "E-LOC"])]
    pred = [sent(["a", "b", "c"], ["O", "I-LOC", "I-LOC"])]
    assert evaluate(gold, pred).overall.true_positives == 1
    with pytest.raises(InvalidScheme):
        evaluate(pred, gold)


def test_sentence_count_mismatch():
    gold, pred = fixture()
    with pytest.raises(CorpusMismatch) as exc:
        evaluate(gold, pred[:3])
    assert exc.value.sentence_index == 3
    assert exc.value.exit_code == 5


def test_length_mismatch():
    gold, pred = fixture()
    pred[2] = sent(["the", "cat"], ["O", "O"])
    with pytest.raises(CorpusMismatch) as exc:
        evaluate(gold, pred)
    assert exc.value.sentence_index == 2


def test_token_stream_mismatch():
    gold, pred = fixture()
    pred[1] = sent(["Delhi", "was", "big"], PRED_TAGS[1])
    with pytest.raises(CorpusMismatch) as exc:
        evaluate(gold, pred)
    assert exc.value.sentence_index == 1
    assert "'is'" in exc.value.message


def test_untagged_prediction():
    gold, _ = fixture()
    with pytest.raises(UntaggedSentence):
        evaluate(gold, [Sentence(s.tokens) for s in gold])


def random_spans(rng, n):
    spans, i = [], 0
    while i < n:
        if rng.random() < 0.35:
            end = min(n - 1, i + rng.randint(0, 2))
            spans.append(EntitySpan(rng.choice(CATEGORIES), i, end))
            i = end + 1
        else:
            i += 1
    return spans


def random_pair(rng):
    gold, pred = [], []
    for _ in range(rng.randint(1, 8)):
        n = rng.randint(1, 8)
        tokens = tuple(ObservationTriplet(f"w{i}", "NN", "B-NP") for i in range(n))
        gold.append(Sentence(tokens, tuple(spans_to_tags(random_spans(rng, n), n))))
        pred.append(Sentence(tokens, tuple(spans_to_tags(random_spans(rng, n), n))))
    return gold, pred


@pytest.mark.parametrize("seed", range(30))
def test_report_properties(seed):
    rng = random.Random(seed)
    gold, pred = random_pair(rng)
    report = evaluate(gold, pred)
    o = report.overall
    assert o.true_positives <= min(o.predicted_count, o.gold_count)
    assert o.true_positives == sum(s.true_positives for s in report.per_category.values())
    assert o.predicted_count == sum(s.predicted_count for s in report.per_category.values())
    assert o.gold_count == sum(s.gold_count for s in report.per_category.values())
    p, r, f = o.precision, o.recall, o.f_measure
    assert 0.0 <= f <= 1.0
    assert f <= 2 * min(p, r) + 1e-12
    assert f <= (p + r) / 2 + 1e-12
    assert evaluate(gold, gold).overall.f_measure == (1.0 if o.gold_count else 0.0)


@pytest.mark.parametrize("seed", range(30))
def test_dropping_a_false_positive_never_lowers_precision(seed):
    rng = random.Random(100 + seed)
    gold, pred = random_pair(rng)
    before = evaluate(gold, pred).overall.precision
    gold_spans = [set(tags_to_spans(s)) for s in gold]
    for idx, s in enumerate(pred):
        false_pos = [sp for sp in tags_to_spans(s) if sp not in gold_spans[idx]]
        if false_pos:
            kept = [sp for sp in tags_to_spans(s) if sp != false_pos[0]]
            pred[idx] = s.with_tags(spans_to_tags(kept, len(s)))
            assert evaluate(gold, pred).overall.precision >= before
            return


def test_format_report():
    gold, pred = fixture()
    text = format_report(evaluate(gold, pred))
    lines = text.splitlines()
    assert "CATEGORY\tTP\tPRED\tGOLD\tP\tR\tF" in lines
    assert lines[-1] == "ALL\t2\t3\t4\t0.6667\t0.5000\t0.5714"
    assert "LOC\t0\t1\t1\t0.0000\t0.0000\t0.0000" in lines
    machine = lines[lines.index("CATEGORY\tTP\tPRED\tGOLD\tP\tR\tF") + 1 :]
    assert [row.split("\t")[0] for row in machine] == ["LOC", "ORG", "PER", "ALL"]
