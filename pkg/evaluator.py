"""
File name: evaluator.py
Python Version: 3.11

Description:
    Precision / recall / F-measure of a predicted corpus against gold.

    span mode (default): an entity is (category, start, end); a true
    positive is an exact match. Counts are pooled over categories
    (micro average). Gold spans are read strictly, predictions leniently.

    token mode (diagnostics): every non-O token is a unit labeled by its
    category; a true positive is a token where gold and prediction agree.

License:
    This code is released under the MIT License.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Literal, Sequence, Set, Tuple

from corpus_io import Sentence, tags_to_spans
from errors import CorpusMismatch, UntaggedSentence
from log_helpers import log_json
from utils import get_console_logger

logger = get_console_logger("evaluator")

EvalMode = Literal["span", "token"]
OVERALL = "ALL"


@dataclass(frozen=True)
class CategoryScore:
    """
    Raw counts and the derived scores for one category (or ALL).
    """

    true_positives: int = 0
    predicted_count: int = 0
    gold_count: int = 0

    @property
    def precision(self) -> float:
        """tp / predicted, 0 without predictions."""
        return self.true_positives / self.predicted_count if self.predicted_count else 0.0

    @property
    def recall(self) -> float:
        """tp / gold, 0 without gold entities."""
        return self.true_positives / self.gold_count if self.gold_count else 0.0

    @property
    def f_measure(self) -> float:
        """Harmonic mean of precision and recall."""
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class EvalReport:
    """
    Per-category scores plus the micro-averaged overall score.
    """

    per_category: Dict[str, CategoryScore] = field(default_factory=dict)
    overall: CategoryScore = CategoryScore()
    mode: EvalMode = "span"


Unit = Tuple[str, int, int]


def _span_units(gold: Sentence, pred: Sentence) -> Tuple[Set[Unit], Set[Unit]]:
    gold_units = {(s.category, s.start, s.end) for s in tags_to_spans(gold.tags, strict=True)}
    pred_units = {(s.category, s.start, s.end) for s in tags_to_spans(pred.tags)}
    return gold_units, pred_units


def _token_units(gold: Sentence, pred: Sentence) -> Tuple[Set[Unit], Set[Unit]]:
    gold_units = {(t.category, i, i) for i, t in enumerate(gold.tags) if t.kind != "O"}
    pred_units = {(t.category, i, i) for i, t in enumerate(pred.tags) if t.kind != "O"}
    return gold_units, pred_units


def _check_alignment(gold: Sequence[Sentence], pred: Sequence[Sentence]) -> None:
    for idx, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise CorpusMismatch(
                f"sentence {idx}: gold has {len(g)} tokens, prediction {len(p)}",
                sentence_index=idx,
            )
        if g.tokens != p.tokens:
            first = next(i for i, (a, b) in enumerate(zip(g.tokens, p.tokens)) if a != b)
            raise CorpusMismatch(
                f"sentence {idx}: token {first} differs ({g.tokens[first].word!r} vs "
                f"{p.tokens[first].word!r})",
                sentence_index=idx,
            )
        if not g.tags or not p.tags:
            side = "gold" if not g.tags else "prediction"
            raise UntaggedSentence(f"sentence {idx}: {side} has no NE tags")
    if len(gold) != len(pred):
        idx = min(len(gold), len(pred))
        raise CorpusMismatch(
            f"gold has {len(gold)} sentences, prediction {len(pred)}",
            sentence_index=idx,
        )


def evaluate(
    gold: Sequence[Sentence], pred: Sequence[Sentence], mode: EvalMode = "span"
) -> EvalReport:
    """
    Score pred against gold. Categories reported are those of gold and pred.
    """
    _check_alignment(gold, pred)
    units = _span_units if mode == "span" else _token_units

    tp: Counter = Counter()
    n_pred: Counter = Counter()
    n_gold: Counter = Counter()
    for g, p in zip(gold, pred):
        gold_units, pred_units = units(g, p)
        for cat, _, _ in gold_units:
            n_gold[cat] += 1
        for cat, _, _ in pred_units:
            n_pred[cat] += 1
        for cat, _, _ in gold_units & pred_units:
            tp[cat] += 1

    categories = sorted(set(n_gold) | set(n_pred))
    per_category = {
        cat: CategoryScore(tp[cat], n_pred[cat], n_gold[cat]) for cat in categories
    }
    overall = CategoryScore(
        sum(tp.values()), sum(n_pred.values()), sum(n_gold.values())
    )
    log_json(
        logger,
        "eval.done",
        mode=mode,
        sentences=len(gold),
        categories=len(categories),
        f_measure=overall.f_measure,
    )
    return EvalReport(per_category=per_category, overall=overall, mode=mode)


def format_report(report: EvalReport) -> str:
    """
    Aligned human table, a blank line, then the machine block:
    CATEGORY<TAB>TP<TAB>PRED<TAB>GOLD<TAB>P<TAB>R<TAB>F, ALL last.
    """
    rows: List[Tuple[str, CategoryScore]] = list(report.per_category.items())
    rows.append((OVERALL, report.overall))

    width = max([len("CATEGORY")] + [len(name) for name, _ in rows])
    lines = [f"evaluation mode: {report.mode}"]
    header = (
        f"{'CATEGORY':<{width}}  {'TP':>6}  {'PRED':>6}  {'GOLD':>6}  "
        f"{'P':>6}  {'R':>6}  {'F':>6}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for name, s in rows:
        lines.append(
            f"{name:<{width}}  {s.true_positives:>6}  {s.predicted_count:>6}  "
            f"{s.gold_count:>6}  {s.precision:>6.4f}  {s.recall:>6.4f}  {s.f_measure:>6.4f}"
        )

    lines.append("")
    lines.append("CATEGORY\tTP\tPRED\tGOLD\tP\tR\tF")
    for name, s in rows:
        lines.append(
            f"{name}\t{s.true_positives}\t{s.predicted_count}\t{s.gold_count}\t"
            f"{s.precision:.4f}\t{s.recall:.4f}\t{s.f_measure:.4f}"
        )
    return "\n".join(lines) + "\n"
