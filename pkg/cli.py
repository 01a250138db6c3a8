"""
File name: cli.py
Python Version: 3.11

Description:
    Command line entry point of the HMM NE tagger.

    convert  SSF/TSV corpus -> canonical B/I/E/O TSV
    train    tagged TSV -> model file
    tag      model + 3-column TSV -> 4-column (or --strip 2-column) TSV
    eval     gold vs predicted TSV -> precision / recall / F report
    stats    corpus description (tokens, sentences, NE types)
    tune     sweep the max suffix length on a development corpus

Usage:
    python cli.py convert train.ssf train.tsv --format ssf
    python cli.py train train.tsv model.txt --lang hindi
    python cli.py tag model.txt test.tsv out.tsv --workers 4
    python cli.py eval gold.tsv out.tsv

    exit codes: 0 ok, 2 parse/config, 3 degenerate corpus,
    4 model error, 5 eval mismatch

License:
    This code is released under the MIT License.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import List, Optional, Sequence

import config
from corpus_io import (
    Corpus,
    Sentence,
    augment_end_tags,
    corpus_stats,
    format_tsv,
    format_tsv_like,
    parse_corpus,
)
from decoder import tag_corpus, train_model
from emission_model import build_suffix_model
from errors import ConfigError, TaggerError
from evaluator import evaluate, format_report
from log_helpers import log_json
from model_file import load_model, save_model
from tagger_settings import TaggerSettings, load_settings
from utils import get_console_logger, read_text, write_text_atomic

logger = get_console_logger("cli")

PROG = "hmm-ner-tagger"
EMISSION_FLAGS = {"paper": "paper_faithful", "standard": "standard"}

# loggers raised to DEBUG by --debug
_LOGGERS = ("cli", "decoder", "model_file", "evaluator")


def _enable_debug() -> None:
    config.DEBUG = True
    for name in _LOGGERS:
        logging.getLogger(name).setLevel(logging.DEBUG)


def _load(path: str, fmt: str = "tsv", text: Optional[str] = None) -> Corpus:
    if text is None:
        text = read_text(path)
    corpus = parse_corpus(text, fmt, path)  # type: ignore[arg-type]
    if fmt == "ssf":
        # SSF gives plain IOB; every command sees the B/I/E/O scheme
        corpus = augment_end_tags(corpus)
    log_json(
        logger,
        "corpus.parsed",
        path=path,
        format=fmt,
        sentences=len(corpus),
        tokens=sum(len(s) for s in corpus),
    )
    return corpus


def _untagged(corpus: Sequence[Sentence]) -> Corpus:
    return [Sentence(s.tokens) for s in corpus]


def _print_stats(corpus: Sequence[Sentence]) -> None:
    stats = corpus_stats(corpus)
    print(f"tokens: {stats['tokens']}")
    print(f"sentences: {stats['sentences']}")
    print(f"NE types: {stats['ne_types']}")
    print(f"tag inventory: {stats['tag_inventory']}")


def _training_options(args: argparse.Namespace, settings: TaggerSettings):
    """
    Resolve suffix length, rare threshold and emission mode.
    Flag > yaml > config default.
    """
    if args.suffix_len is not None:
        if args.suffix_len < 1:
            raise ConfigError("--suffix-len must be >= 1")
        suffix_len = args.suffix_len
    else:
        suffix_len = settings.suffix_len_for(args.lang)
    rare_max = settings.rare_max if args.rare_max is None else args.rare_max
    if rare_max < 0:
        raise ConfigError("--rare-max must be >= 0")
    mode = EMISSION_FLAGS[args.emission] if args.emission else settings.emission_mode
    return suffix_len, rare_max, mode


# ---------- commands ----------
def cmd_convert(args: argparse.Namespace) -> int:
    """
    Write canonical TSV with E tags. Sentences that already carry E tags
    are copied unchanged, so converting canonical TSV is a no-op.
    """
    corpus = _load(args.input, args.format)
    out = [
        s if any(t.kind == "E" for t in s.tags) else augment_end_tags([s])[0]
        for s in corpus
    ]
    write_text_atomic(args.output, format_tsv(out))
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    """Train a model and save it."""
    settings = load_settings(args.config)
    suffix_len, rare_max, mode = _training_options(args, settings)

    corpus = _load(args.corpus, args.format)
    _print_stats(corpus)
    print(f"max suffix length: {suffix_len}")

    model = train_model(
        corpus,
        max_suffix_len=suffix_len,
        rare_max=rare_max,
        mode=mode,
        language=args.lang.strip().lower() if args.lang else None,
    )
    save_model(model, args.model)
    return 0


def cmd_tag(args: argparse.Namespace) -> int:
    """Tag a corpus with a saved model."""
    settings = load_settings(args.config)
    workers = args.workers if args.workers is not None else settings.workers
    if workers < 1:
        raise ConfigError("--workers must be >= 1")

    model = load_model(args.model)
    text = read_text(args.input)
    corpus = _untagged(_load(args.input, text=text))
    tagged = tag_corpus(
        model, corpus, workers=workers, strict_bigram_end=args.bigram_end
    )
    # one output line per input line, blank separators included
    write_text_atomic(args.output, format_tsv_like(text, tagged, strip=args.strip))
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    """Print the evaluation report; the score never changes the exit code."""
    gold = _load(args.gold)
    pred = _load(args.pred)
    report = evaluate(gold, pred, mode=args.mode)
    sys.stdout.write(format_report(report))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    """Print the corpus description."""
    _print_stats(_load(args.corpus, args.format))
    return 0


def cmd_tune(args: argparse.Namespace) -> int:
    """
    Train once per max suffix length, tag the dev corpus, report span F.
    Only the suffix model depends on the length, the rest is trained once.
    """
    if args.min_len < 1 or args.max_len < args.min_len:
        raise ConfigError("need 1 <= --min-len <= --max-len")
    settings = load_settings(args.config)
    rare_max = settings.rare_max if args.rare_max is None else args.rare_max
    mode = EMISSION_FLAGS[args.emission] if args.emission else settings.emission_mode

    train = _load(args.train)
    dev = _load(args.dev)
    base = train_model(
        train, max_suffix_len=args.min_len, rare_max=rare_max, mode=mode
    )

    best_len, best_f = args.min_len, -1.0
    print("MAXSUFLEN\tP\tR\tF")
    for length in range(args.min_len, args.max_len + 1):
        model = dataclasses.replace(
            base,
            suffixes=build_suffix_model(train, length, rare_max),
            params={**base.params, "max_suffix_len": str(length)},
        )
        pred = tag_corpus(model, _untagged(dev), workers=settings.workers)
        overall = evaluate(dev, pred).overall
        log_json(logger, "tune.candidate", max_suffix_len=length, f_measure=overall.f_measure)
        print(
            f"{length}\t{overall.precision:.4f}\t{overall.recall:.4f}\t"
            f"{overall.f_measure:.4f}"
        )
        # ties keep the shorter length
        if overall.f_measure > best_f:
            best_len, best_f = length, overall.f_measure

    print(f"best max suffix length: {best_len} (F={best_f:.4f})")
    return 0


# ---------- parser ----------
def _add_training_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--rare-max",
        type=int,
        default=None,
        help="pseudo words seen at most this often feed the suffix model (default 2)",
    )
    p.add_argument(
        "--emission",
        choices=sorted(EMISSION_FLAGS),
        default=None,
        help="paper: C(o,t)/C(o) (default); standard: C(o,t)/C(t)",
    )


def build_parser() -> argparse.ArgumentParser:
    """
    The argparse tree for every subcommand.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=str,
        default=None,
        help=f"yaml settings file (default: {config.TAGGER_CONFIG_PATH} if present)",
    )
    common.add_argument("--debug", action="store_true", help="verbose logging")

    parser = argparse.ArgumentParser(
        prog=PROG, description="Trigram HMM named entity tagger"
    )
    parser.add_argument(
        "--version", action="version", version=f"{PROG} {config.VERSION}"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("convert", parents=[common], help="SSF/TSV -> canonical TSV")
    p.add_argument("input", help="input corpus")
    p.add_argument("output", help="output TSV")
    p.add_argument("--format", choices=["ssf", "tsv"], default="ssf", help="input format")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("train", parents=[common], help="train a model")
    p.add_argument("corpus", help="tagged corpus")
    p.add_argument("model", help="model file to write")
    p.add_argument("--format", choices=["ssf", "tsv"], default="tsv", help="corpus format")
    p.add_argument(
        "--suffix-len", type=int, default=None, help="max suffix length (overrides --lang)"
    )
    p.add_argument("--lang", type=str, default=None, help="language for the default suffix length")
    _add_training_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("tag", parents=[common], help="tag a corpus")
    p.add_argument("model", help="model file")
    p.add_argument("input", help="3-column TSV")
    p.add_argument("output", help="tagged TSV to write")
    p.add_argument("--workers", type=int, default=None, help="decoding threads")
    p.add_argument("--strip", action="store_true", help="write only word and NE tag")
    p.add_argument(
        "--bigram-end",
        action="store_true",
        help="score the sentence end with the bigram term P(END | t_n)",
    )
    p.set_defaults(func=cmd_tag)

    p = sub.add_parser("eval", parents=[common], help="score predictions against gold")
    p.add_argument("gold", help="gold TSV")
    p.add_argument("pred", help="predicted TSV")
    p.add_argument("--mode", choices=["span", "token"], default="span", help="matching unit")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("stats", parents=[common], help="describe a corpus")
    p.add_argument("corpus", help="corpus file")
    p.add_argument("--format", choices=["ssf", "tsv"], default="tsv", help="corpus format")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("tune", parents=[common], help="sweep the max suffix length")
    p.add_argument("--train", required=True, help="tagged training TSV")
    p.add_argument("--dev", required=True, help="tagged development TSV")
    p.add_argument("--min-len", type=int, default=1)
    p.add_argument("--max-len", type=int, default=16)
    _add_training_flags(p)
    p.set_defaults(func=cmd_tune)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command; errors become a single stderr line and an exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help(sys.stderr)
        return 2
    if args.debug:
        _enable_debug()

    try:
        return args.func(args)
    except TaggerError as e:
        print(f"error: {e.describe()}", file=sys.stderr)
        return e.exit_code
    except UnicodeDecodeError as e:
        print(f"error: input is not valid UTF-8: {e.reason}", file=sys.stderr)
        return 2
    except OSError as e:
        where = f"{e.filename}: " if e.filename else ""
        print(f"error: {where}{e.strerror or e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
