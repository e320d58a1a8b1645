"""Command-line entry point: ``typonoise induce|corrupt|stats|bleu``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import TyponoiseError
from .generator import Edit
from .noise_model import save_model
from .pipeline import LEVELS, PipelineConfig, StageError, induce_from_path, parse_coefficients, run_corrupt
from .stats import StatsReport, category_distribution, corpus_bleu, corrupted_word_rate, export_tables
from .suggester import ConfusionMode

log = logging.getLogger("typonoise")


def _fmt(dist: dict[str, float]) -> str:
    return " ".join(f"{k}={v:.4f}" for k, v in dist.items())


def cmd_induce(args) -> int:
    model, counts, report = induce_from_path(args.seed_corpus, seed=args.seed, max_cost=args.max_cost)
    with open(args.output, "w", encoding="utf-8") as fh:
        save_model(model, fh)
    if args.counts_csv:
        Path(args.counts_csv).write_text(counts.to_csv(), encoding="utf-8")
    print(f"pairs: {counts.pairs_used} used, {counts.pairs_rejected} rejected, "
          f"{report.skipped} lines skipped")
    print("categories:", _fmt(category_distribution(counts)))
    print(f"model written to {args.output}")
    return 0


def _config_from_args(args) -> PipelineConfig:
    cfg = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    for name in ("model", "corpus", "lexicon", "output_dir", "seed", "confusion",
                 "placeholder", "max_distance"):
        value = getattr(args, name)
        if value is not None:
            setattr(cfg, name, value)
    # a level, rate or absolute coefficient set on the command line replaces the file's choice
    if args.level is not None or args.rate is not None or args.coefficients is not None:
        cfg.level, cfg.rate, cfg.coefficients = args.level, args.rate, None
        if args.coefficients is not None:
            cfg.coefficients = parse_coefficients(args.coefficients)
    if args.mix is not None:
        cfg.mix = parse_coefficients(args.mix)
    if args.keep_case:
        cfg.lowercase = False
    for name in ("model", "corpus", "output_dir"):
        if getattr(cfg, name) is None:
            raise StageError("config", ValueError(f"missing required setting {name!r}"))
    return cfg


def cmd_corrupt(args) -> int:
    cfg = _config_from_args(args)
    summary = run_corrupt(cfg, workers=args.workers)
    print(f"documents: {summary.documents} kept, {summary.rejected} rejected")
    print("coefficients:", _fmt(summary.coefficients))
    print(f"char error rate: {summary.char_error_rate:.5f} "
          f"(expected {summary.expected_rate:.5f})")
    print(f"corrupted word rate: {summary.corrupted_word_rate:.4f}")
    if summary.bleu is not None:
        print(f"bleu (final vs original): {summary.bleu:.4f}")
    print(f"outputs in {cfg.output_dir}")
    return 0


def _read_docs(path):
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh]


def cmd_stats(args) -> int:
    if not (args.seed_corpus or args.edit_log or args.original):
        raise StageError("stats", ValueError("nothing to do; give --seed-corpus, --edit-log or --original"))
    word_rate = None
    if args.original:
        if not args.corrupted:
            raise StageError("stats", ValueError("--original needs --corrupted"))
        word_rate = corrupted_word_rate(_read_docs(args.original), _read_docs(args.corrupted))
        print(f"corrupted word rate: {word_rate:.4f}")
    if args.edit_log:
        with open(args.edit_log, encoding="utf-8") as fh:
            lines = [ln for ln in fh if ln.strip() and not ln.startswith("doc\t")]
        print("categories (edit log):", _fmt(category_distribution([Edit.from_line(ln) for ln in lines])))
    if args.seed_corpus:
        _, counts, _ = induce_from_path(args.seed_corpus, seed=args.seed)
        report = StatsReport.from_counts(counts, corrupted_word_rate=word_rate)
        print("categories (seed corpus):", _fmt(report.category_distribution))
        if args.out:
            for path in export_tables(report, args.out).values():
                print(f"wrote {path}")
    return 0


def cmd_bleu(args) -> int:
    score = corpus_bleu(_read_docs(args.reference), _read_docs(args.candidate), max_n=args.max_n)
    print(f"{score:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="typonoise", description=__doc__)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("induce", help="build a noise model from typo/correct pairs")
    s.add_argument("seed_corpus", help="TSV of typo<TAB>correct pairs")
    s.add_argument("-o", "--output", default="model.json", help="model file (default: %(default)s)")
    s.add_argument("--seed", type=int, default=0, help="tie-break seed (default: %(default)s)")
    s.add_argument("--max-cost", type=int, default=4, help="reject pairs above this distance (default: %(default)s)")
    s.add_argument("--counts-csv", help="also dump raw counts here")
    s.set_defaults(func=cmd_induce)

    s = sub.add_parser("corrupt", help="corrupt a corpus and emit a labeled dataset")
    s.add_argument("--config", help="INI file with a [pipeline] section")
    s.add_argument("--model", help="model file from 'induce'")
    s.add_argument("--corpus", help="one document per line, whitespace tokenized")
    s.add_argument("--lexicon", help="word<TAB>count file (default: bundled English list)")
    s.add_argument("-o", "--output-dir", dest="output_dir")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--level", choices=sorted(LEVELS), help="named character error rate")
    g.add_argument("--rate", type=float, help="explicit character error rate")
    g.add_argument("--coefficients", help="absolute per-category coefficients, e.g. substitution=0.4,deletion=0.3")
    s.add_argument("--mix", help="relative category weights for calibration")
    s.add_argument("--seed", type=int)
    s.add_argument("--confusion", choices=[m.value for m in ConfusionMode],
                   help="real-word error mode (default: enforced)")
    s.add_argument("--placeholder", help="token for erased words (default: <UNK>)")
    s.add_argument("--max-distance", type=int, help="suggester edit distance (default: 2)")
    s.add_argument("--keep-case", action="store_true", help="do not lowercase input")
    s.add_argument("--workers", type=int, help="worker processes (default: $TYPONOISE_WORKERS or 1)")
    s.set_defaults(func=cmd_corrupt)

    s = sub.add_parser("stats", help="category distribution, frequency tables and word rate")
    s.add_argument("--seed-corpus")
    s.add_argument("--edit-log", help="edits.tsv from 'corrupt'")
    s.add_argument("--original")
    s.add_argument("--corrupted")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", help="directory for the CSV tables")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("bleu", help="corpus BLEU of candidate against reference")
    s.add_argument("reference")
    s.add_argument("candidate")
    s.add_argument("--max-n", type=int, default=4)
    s.set_defaults(func=cmd_bleu)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error [{exc.stage}]: {exc.cause}", file=sys.stderr)
    except (TyponoiseError, ValueError, OSError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
