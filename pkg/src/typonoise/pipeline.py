"""End-to-end corruption runs: clean, rebase, calibrate, corrupt, confuse, emit."""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import inspect
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator

from . import __version__
from .alignment import ParseReport, accumulate_counts, parse_seed_corpus
from .dataset import emit, header_line, record_line
from .errors import EmptyCorpusError, TyponoiseError
from .generator import ErrorGenerator, GenerationConfig, is_alphabetic, iter_clean
from .noise_model import (
    CharDistribution,
    Coefficients,
    NoiseModel,
    calibrate,
    expected_error_rate,
    dumps_model,
    induce,
    load_model,
    loads_model,
    rebase_frequencies,
)
from .stats import BleuAccumulator
from .suggester import ConfusionMode, Lexicon, SpellSuggester, enforce_confusion, load_lexicon

log = logging.getLogger(__name__)

LEVELS = {"low": 0.0375, "medium": 0.075, "high": 0.15}
CHUNK = 256


class StageError(TyponoiseError):
    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")


def parse_coefficients(text: str | None) -> dict[str, float]:
    """``substitution=1,deletion=0.5`` -> mapping; unnamed categories default to 1."""
    if not text:
        return {}
    out = {}
    for item in text.split(","):
        key, _, value = item.partition("=")
        out[key.strip()] = float(value)
    Coefficients.from_mapping(out)  # validates names and signs
    return out


@dataclass
class PipelineConfig:
    model: str | None = None
    corpus: str | None = None
    lexicon: str | None = None
    output_dir: str | None = None
    level: str | None = None
    rate: float | None = None
    mix: dict[str, float] = field(default_factory=dict)
    coefficients: dict[str, float] | None = None
    seed: int | None = None
    confusion: str = ConfusionMode.ENFORCED.value
    placeholder: str = "<UNK>"
    max_distance: int = 2
    lowercase: bool = True

    def validate(self) -> None:
        chosen = [x for x in (self.level, self.rate, self.coefficients) if x is not None]
        if len(chosen) != 1:
            raise ValueError("set exactly one of level, rate or absolute coefficients")
        if self.level is not None and self.level not in LEVELS:
            raise ValueError(f"unknown level {self.level!r}; choose from {sorted(LEVELS)}")
        if self.seed is None:
            raise ValueError("a seed is required for corrupt runs")
        ConfusionMode(self.confusion)
        GenerationConfig(seed=self.seed, placeholder=self.placeholder)

    @property
    def target_rate(self) -> float | None:
        return LEVELS[self.level] if self.level is not None else self.rate

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        parser = configparser.ConfigParser()
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        if not parser.has_section("pipeline"):
            raise ValueError(f"{path}: missing [pipeline] section")
        sec = parser["pipeline"]
        cfg = cls()
        for f in dataclasses.fields(cls):
            if f.name not in sec:
                continue
            raw = sec[f.name]
            if f.name in ("mix", "coefficients"):
                value = parse_coefficients(raw)
            elif f.name in ("rate",):
                value = float(raw)
            elif f.name in ("seed", "max_distance"):
                value = int(raw)
            elif f.name == "lowercase":
                value = sec.getboolean(f.name)
            else:
                value = raw
            setattr(cfg, f.name, value)
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def read_documents(path, lowercase: bool = True) -> Iterator[list[str]]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            yield (line.lower() if lowercase else line).split()


def induce_from_path(path, seed: int = 0, max_cost: int = 4):
    report = ParseReport()
    with open(path, encoding="utf-8") as fh:
        pairs = parse_seed_corpus(fh, report=report)
    if not pairs:
        raise EmptyCorpusError(f"{path}: no usable seed pairs")
    counts = accumulate_counts(pairs, seed=seed, max_cost=max_cost)
    if counts.pairs_used == 0:
        raise EmptyCorpusError(f"{path}: every pair was rejected")
    return induce(counts), counts, report


# ---------------------------------------------------------------------------
# per-document work


@dataclass
class ProcessedDocument:
    original: list[str]
    corrupted: list[str]
    final: list[str]
    edits: list
    alpha_chars: int
    corrupted_chars: int


class DocumentProcessor:
    def __init__(self, model: NoiseModel, gen_config: GenerationConfig, suggester, mode):
        self.generator = ErrorGenerator(model, gen_config)
        self.suggester = suggester
        self.mode = ConfusionMode(mode)
        self.alphabet = model.alphabet
        self.placeholder = gen_config.placeholder

    def confuse(self, original: list[str], corrupted: list[str]) -> list[str]:
        if self.mode is ConfusionMode.OFF:
            return list(corrupted)
        out = []
        for orig, tok in zip(original, corrupted):
            if tok != orig and tok and is_alphabetic(tok, self.alphabet):
                tok = enforce_confusion(tok, orig, self.suggester, self.mode)
            out.append(tok)
        return out

    def __call__(self, ordinal: int, tokens: list[str]) -> ProcessedDocument:
        res = self.generator.corrupt(tokens, ordinal)
        final = self.confuse(tokens, res.tokens)
        return ProcessedDocument(
            tokens, res.tokens, final, res.edits, res.alpha_chars, res.corrupted_chars
        )


_worker: DocumentProcessor | None = None


def _build_processor(model_text, gen_config, lexicon, max_distance, mode):
    """``lexicon`` is a loaded Lexicon or a path (workers reload it themselves)."""
    model = loads_model(model_text)
    suggester = None
    if ConfusionMode(mode) is not ConfusionMode.OFF:
        if not isinstance(lexicon, Lexicon):
            lexicon = load_lexicon(lexicon, model.alphabet)
        suggester = SpellSuggester(lexicon, max_distance=max_distance)
    return DocumentProcessor(model, gen_config, suggester, mode)


def _init_worker(*args):
    global _worker
    _worker = _build_processor(*args)


def _run_chunk(chunk):
    return [_worker(i, toks) for i, toks in chunk]


def _chunks(items: Iterable, size: int) -> Iterator[list]:
    it = iter(items)
    while batch := list(islice(it, size)):
        yield batch


def worker_count() -> int:
    raw = os.environ.get("TYPONOISE_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"TYPONOISE_WORKERS must be an integer, got {raw!r}") from None


# ---------------------------------------------------------------------------


@dataclass
class RunSummary:
    documents: int
    rejected: int
    tokens: int
    alpha_chars: int
    corrupted_chars: int
    corrupted_words: int
    labels_positive: int
    bleu: float | None
    coefficients: dict[str, float]
    target_rate: float | None
    expected_rate: float
    outputs: dict[str, str]

    @property
    def char_error_rate(self) -> float:
        return self.corrupted_chars / self.alpha_chars if self.alpha_chars else 0.0

    @property
    def corrupted_word_rate(self) -> float:
        return self.corrupted_words / self.tokens if self.tokens else 0.0


def _stage(name):
    """Re-raise library errors from ``fn`` as StageError tagged with ``name``."""

    def wrap(fn):
        if inspect.isgeneratorfunction(fn):

            def gen(*a, **kw):
                try:
                    yield from fn(*a, **kw)
                except StageError:
                    raise
                except (TyponoiseError, ValueError, OSError) as exc:
                    raise StageError(name, exc) from exc

            return gen

        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except StageError:
                raise
            except (TyponoiseError, ValueError, OSError) as exc:
                raise StageError(name, exc) from exc

        return inner

    return wrap


def run_corrupt(config: PipelineConfig, workers: int | None = None) -> RunSummary:
    """Run the whole corruption pipeline and write every output file."""
    _stage("config")(config.validate)()
    workers = worker_count() if workers is None else workers
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    model = _stage("load-model")(load_model)(str(config.model))
    lexicon = _stage("load-lexicon")(load_lexicon)(config.lexicon, model.alphabet)

    def cleaned() -> Iterator[list[str]]:
        # second read of the corpus rather than holding it in memory
        docs = read_documents(config.corpus, config.lowercase)
        for _, doc, bad in iter_clean(docs, lexicon, model.alphabet):
            if bad is None:
                yield doc

    @_stage("clean")
    def first_pass():
        dist = CharDistribution.empty(model.alphabet)
        kept = rejected = 0
        texts = []
        docs = read_documents(config.corpus, config.lowercase)
        with open(out / "rejected.tsv", "w", encoding="utf-8", newline="\n") as report:
            report.write("line\ttoken\n")
            for i, doc, bad in iter_clean(docs, lexicon, model.alphabet):
                if bad is not None:
                    rejected += 1
                    report.write(f"{i}\t{bad}\n")
                    continue
                kept += 1
                texts.append(" ".join(doc))
                if len(texts) >= 4096:
                    dist = dist + CharDistribution.from_texts(texts, model.alphabet)
                    texts = []
        dist = dist + CharDistribution.from_texts(texts, model.alphabet)
        return dist, kept, rejected

    dist, kept_docs, rejected = first_pass()
    if kept_docs == 0:
        raise StageError("clean", EmptyCorpusError("no document survived cleaning"))

    rebased = _stage("rebase")(rebase_frequencies)(model, dist)

    @_stage("calibrate")
    def coefficients() -> Coefficients:
        if config.coefficients is not None:
            return Coefficients.from_mapping(config.coefficients)
        mix = Coefficients.from_mapping(config.mix) if config.mix else Coefficients()
        return calibrate(rebased, dist, config.target_rate, mix=mix)

    coeffs = coefficients()
    expected = expected_error_rate(rebased, dist, coeffs)
    gen_config = GenerationConfig(coeffs, seed=config.seed, placeholder=config.placeholder)
    init_args = (dumps_model(rebased), gen_config, config.lexicon, config.max_distance, config.confusion)

    @_stage("corrupt")
    def process() -> Iterator[ProcessedDocument]:
        items = enumerate(cleaned())
        if workers <= 1:
            proc = _build_processor(init_args[0], gen_config, lexicon, *init_args[3:])
            for i, toks in items:
                yield proc(i, toks)
            return
        with ProcessPoolExecutor(workers, initializer=_init_worker, initargs=init_args) as pool:
            for batch in pool.map(_run_chunk, _chunks(items, CHUNK)):
                yield from batch

    names = {
        "original": "original.txt",
        "corrupted": "corrupted.txt",
        "final": "final.txt",
        "edits": "edits.tsv",
        "dataset": "dataset.jsonl",
    }
    paths = {k: out / v for k, v in names.items()}
    totals = dict(docs=0, tokens=0, alpha=0, corrupted=0, words=0, positive=0)
    bleu = BleuAccumulator()
    files = {k: open(p, "w", encoding="utf-8", newline="\n") for k, p in paths.items()}
    try:
        files["edits"].write("doc\ttoken\tchar\tcategory\tdetail\n")
        files["dataset"].write(header_line() + "\n")
        for doc in process():
            labeled = _stage("emit")(emit)(doc.original, doc.final, config.placeholder)
            files["original"].write(" ".join(doc.original) + "\n")
            files["corrupted"].write(" ".join(t or config.placeholder for t in doc.corrupted) + "\n")
            files["final"].write(" ".join(labeled.surfaces) + "\n")
            for e in doc.edits:
                files["edits"].write(e.to_line() + "\n")
            files["dataset"].write(record_line(labeled) + "\n")
            totals["docs"] += 1
            totals["tokens"] += len(labeled)
            totals["alpha"] += doc.alpha_chars
            totals["corrupted"] += doc.corrupted_chars
            positives = sum(labeled.labels)
            totals["words"] += positives
            totals["positive"] += positives
            bleu.add(doc.original, labeled.surfaces)
    finally:
        for fh in files.values():
            fh.close()

    summary = RunSummary(
        documents=totals["docs"],
        rejected=rejected,
        tokens=totals["tokens"],
        alpha_chars=totals["alpha"],
        corrupted_chars=totals["corrupted"],
        corrupted_words=totals["words"],
        labels_positive=totals["positive"],
        bleu=bleu.score() if totals["docs"] else None,
        coefficients=coeffs.as_dict(),
        target_rate=config.target_rate,
        expected_rate=expected,
        outputs={k: str(p) for k, p in paths.items()},
    )
    write_manifest(out / "manifest.json", config, summary, paths)
    return summary


def write_manifest(path: Path, config: PipelineConfig, summary: RunSummary, outputs) -> None:
    cfg = config.to_dict()
    inputs = {"model": sha256_file(config.model), "corpus": sha256_file(config.corpus)}
    if config.lexicon:
        inputs["lexicon"] = sha256_file(config.lexicon)
    manifest = {
        "tool": "typonoise",
        "version": __version__,
        "config": cfg,
        "config_sha256": hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest(),
        "seed": config.seed,
        "inputs": inputs,
        "coefficients": summary.coefficients,
        "target_rate": summary.target_rate,
        "expected_rate": summary.expected_rate,
        "observed": {
            "documents": summary.documents,
            "rejected_documents": summary.rejected,
            "tokens": summary.tokens,
            "alpha_chars": summary.alpha_chars,
            "corrupted_chars": summary.corrupted_chars,
            "char_error_rate": summary.char_error_rate,
            "corrupted_word_rate": summary.corrupted_word_rate,
            "bleu": summary.bleu,
        },
        "outputs": {k: sha256_file(p) for k, p in outputs.items()},
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
