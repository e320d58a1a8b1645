"""Error statistics, corrupted-word rate and corpus BLEU."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .alignment import CATEGORIES, ClassifiedEdit, EditKind, ErrorCounts
from .errors import AlignmentViolation, EmptyCorpusError, NoEditsError

FIGURES = (
    "category_distribution",
    "insertion_freq",
    "deletion_freq",
    "substitution_freq",
    "substitution_matrix",
)


def _kind(edit) -> str:
    if isinstance(edit, ClassifiedEdit):
        return edit.kind.value
    return EditKind(edit.category).value


def category_counts(edits) -> Counter:
    if isinstance(edits, ErrorCounts):
        return Counter({k.value: v for k, v in edits.category_totals().items()})
    counts = Counter()
    for e in edits:
        counts[_kind(e)] += 1
    return counts


def category_distribution(edits) -> dict[str, float]:
    """Proportions over the five categories, in canonical order.

    Accepts classified edits, generator edit-log entries or ErrorCounts.
    """
    counts = category_counts(edits)
    total = sum(counts.values())
    if total == 0:
        raise NoEditsError("no edits to summarize")
    return {k.value: counts[k.value] / total for k in CATEGORIES}


def _normalize(v: np.ndarray) -> np.ndarray:
    total = v.sum()
    return v / total if total else np.zeros(v.shape)


@dataclass
class StatsReport:
    alphabet: str
    category_distribution: dict[str, float]
    insertion_freq: np.ndarray
    deletion_freq: np.ndarray
    substitution_freq: np.ndarray
    substitution_matrix: np.ndarray
    corrupted_word_rate: float | None = None

    @classmethod
    def from_counts(cls, counts: ErrorCounts, corrupted_word_rate: float | None = None) -> "StatsReport":
        totals = category_counts(counts)
        n = sum(totals.values())
        dist = {k.value: (totals[k.value] / n if n else 0.0) for k in CATEGORIES}
        inserted = (counts.ins_pair_before + counts.ins_pair_after).sum(axis=0)
        rows = counts.sub_pair.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            matrix = np.where(rows > 0, counts.sub_pair / np.where(rows > 0, rows, 1), 0.0)
        return cls(
            alphabet=counts.alphabet,
            category_distribution=dist,
            insertion_freq=_normalize(inserted.astype(float)),
            deletion_freq=_normalize(counts.deletion.astype(float)),
            substitution_freq=_normalize(counts.sub_total.astype(float)),
            substitution_matrix=matrix,
            corrupted_word_rate=corrupted_word_rate,
        )


def corrupted_word_rate(original: Iterable[Sequence[str]], corrupted: Iterable[Sequence[str]]) -> float:
    """Fraction of token positions whose surface differs from the original."""
    changed = total = 0
    orig_docs, corr_docs = list(original), list(corrupted)
    if len(orig_docs) != len(corr_docs):
        raise AlignmentViolation(f"{len(orig_docs)} original vs {len(corr_docs)} corrupted documents")
    for i, (o, c) in enumerate(zip(orig_docs, corr_docs)):
        if len(o) != len(c):
            raise AlignmentViolation(f"document {i}: {len(o)} vs {len(c)} tokens")
        total += len(o)
        changed += sum(a != b for a, b in zip(o, c))
    return changed / total if total else 0.0


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _tokens(doc) -> list[str]:
    return doc.split() if isinstance(doc, str) else list(doc)


class BleuAccumulator:
    """Streaming corpus-level BLEU statistics; partial results merge with ``+``."""

    def __init__(self, max_n: int = 4):
        self.max_n = max_n
        self.matches = [0] * max_n
        self.possible = [0] * max_n
        self.ref_len = 0
        self.cand_len = 0
        self.documents = 0

    def add(self, reference: Sequence[str], candidate: Sequence[str]) -> None:
        self.documents += 1
        self.ref_len += len(reference)
        self.cand_len += len(candidate)
        for n in range(1, self.max_n + 1):
            ref_ngrams = _ngrams(reference, n)
            cand_ngrams = _ngrams(candidate, n)
            self.matches[n - 1] += sum(min(c, ref_ngrams[g]) for g, c in cand_ngrams.items())
            self.possible[n - 1] += max(len(candidate) - n + 1, 0)

    def __add__(self, other: "BleuAccumulator") -> "BleuAccumulator":
        if self.max_n != other.max_n:
            raise ValueError("max_n differs")
        out = BleuAccumulator(self.max_n)
        out.matches = [a + b for a, b in zip(self.matches, other.matches)]
        out.possible = [a + b for a, b in zip(self.possible, other.possible)]
        out.ref_len = self.ref_len + other.ref_len
        out.cand_len = self.cand_len + other.cand_len
        out.documents = self.documents + other.documents
        return out

    def score(self) -> float:
        if self.documents == 0:
            raise EmptyCorpusError("BLEU needs at least one document")
        if self.cand_len == 0 or min(self.matches) == 0:
            return 0.0
        log_p = sum(math.log(m / p) for m, p in zip(self.matches, self.possible)) / self.max_n
        if self.cand_len > self.ref_len:
            bp = 1.0
        else:
            bp = math.exp(1.0 - self.ref_len / self.cand_len)
        return bp * math.exp(log_p)


def corpus_bleu(references, candidates, max_n: int = 4) -> float:
    """Corpus-level BLEU with one reference per candidate and no smoothing."""
    refs = [_tokens(r) for r in references]
    cands = [_tokens(c) for c in candidates]
    if len(refs) != len(cands):
        raise AlignmentViolation(f"{len(refs)} references vs {len(cands)} candidates")
    acc = BleuAccumulator(max_n)
    for ref, cand in zip(refs, cands):
        acc.add(ref, cand)
    return acc.score()


def tables_as_csv(report: StatsReport) -> dict[str, str]:
    """One CSV document per figure."""
    al = report.alphabet
    out = {}

    def render(rows) -> str:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        return buf.getvalue()

    out["category_distribution"] = render(
        [["category", "proportion"]] + [[k, repr(float(v))] for k, v in report.category_distribution.items()]
    )
    for name in ("insertion_freq", "deletion_freq", "substitution_freq"):
        vec = getattr(report, name)
        out[name] = render([["char", "proportion"]] + [[c, repr(float(v))] for c, v in zip(al, vec)])
    matrix = [["original"] + list(al)]
    for c, row in zip(al, report.substitution_matrix):
        matrix.append([c] + [repr(float(v)) for v in row])
    out["substitution_matrix"] = render(matrix)
    return out


def export_tables(report: StatsReport, outdir) -> dict[str, Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {}
    for name, text in tables_as_csv(report).items():
        path = outdir / f"{name}.csv"
        path.write_text(text, encoding="utf-8")
        paths[name] = path
    return paths
