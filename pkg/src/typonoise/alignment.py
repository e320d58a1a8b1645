"""Seed corpus parsing and edit-script recovery for (typo, correct) pairs."""

from __future__ import annotations

import csv
import enum
import io
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .alphabet import DEFAULT_ALPHABET, normalize_word
from .keyboard import KeyboardLayout, Side, default_layout

log = logging.getLogger(__name__)

DEFAULT_MAX_COST = 4


class EditKind(str, enum.Enum):
    SUBSTITUTION = "substitution"
    INSERTION = "insertion"
    REPLICATION = "replication"
    DELETION = "deletion"
    TRANSPOSITION = "transposition"


CATEGORIES = tuple(EditKind)


class InsertSide(str, enum.Enum):
    BEFORE = "before"
    AFTER = "after"


@dataclass(frozen=True)
class TypoPair:
    typo: str
    correct: str


@dataclass(frozen=True)
class ClassifiedEdit:
    """One classified character edit turning ``correct`` into ``typo``.

    ``position`` is an index into the correct word. For substitution,
    deletion and transposition it is the affected character (the first of
    the pair for transpositions). For insertion and replication it is the
    gap before which the new character goes, so ``len(correct)`` is valid.

    ``char`` holds the original (substitution, deletion), the inserted or
    replicated character, or the first transposed character. ``other`` holds
    the replacement, the insertion anchor, or the second transposed character.
    """

    kind: EditKind
    position: int
    char: str
    other: str = ""
    side: InsertSide | None = None

    @classmethod
    def substitution(cls, position, original, replacement):
        return cls(EditKind.SUBSTITUTION, position, original, replacement)

    @classmethod
    def insertion(cls, position, inserted, anchor, side):
        return cls(EditKind.INSERTION, position, inserted, anchor, InsertSide(side))

    @classmethod
    def replication(cls, position, char):
        return cls(EditKind.REPLICATION, position, char)

    @classmethod
    def deletion(cls, position, char):
        return cls(EditKind.DELETION, position, char)

    @classmethod
    def transposition(cls, position, first, second):
        return cls(EditKind.TRANSPOSITION, position, first, second)


EditScript = list[ClassifiedEdit]


@dataclass
class ParseReport:
    lines: int = 0
    skipped: int = 0
    diagnostics: list[str] = field(default_factory=list)


def parse_seed_corpus(
    stream: Iterable[str], alphabet: str = DEFAULT_ALPHABET, report: ParseReport | None = None
) -> list[TypoPair]:
    """Read ``typo<TAB>correct`` lines into normalized pairs.

    Lines that are malformed or leave the alphabet after lowercasing are
    skipped and recorded in ``report``.
    """
    if report is None:
        report = ParseReport()
    pairs = []
    for lineno, raw in enumerate(stream, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        report.lines += 1
        parts = line.split("\t")
        if len(parts) != 2:
            report.skipped += 1
            report.diagnostics.append(f"line {lineno}: expected 2 tab-separated fields")
            continue
        typo, correct = (normalize_word(p, alphabet) for p in parts)
        if typo is None or correct is None:
            report.skipped += 1
            report.diagnostics.append(f"line {lineno}: outside alphabet: {line!r}")
            continue
        pairs.append(TypoPair(typo, correct))
    if report.lines == 0:
        log.warning("seed corpus is empty")
    elif report.skipped:
        log.info("skipped %d of %d seed lines", report.skipped, report.lines)
    return pairs


def osa_table(source: str, target: str) -> list[list[int]]:
    """Optimal string alignment (restricted Damerau-Levenshtein) DP table."""
    n, m = len(source), len(target)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        si = source[i - 1]
        row, prev = d[i], d[i - 1]
        for j in range(1, m + 1):
            tj = target[j - 1]
            best = prev[j - 1] + (si != tj)
            if prev[j] + 1 < best:
                best = prev[j] + 1
            if row[j - 1] + 1 < best:
                best = row[j - 1] + 1
            if i > 1 and j > 1 and si == target[j - 2] and source[i - 2] == tj and si != tj:
                t = d[i - 2][j - 2] + 1
                if t < best:
                    best = t
            row[j] = best
    return d


def _raw_alignment(correct: str, typo: str) -> list[tuple]:
    """Backtrace one minimal OSA alignment, left to right.

    Ties prefer match, then transposition > substitution > deletion > insertion.
    Yields tuples (op, i, j) with i/j indices into correct/typo.
    """
    d = osa_table(correct, typo)
    i, j = len(correct), len(typo)
    ops = []
    while i > 0 or j > 0:
        cur = d[i][j]
        if i > 0 and j > 0 and correct[i - 1] == typo[j - 1] and d[i - 1][j - 1] == cur:
            i, j = i - 1, j - 1
            continue
        if (
            i > 1
            and j > 1
            and correct[i - 1] == typo[j - 2]
            and correct[i - 2] == typo[j - 1]
            and correct[i - 1] != correct[i - 2]
            and d[i - 2][j - 2] + 1 == cur
        ):
            ops.append(("T", i - 2, j - 2))
            i, j = i - 2, j - 2
        elif i > 0 and j > 0 and d[i - 1][j - 1] + 1 == cur:
            ops.append(("S", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and d[i - 1][j] + 1 == cur:
            ops.append(("D", i - 1, j))
            i -= 1
        else:
            ops.append(("I", i, j - 1))
            j -= 1
    ops.reverse()
    return ops


def align_pair(
    pair: TypoPair,
    layout: KeyboardLayout | None = None,
    rng: np.random.Generator | Callable[[], np.random.Generator] | None = None,
) -> EditScript:
    """Recover the classified edit script that turns ``pair.correct`` into ``pair.typo``.

    ``rng`` breaks keyboard-distance ties when attributing insertions; it may
    be a zero-argument factory so that generators are only built when a tie
    actually occurs.
    """
    layout = layout or default_layout()
    correct, typo = pair.correct, pair.typo
    script: EditScript = []
    for op, i, j in _raw_alignment(correct, typo):
        if op == "S":
            script.append(ClassifiedEdit.substitution(i, correct[i], typo[j]))
        elif op == "D":
            script.append(ClassifiedEdit.deletion(i, correct[i]))
        elif op == "T":
            script.append(ClassifiedEdit.transposition(i, correct[i], correct[i + 1]))
        else:
            ch = typo[j]
            neighbors = (typo[j - 1] if j > 0 else None, typo[j + 1] if j + 1 < len(typo) else None)
            if ch in neighbors:
                script.append(ClassifiedEdit.replication(i, ch))
                continue
            left = correct[i - 1] if i > 0 else None
            right = correct[i] if i < len(correct) else None
            if left is not None and right is not None and callable(rng):
                rng = rng()
            side = layout.attribute_insertion(left, ch, right, rng)
            if side is Side.LEFT:
                script.append(ClassifiedEdit.insertion(i, ch, left, InsertSide.AFTER))
            else:
                script.append(ClassifiedEdit.insertion(i, ch, right, InsertSide.BEFORE))
    return script


def apply_script(correct: str, script: EditScript) -> str:
    """Replay ``script`` on ``correct``."""
    gaps: dict[int, list[str]] = {}
    at: dict[int, ClassifiedEdit] = {}
    for e in script:
        if e.kind in (EditKind.INSERTION, EditKind.REPLICATION):
            gaps.setdefault(e.position, []).append(e.char)
        else:
            if e.position in at:
                raise ValueError(f"two edits anchored at position {e.position}")
            at[e.position] = e
    out = []
    i = 0
    n = len(correct)
    while i <= n:
        out.extend(gaps.get(i, ()))
        if i == n:
            break
        e = at.get(i)
        if e is None:
            out.append(correct[i])
        elif e.kind is EditKind.SUBSTITUTION:
            out.append(e.other)
        elif e.kind is EditKind.TRANSPOSITION:
            if i + 1 in gaps or i + 1 in at:
                raise ValueError(f"edit inside the transposed pair at {i}")
            out.append(correct[i + 1])
            out.append(correct[i])
            i += 1
        i += 1
    return "".join(out)


@dataclass
class ErrorCounts:
    """Raw tallies behind every induced probability.

    Pair tables are indexed ``[anchor, other]``: ``sub_pair[c, c']`` counts
    ``c'`` replacing ``c``; ``ins_pair_before[c, c']`` counts ``c'`` inserted
    right before ``c``; ``trans[c1, c2]`` counts ``c1c2`` typed as ``c2c1``.
    """

    alphabet: str
    char_freq: np.ndarray
    bigram_freq: np.ndarray
    sub_total: np.ndarray
    sub_pair: np.ndarray
    ins_total: np.ndarray
    ins_pair_before: np.ndarray
    ins_pair_after: np.ndarray
    repl: np.ndarray
    deletion: np.ndarray
    trans: np.ndarray
    pairs_used: int = 0
    pairs_rejected: int = 0

    VECTORS = ("char_freq", "sub_total", "ins_total", "repl", "deletion")
    MATRICES = ("bigram_freq", "sub_pair", "ins_pair_before", "ins_pair_after", "trans")

    @classmethod
    def zeros(cls, alphabet: str = DEFAULT_ALPHABET) -> "ErrorCounts":
        a = len(alphabet)
        kw = {k: np.zeros(a, dtype=np.int64) for k in cls.VECTORS}
        kw.update({k: np.zeros((a, a), dtype=np.int64) for k in cls.MATRICES})
        return cls(alphabet=alphabet, **kw)

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        if self.alphabet != other.alphabet:
            raise ValueError("cannot merge counts over different alphabets")
        kw = {k: getattr(self, k) + getattr(other, k) for k in self.VECTORS + self.MATRICES}
        return ErrorCounts(
            alphabet=self.alphabet,
            pairs_used=self.pairs_used + other.pairs_used,
            pairs_rejected=self.pairs_rejected + other.pairs_rejected,
            **kw,
        )

    def __eq__(self, other):
        if not isinstance(other, ErrorCounts):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.pairs_used == other.pairs_used
            and self.pairs_rejected == other.pairs_rejected
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in self.VECTORS + self.MATRICES
            )
        )

    def category_totals(self) -> dict[EditKind, int]:
        return {
            EditKind.SUBSTITUTION: int(self.sub_total.sum()),
            EditKind.INSERTION: int(self.ins_total.sum()),
            EditKind.REPLICATION: int(self.repl.sum()),
            EditKind.DELETION: int(self.deletion.sum()),
            EditKind.TRANSPOSITION: int(self.trans.sum()),
        }

    def add_word(self, word: str) -> None:
        idx = self.alphabet.index
        codes = [idx(ch) for ch in word]
        for c in codes:
            self.char_freq[c] += 1
        for a, b in zip(codes, codes[1:]):
            self.bigram_freq[a, b] += 1

    def add_edit(self, edit: ClassifiedEdit) -> None:
        idx = self.alphabet.index
        kind = edit.kind
        if kind is EditKind.SUBSTITUTION:
            c = idx(edit.char)
            self.sub_total[c] += 1
            self.sub_pair[c, idx(edit.other)] += 1
        elif kind is EditKind.INSERTION:
            c = idx(edit.other)
            self.ins_total[c] += 1
            table = self.ins_pair_before if edit.side is InsertSide.BEFORE else self.ins_pair_after
            table[c, idx(edit.char)] += 1
        elif kind is EditKind.REPLICATION:
            self.repl[idx(edit.char)] += 1
        elif kind is EditKind.DELETION:
            self.deletion[idx(edit.char)] += 1
        else:
            self.trans[idx(edit.char), idx(edit.other)] += 1

    def to_csv(self) -> str:
        """Rows ``category,args...,count`` for every nonzero cell."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["category", "arg1", "arg2", "count"])
        al = self.alphabet
        for name, key in (
            ("char", "char_freq"),
            ("substitution_total", "sub_total"),
            ("insertion_total", "ins_total"),
            ("replication", "repl"),
            ("deletion", "deletion"),
        ):
            for c, n in enumerate(getattr(self, key)):
                if n:
                    w.writerow([name, al[c], "", int(n)])
        for name, key in (
            ("bigram", "bigram_freq"),
            ("substitution", "sub_pair"),
            ("insertion_before", "ins_pair_before"),
            ("insertion_after", "ins_pair_after"),
            ("transposition", "trans"),
        ):
            table = getattr(self, key)
            for a, b in zip(*np.nonzero(table)):
                w.writerow([name, al[a], al[b], int(table[a, b])])
        return buf.getvalue()


def iter_scripts(
    pairs: Iterable[TypoPair],
    layout: KeyboardLayout | None = None,
    seed: int = 0,
    max_cost: int | None = DEFAULT_MAX_COST,
    start: int = 0,
) -> Iterator[tuple[int, TypoPair, EditScript | None]]:
    """Align each pair; the script is None when its cost exceeds ``max_cost``.

    Tie-breaking draws come from a generator seeded by (seed, pair index), so
    results do not depend on how the pairs are chunked.
    """
    layout = layout or default_layout()
    for k, pair in enumerate(pairs, start):
        script = align_pair(pair, layout, rng=lambda k=k: np.random.default_rng([seed, k]))
        if max_cost is not None and len(script) > max_cost:
            log.debug("rejecting %s -> %s: cost %d", pair.typo, pair.correct, len(script))
            yield k, pair, None
        else:
            yield k, pair, script


def accumulate_counts(
    pairs: Iterable[TypoPair],
    alphabet: str = DEFAULT_ALPHABET,
    layout: KeyboardLayout | None = None,
    seed: int = 0,
    max_cost: int | None = DEFAULT_MAX_COST,
    start: int = 0,
) -> ErrorCounts:
    """Tally character, bigram and error-family counts over aligned pairs.

    ``start`` is the global index of the first pair, for chunked processing.
    """
    counts = ErrorCounts.zeros(alphabet)
    for _, pair, script in iter_scripts(pairs, layout, seed, max_cost, start):
        if script is None:
            counts.pairs_rejected += 1
            continue
        counts.pairs_used += 1
        counts.add_word(pair.correct)
        for edit in script:
            counts.add_edit(edit)
    if counts.pairs_rejected:
        log.info("rejected %d pairs above alignment cost %s", counts.pairs_rejected, max_cost)
    return counts
