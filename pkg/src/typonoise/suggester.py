"""Dictionary-based spelling suggestions and confusion enforcement."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from . import _kernels as K
from .alphabet import DEFAULT_ALPHABET, normalize_word
from .errors import EmptySuggestionError

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Lexicon:
    frequency: Mapping[str, int]
    alphabet: str = DEFAULT_ALPHABET

    @property
    def vocabulary(self):
        return self.frequency.keys()

    def __contains__(self, word) -> bool:
        return word in self.frequency

    def __len__(self) -> int:
        return len(self.frequency)

    def __iter__(self):
        return iter(self.frequency)


def build_lexicon(lines: Iterable[str], alphabet: str = DEFAULT_ALPHABET) -> Lexicon:
    """Read ``word<TAB>count`` lines; duplicates sum, bad lines are skipped."""
    freq: dict[str, int] = {}
    skipped = 0
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        word = normalize_word(parts[0], alphabet) if len(parts) == 2 else None
        try:
            count = int(parts[1]) if word else -1
        except ValueError:
            count = -1
        if word is None or count < 0:
            skipped += 1
            log.debug("lexicon line %d skipped: %r", lineno, line)
            continue
        freq[word] = freq.get(word, 0) + count
    if skipped:
        log.info("skipped %d malformed lexicon lines", skipped)
    if not freq:
        log.warning("lexicon is empty")
    return Lexicon(freq, alphabet)


def load_lexicon(path=None, alphabet: str = DEFAULT_ALPHABET) -> Lexicon:
    if path is None:
        text = resources.files("typonoise.data").joinpath("lexicon_en.tsv").read_text("utf-8")
        return build_lexicon(text.splitlines(), alphabet)
    with open(path, encoding="utf-8") as fh:
        return build_lexicon(fh, alphabet)


def osa_distance(a: str, b: str, bound: int | None = None) -> int:
    """Restricted Damerau-Levenshtein distance.

    With ``bound``, any value above it may be reported as ``bound + 1``.
    """
    if a == b:
        return 0
    n, m = len(a), len(b)
    if bound is not None and abs(n - m) > bound:
        return bound + 1
    prev2 = None
    prev = list(range(m + 1))
    for i in range(1, n + 1):
        cur = [i] + [0] * m
        ai = a[i - 1]
        row_min = i
        for j in range(1, m + 1):
            bj = b[j - 1]
            v = prev[j - 1] + (ai != bj)
            if prev[j] + 1 < v:
                v = prev[j] + 1
            if cur[j - 1] + 1 < v:
                v = cur[j - 1] + 1
            if i > 1 and j > 1 and ai == b[j - 2] and a[i - 2] == bj and ai != bj:
                if prev2[j - 2] + 1 < v:
                    v = prev2[j - 2] + 1
            cur[j] = v
            if v < row_min:
                row_min = v
        if bound is not None and row_min > bound:
            return bound + 1
        prev2, prev = prev, cur
    return prev[m]


class Suggestion(NamedTuple):
    word: str
    edit_distance: int
    frequency: int

    @property
    def rank_key(self):
        return (self.edit_distance, -self.frequency, self.word)


def _deletes(word: str, depth: int) -> set[str]:
    out = {word}
    frontier = out
    for _ in range(depth):
        frontier = {w[:i] + w[i + 1 :] for w in frontier for i in range(len(w))}
        out |= frontier
    return out


class SpellSuggester:
    """Ranked suggestions within a Damerau-Levenshtein radius.

    Candidates come from an index of deletion variants of each word's prefix
    and are then verified with the full distance, so the result equals a
    scan of the whole vocabulary. Ranking is (distance, frequency desc, word).
    """

    def __init__(
        self,
        lexicon: Lexicon,
        max_distance: int = 2,
        prefix_length: int = 7,
        splits: bool = False,
    ):
        if max_distance < 0:
            raise ValueError("max_distance must be >= 0")
        if prefix_length <= max_distance:
            raise ValueError("prefix_length must exceed max_distance")
        self.lexicon = lexicon
        self.max_distance = max_distance
        self.prefix_length = prefix_length
        self.splits = splits
        self._scan = VocabularyScan(lexicon)
        self._words = self._scan.words
        index: dict[str, list[int]] = {}
        for wid, word in enumerate(self._words):
            for key in _deletes(word[:prefix_length], max_distance):
                bucket = index.get(key)
                if bucket is None:
                    index[key] = [wid]
                else:
                    bucket.append(wid)
        self._index = index
        self.suggest = lru_cache(maxsize=200_000)(self._suggest)

    def candidates(self, token: str, max_distance: int) -> set[int]:
        found: set[int] = set()
        index = self._index
        for key in _deletes(token[: self.prefix_length], max_distance):
            bucket = index.get(key)
            if bucket:
                found.update(bucket)
        return found

    def _suggest(self, token: str, max_distance: int | None = None) -> list[Suggestion]:
        d = self.max_distance if max_distance is None else max_distance
        if d > self.max_distance:
            # the index only covers its own radius
            out = self._scan.suggest(token, d)
        else:
            rows = np.fromiter(self.candidates(token, d), dtype=np.int64)
            rows.sort()
            out = self._scan.suggest(token, d, rows)
        out.extend(self._split_suggestions(token, d))
        out.sort(key=lambda s: s.rank_key)
        return out

    def _split_suggestions(self, token: str, d: int) -> list[Suggestion]:
        out = []
        freq = self.lexicon.frequency
        n = len(token)
        if self.splits and d >= 1:
            for i in range(1, n):
                left, right = token[:i], token[i:]
                if left in freq and right in freq:
                    out.append(Suggestion(f"{left} {right}", 1, min(freq[left], freq[right])))
        return out


class VocabularyScan:
    """Distance from a query to every vocabulary word, without any index."""

    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon
        self.words = sorted(lexicon.frequency)
        lookup = {ch: i for i, ch in enumerate(lexicon.alphabet)}
        width = max((len(w) for w in self.words), default=0)
        self.codes = np.full((len(self.words), width), -1, dtype=np.int64)
        for r, w in enumerate(self.words):
            self.codes[r, : len(w)] = [lookup[ch] for ch in w]
        self.lengths = np.array([len(w) for w in self.words], dtype=np.int64)
        self._lookup = lookup

    def distances(self, token: str) -> np.ndarray:
        query = np.array([self._lookup.get(ch, -2) for ch in token], dtype=np.int64)
        return K.osa_many(query, self.codes, self.lengths)

    def suggest(self, token: str, max_distance: int = 2, rows=None) -> list[Suggestion]:
        """Words within ``max_distance``; ``rows`` restricts the scan to those word ids."""
        # words whose length differs by more than the radius can never qualify
        n = len(token)
        if rows is None:
            rows = np.flatnonzero(np.abs(self.lengths - n) <= max_distance)
        else:
            rows = rows[np.abs(self.lengths[rows] - n) <= max_distance]
        query = np.array([self._lookup.get(ch, -2) for ch in token], dtype=np.int64)
        width = min(self.codes.shape[1], n + max_distance)
        dist = K.osa_many(query, np.ascontiguousarray(self.codes[rows, :width]), self.lengths[rows])
        freq = self.lexicon.frequency
        hits = rows[dist <= max_distance]
        dist = dict(zip(rows.tolist(), dist.tolist()))
        out = [Suggestion(self.words[i], int(dist[i]), freq[self.words[i]]) for i in hits]
        return sorted(out, key=lambda s: s.rank_key)


def brute_force_suggest(token: str, lexicon: Lexicon, max_distance: int = 2) -> list[Suggestion]:
    """Reference result from a full vocabulary scan."""
    return VocabularyScan(lexicon).suggest(token, max_distance)


def suggest(token: str, lexicon: Lexicon, max_distance: int = 2) -> list[Suggestion]:
    return SpellSuggester(lexicon, max_distance=max_distance).suggest(token)


def resolve_split(suggestion: str) -> str:
    """Collapse a multi-word suggestion to its longest part (later part on ties)."""
    parts = suggestion.split()
    if not parts:
        raise EmptySuggestionError("empty suggestion")
    best = parts[0]
    for p in parts[1:]:
        if len(p) >= len(best):
            best = p
    return best


class ConfusionMode(str, enum.Enum):
    ENFORCED = "enforced"
    BEST = "best-suggestion"
    OFF = "off"


def enforce_confusion(
    misspelled: str,
    original: str,
    suggester: SpellSuggester,
    mode: ConfusionMode | str = ConfusionMode.ENFORCED,
) -> str:
    """Replace a corrupted token with a dictionary word.

    In enforced mode the top suggestion that differs from ``original`` is
    taken, except that a lone suggestion is accepted as is. Tokens already in
    the vocabulary and tokens without suggestions are returned unchanged.
    """
    mode = ConfusionMode(mode)
    if mode is ConfusionMode.OFF or misspelled in suggester.lexicon:
        return misspelled
    sugs = suggester.suggest(misspelled)
    if not sugs:
        return misspelled
    if mode is ConfusionMode.BEST or len(sugs) == 1:
        return resolve_split(sugs[0].word)
    for s in sugs:
        word = resolve_split(s.word)
        if word != original:
            return word
    return misspelled
