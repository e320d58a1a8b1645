"""Character-level error injection driven by a noise model."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Sequence

import numpy as np

from . import _kernels as K
from ._text import Encoder
from .alignment import EditKind
from .noise_model import Coefficients, NoiseModel, event_probabilities

DEFAULT_PLACEHOLDER = "<UNK>"


@dataclass(frozen=True)
class GenerationConfig:
    coefficients: Coefficients = field(default_factory=Coefficients)
    seed: int = 0
    placeholder: str = DEFAULT_PLACEHOLDER

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a non-negative 64-bit integer")
        if not self.placeholder or any(ch.isspace() for ch in self.placeholder):
            raise ValueError("placeholder must be non-empty and contain no whitespace")


class Edit(NamedTuple):
    """One applied edit. ``char`` indexes the clean token.

    ``detail``: substitution ``"e>w"``, insertion ``"before:x"`` or
    ``"after:x"``, replication and deletion the character, transposition the
    original pair.
    """

    doc: int
    token: int
    char: int
    category: str
    detail: str

    def to_line(self) -> str:
        return f"{self.doc}\t{self.token}\t{self.char}\t{self.category}\t{self.detail}"

    @classmethod
    def from_line(cls, line: str) -> "Edit":
        doc, token, char, category, detail = line.rstrip("\n").split("\t")
        EditKind(category)
        return cls(int(doc), int(token), int(char), category, detail)


EditLog = list[Edit]


@dataclass
class CorruptionResult:
    tokens: list[str]
    edits: EditLog
    alpha_chars: int
    corrupted_chars: int


@dataclass
class CleaningReport:
    documents: int = 0
    rejected: int = 0
    offenders: list[tuple[int, str]] = field(default_factory=list)


def is_alphabetic(token: str, alphabet: str) -> bool:
    return bool(token) and all(ch in alphabet for ch in token)


def iter_clean(
    documents: Iterable[Sequence[str]], lexicon, alphabet: str | None = None
) -> Iterator[tuple[int, Sequence[str], str | None]]:
    """Stream ``(index, document, offender)``; offender is None for kept documents."""
    alphabet = alphabet or lexicon.alphabet
    for i, doc in enumerate(documents):
        bad = next((t for t in doc if is_alphabetic(t, alphabet) and t not in lexicon), None)
        yield i, doc, bad


def clean_corpus(
    documents: Iterable[Sequence[str]], lexicon, alphabet: str | None = None
) -> tuple[list[list[str]], CleaningReport]:
    """Keep documents whose alphabetic tokens are all in the lexicon.

    Tokens with any character outside the alphabet (numbers, punctuation,
    contractions) are not checked.
    """
    report = CleaningReport()
    kept = []
    for i, doc, bad in iter_clean(documents, lexicon, alphabet):
        report.documents += 1
        if bad is None:
            kept.append(list(doc))
        else:
            report.rejected += 1
            report.offenders.append((i, bad))
    return kept, report


def _cdf(table: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(table, axis=1)
    for row in range(table.shape[0]):
        nz = np.flatnonzero(table[row] > 0)
        # rows without mass never fire; all-ones keeps sampling in bounds
        cdf[row, nz[-1] if nz.size else 0 :] = 1.0
    return cdf


class ErrorGenerator:
    """Corrupts documents with a fixed model and configuration."""

    def __init__(self, model: NoiseModel, config: GenerationConfig | None = None):
        self.model = model
        self.config = config or GenerationConfig()
        self.encoder = Encoder(model.alphabet)
        q = event_probabilities(model, self.config.coefficients)
        self.tables = (
            q["sub"],
            q["ins_before"],
            q["ins_after"],
            q["repl"],
            q["del"],
            q["trans"],
            _cdf(model.p_sub_pair),
            _cdf(model.p_ins_pair_before),
            _cdf(model.p_ins_pair_after),
        )

    def rng_for(self, doc_index: int) -> np.random.Generator:
        return np.random.default_rng([int(self.config.seed), int(doc_index)])

    def corrupt(self, tokens: Sequence[str], doc_index: int = 0) -> CorruptionResult:
        return self.corrupt_with(tokens, self.rng_for(doc_index), doc_index)

    def corrupt_with(
        self, tokens: Sequence[str], rng: np.random.Generator, doc_index: int = 0
    ) -> CorruptionResult:
        for t in tokens:
            if not t or any(ch.isspace() for ch in t):
                raise ValueError(f"invalid token {t!r}")
        if not tokens:
            return CorruptionResult([], [], 0, 0)
        text = " ".join(tokens)
        enc = self.encoder
        cps = enc.code_points_of(text)
        n = cps.shape[0]
        codes = enc.encode(cps)
        trans_ok = np.zeros(n, dtype=np.bool_)
        if n > 1:
            trans_ok[:-1] = (codes[:-1] >= 0) & (codes[1:] >= 0)
        u = rng.random((n, K.N_UNIFORMS))
        cat, detail = K.decide(codes, trans_ok, u, *self.tables)
        out_tokens = self._assemble(cps, cat, detail).split(" ")
        edits = self._log(text, cps, cat, detail, doc_index)
        alpha = codes >= 0
        return CorruptionResult(
            out_tokens, edits, int(alpha.sum()), int(((cat != K.NONE) & alpha).sum())
        )

    def _assemble(self, cps, cat, detail) -> str:
        al = self.encoder.code_points
        out = np.zeros((cps.shape[0], 2), dtype="<u4")
        out[:, 0] = cps
        safe = np.where(detail >= 0, detail, 0)
        new = al[safe]
        m = cat == K.SUB
        out[m, 0] = new[m]
        m = cat == K.INS_BEFORE
        out[m, 0] = new[m]
        out[m, 1] = cps[m]
        m = cat == K.INS_AFTER
        out[m, 1] = new[m]
        m = cat == K.REPL
        out[m, 1] = cps[m]
        out[cat == K.DEL, 0] = 0
        first = np.flatnonzero(cat == K.TRANS)
        out[first, 0] = cps[first + 1]
        out[first + 1, 0] = cps[first]
        flat = out.ravel()
        return flat[flat != 0].tobytes().decode("utf-32-le")

    def _log(self, text, cps, cat, detail, doc_index) -> EditLog:
        pos = np.flatnonzero((cat != K.NONE) & (cat != K.TRANS_SECOND))
        if pos.size == 0:
            return []
        is_space = cps == 32
        token_idx = np.cumsum(is_space)
        idx = np.arange(cps.shape[0])
        token_start = np.maximum.accumulate(np.where(is_space, idx + 1, 0))
        alphabet = self.model.alphabet
        edits = []
        for i in pos.tolist():
            kind = int(cat[i])
            ch = text[i]
            if kind == K.SUB:
                category, det = EditKind.SUBSTITUTION, f"{ch}>{alphabet[detail[i]]}"
            elif kind == K.INS_BEFORE:
                category, det = EditKind.INSERTION, f"before:{alphabet[detail[i]]}"
            elif kind == K.INS_AFTER:
                category, det = EditKind.INSERTION, f"after:{alphabet[detail[i]]}"
            elif kind == K.REPL:
                category, det = EditKind.REPLICATION, ch
            elif kind == K.DEL:
                category, det = EditKind.DELETION, ch
            else:
                category, det = EditKind.TRANSPOSITION, text[i : i + 2]
            edits.append(
                Edit(doc_index, int(token_idx[i]), int(i - token_start[i]), category.value, det)
            )
        return edits


def corrupt_text(
    tokens: Sequence[str],
    model: NoiseModel,
    config: GenerationConfig,
    rng: np.random.Generator | None = None,
    doc_index: int = 0,
) -> tuple[list[str], EditLog]:
    """Corrupt one token sequence. Without ``rng`` the stream is derived from
    ``(config.seed, doc_index)``."""
    gen = ErrorGenerator(model, config)
    res = gen.corrupt(tokens, doc_index) if rng is None else gen.corrupt_with(tokens, rng, doc_index)
    return res.tokens, res.edits


def replay(tokens: Sequence[str], edits: Iterable[Edit]) -> list[str]:
    """Apply a document's edit log to its clean tokens."""
    pieces = [list(t) for t in tokens]
    for e in edits:
        p = pieces[e.token]
        ch = tokens[e.token][e.char]
        cat = e.category
        if cat == EditKind.SUBSTITUTION.value:
            orig, new = e.detail.split(">")
            if orig != ch:
                raise ValueError(f"edit {e} does not match token {tokens[e.token]!r}")
            p[e.char] = new
        elif cat == EditKind.INSERTION.value:
            side, new = e.detail.split(":")
            p[e.char] = new + ch if side == "before" else ch + new
        elif cat == EditKind.REPLICATION.value:
            p[e.char] = ch + ch
        elif cat == EditKind.DELETION.value:
            p[e.char] = ""
        elif cat == EditKind.TRANSPOSITION.value:
            nxt = tokens[e.token][e.char + 1]
            p[e.char], p[e.char + 1] = nxt, ch
        else:
            raise ValueError(f"unknown category {cat!r}")
    return ["".join(p) for p in pieces]
