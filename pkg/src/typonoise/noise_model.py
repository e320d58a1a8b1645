"""Probability tables induced from seed error counts."""

from __future__ import annotations

import io
import json
import logging
import os
import re
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable

import numpy as np
from scipy.optimize import brentq

from ._text import Encoder
from .alignment import CATEGORIES, EditKind, ErrorCounts
from .alphabet import DEFAULT_ALPHABET
from .errors import (
    EmptyDistributionError,
    ModelFormatError,
    ModelVersionError,
    RateUnreachableError,
)

log = logging.getLogger(__name__)

FORMAT_NAME = "typonoise-noise-model"
FORMAT_VERSION = 1


class ClampWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Coefficients:
    """Per-category multipliers applied to the event probabilities."""

    substitution: float = 1.0
    insertion: float = 1.0
    replication: float = 1.0
    deletion: float = 1.0
    transposition: float = 1.0

    def __post_init__(self):
        for k, v in self.as_dict().items():
            if not v >= 0:
                raise ValueError(f"coefficient {k} must be >= 0, got {v}")

    @classmethod
    def uniform(cls, w: float) -> "Coefficients":
        return cls(w, w, w, w, w)

    @classmethod
    def from_mapping(cls, values) -> "Coefficients":
        return cls(**{EditKind(k).value: float(v) for k, v in dict(values).items()})

    def as_dict(self) -> dict[str, float]:
        return {k.value: getattr(self, k.value) for k in CATEGORIES}

    def scaled(self, w: float) -> "Coefficients":
        return Coefficients(**{k: v * w for k, v in self.as_dict().items()})


@dataclass(frozen=True)
class CharDistribution:
    """Character and within-token bigram counts of a corpus."""

    alphabet: str
    freq: np.ndarray
    bigram_freq: np.ndarray

    @property
    def total(self) -> int:
        return int(self.freq.sum())

    def relative(self) -> np.ndarray:
        total = self.total
        if total == 0:
            raise EmptyDistributionError("character distribution is empty")
        return self.freq / total

    def __add__(self, other: "CharDistribution") -> "CharDistribution":
        return CharDistribution(
            self.alphabet, self.freq + other.freq, self.bigram_freq + other.bigram_freq
        )

    @classmethod
    def empty(cls, alphabet: str = DEFAULT_ALPHABET) -> "CharDistribution":
        a = len(alphabet)
        return cls(alphabet, np.zeros(a, np.int64), np.zeros((a, a), np.int64))

    @classmethod
    def from_counts(cls, counts: ErrorCounts) -> "CharDistribution":
        return cls(counts.alphabet, counts.char_freq.copy(), counts.bigram_freq.copy())

    @classmethod
    def from_texts(cls, texts: Iterable[str], alphabet: str = DEFAULT_ALPHABET) -> "CharDistribution":
        enc = Encoder(alphabet)
        a = len(alphabet)
        freq = np.zeros(a, np.int64)
        bigram = np.zeros(a * a, np.int64)
        for text in texts:
            codes = enc.encode(enc.code_points_of(text))
            freq += np.bincount(codes[codes >= 0], minlength=a)
            left, right = codes[:-1], codes[1:]
            both = (left >= 0) & (right >= 0)
            bigram += np.bincount(left[both] * a + right[both], minlength=a * a)
        return cls(alphabet, freq, bigram.reshape(a, a))


def _ratio(num: np.ndarray, basis: np.ndarray, scale: Fraction) -> np.ndarray:
    """Exact num / (basis * scale), zero where basis is zero."""
    out = np.empty(num.shape, dtype=object)
    for idx in np.ndindex(num.shape):
        b = int(basis[idx])
        out[idx] = Fraction(int(num[idx])) / (b * scale) if b else Fraction(0)
    return out


def _conditional(table: np.ndarray) -> np.ndarray:
    out = np.empty(table.shape, dtype=object)
    rows = table.sum(axis=1)
    for (c, k), n in np.ndenumerate(table):
        out[c, k] = Fraction(int(n), int(rows[c])) if rows[c] else Fraction(0)
    return out


def _clamped_float(exact: np.ndarray, name: str) -> np.ndarray:
    values = exact.astype(float)
    over = values > 1.0
    if over.any():
        warnings.warn(
            f"{int(over.sum())} {name} probabilities exceed 1 and were clamped", ClampWarning, stacklevel=4
        )
        values = np.minimum(values, 1.0)
    return values


@dataclass(eq=False)
class NoiseModel:
    """Error-event and candidate probabilities over an alphabet.

    Stored as integer error counts over rational denominators
    ``basis * scale``; for a seed model the basis is the seed character
    (bigram) count and the scale is 1. All float tables are derived.
    """

    alphabet: str
    sub_pair: np.ndarray
    ins_pair_before: np.ndarray
    ins_pair_after: np.ndarray
    repl: np.ndarray
    deletion: np.ndarray
    trans: np.ndarray
    char_basis: np.ndarray
    bigram_basis: np.ndarray
    seed_char_total: int
    seed_bigram_total: int
    char_scale: Fraction = Fraction(1)
    bigram_scale: Fraction = Fraction(1)
    provenance: str = "seed"
    _exact: dict = field(init=False, repr=False)

    TABLES = ("sub_pair", "ins_pair_before", "ins_pair_after", "repl", "deletion", "trans")

    def __post_init__(self):
        for name in self.TABLES + ("char_basis", "bigram_basis"):
            arr = np.asarray(getattr(self, name), dtype=np.int64)
            if (arr < 0).any():
                raise ValueError(f"{name} has negative counts")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        self.char_scale = Fraction(self.char_scale)
        self.bigram_scale = Fraction(self.bigram_scale)
        self._exact = self._compute_exact()
        floats = {}
        for name, table in self._exact.items():
            floats[name] = _clamped_float(table, name)
        self.p_sub = floats["p_sub"]
        self.p_sub_pair = floats["p_sub_pair"]
        self.p_ins_before = floats["p_ins_before"]
        self.p_ins_after = floats["p_ins_after"]
        self.p_ins_pair_before = floats["p_ins_pair_before"]
        self.p_ins_pair_after = floats["p_ins_pair_after"]
        self.p_repl = floats["p_repl"]
        self.p_del = floats["p_del"]
        self.p_trans = floats["p_trans"]

    def _compute_exact(self) -> dict[str, np.ndarray]:
        cb, cs = self.char_basis, self.char_scale
        return {
            "p_sub": _ratio(self.sub_pair.sum(axis=1), cb, cs),
            "p_sub_pair": _conditional(self.sub_pair),
            "p_ins_before": _ratio(self.ins_pair_before.sum(axis=1), cb, cs),
            "p_ins_after": _ratio(self.ins_pair_after.sum(axis=1), cb, cs),
            "p_ins_pair_before": _conditional(self.ins_pair_before),
            "p_ins_pair_after": _conditional(self.ins_pair_after),
            "p_repl": _ratio(self.repl, cb, cs),
            "p_del": _ratio(self.deletion, cb, cs),
            "p_trans": _ratio(self.trans, self.bigram_basis, self.bigram_scale),
        }

    def exact(self, name: str) -> np.ndarray:
        """Unclamped rational table, e.g. ``exact("p_sub")``."""
        return self._exact[name]

    @property
    def p_ins(self) -> np.ndarray:
        return self.p_ins_before + self.p_ins_after

    def __eq__(self, other):
        if not isinstance(other, NoiseModel):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.provenance == other.provenance
            and self.seed_char_total == other.seed_char_total
            and self.seed_bigram_total == other.seed_bigram_total
            and self.char_scale == other.char_scale
            and self.bigram_scale == other.bigram_scale
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in self.TABLES + ("char_basis", "bigram_basis")
            )
        )

    def event_mass(self) -> np.ndarray:
        """Per-character (A x 4) event probabilities: sub, ins, repl, del."""
        return np.stack([self.p_sub, self.p_ins, self.p_repl, self.p_del], axis=1)


def induce(counts: ErrorCounts) -> NoiseModel:
    """Normalize raw counts into a seed noise model."""
    if counts.char_freq.sum() == 0:
        warnings.warn("inducing from all-zero counts; every probability is 0", stacklevel=2)
    return NoiseModel(
        alphabet=counts.alphabet,
        sub_pair=counts.sub_pair,
        ins_pair_before=counts.ins_pair_before,
        ins_pair_after=counts.ins_pair_after,
        repl=counts.repl,
        deletion=counts.deletion,
        trans=counts.trans,
        char_basis=counts.char_freq,
        bigram_basis=counts.bigram_freq,
        seed_char_total=int(counts.char_freq.sum()),
        seed_bigram_total=int(counts.bigram_freq.sum()),
    )


def rebase_frequencies(model: NoiseModel, target: CharDistribution) -> NoiseModel:
    """Swap the event denominators for a target corpus's character counts.

    Target counts are scaled to the seed totals, so the expected number of
    each error per character typed matches the seed; conditional candidate
    tables are untouched.
    """
    if target.alphabet != model.alphabet:
        raise ValueError("target distribution uses a different alphabet")
    char_total = int(target.freq.sum())
    if char_total == 0:
        raise EmptyDistributionError("target character distribution is empty")
    bigram_total = int(target.bigram_freq.sum())
    return NoiseModel(
        alphabet=model.alphabet,
        sub_pair=model.sub_pair,
        ins_pair_before=model.ins_pair_before,
        ins_pair_after=model.ins_pair_after,
        repl=model.repl,
        deletion=model.deletion,
        trans=model.trans,
        char_basis=target.freq,
        bigram_basis=target.bigram_freq,
        seed_char_total=model.seed_char_total,
        seed_bigram_total=model.seed_bigram_total,
        char_scale=Fraction(model.seed_char_total, char_total),
        bigram_scale=Fraction(model.seed_bigram_total, bigram_total) if bigram_total else Fraction(1),
        provenance="rebased",
    )


# ---------------------------------------------------------------------------
# expected corruption rate


def _trans_first_factor(survive: np.ndarray) -> np.ndarray:
    """E over a uniform category order of the product of survival
    probabilities of the categories tried before transposition.

    ``survive`` is (..., m) for the m non-transposition categories.
    """
    m = survive.shape[-1]
    # elementary symmetric polynomials e_0..e_m of the survival probabilities
    e = np.zeros(survive.shape[:-1] + (m + 1,))
    e[..., 0] = 1.0
    for j in range(m):
        x = survive[..., j : j + 1]
        e[..., 1:] = e[..., 1:] + x * e[..., :-1]
    weights = np.array([1.0 / comb(m, r) for r in range(m + 1)]) / (m + 1)
    return (e * weights).sum(axis=-1)


def event_probabilities(model: NoiseModel, coefficients: Coefficients) -> dict[str, np.ndarray]:
    """Scaled, clamped per-position firing probabilities used by the generator."""
    w = coefficients
    return {
        "sub": np.minimum(1.0, w.substitution * model.p_sub),
        "ins_before": np.minimum(1.0, w.insertion * model.p_ins_before),
        "ins_after": np.minimum(1.0, w.insertion * model.p_ins_after),
        "repl": np.minimum(1.0, w.replication * model.p_repl),
        "del": np.minimum(1.0, w.deletion * model.p_del),
        "trans": np.minimum(1.0, w.transposition * model.p_trans),
    }


def expected_error_rate(
    model: NoiseModel, target: CharDistribution, coefficients: Coefficients
) -> float:
    """Expected fraction of corrupted alphabet characters in the target corpus.

    A transposition corrupts both characters of its pair. At most one
    category fires per position (first hit in a uniformly random order), and
    a transposed pair's second character is not evaluated again; that skip
    is handled with a mean-field estimate from the bigram counts.
    """
    n = target.total
    if n == 0:
        raise EmptyDistributionError("target character distribution is empty")
    q = event_probabilities(model, coefficients)
    q_ins = 1.0 - (1.0 - q["ins_before"]) * (1.0 - q["ins_after"])
    survive = np.stack([1.0 - q["sub"], 1.0 - q_ins, 1.0 - q["repl"], 1.0 - q["del"]], axis=1)
    s_other = survive.prod(axis=1)
    first = _trans_first_factor(survive)
    qt = q["trans"]
    tau = qt * first[:, None]  # P(transposition wins | evaluated, next char)
    hit = 1.0 - s_other[:, None] * (1.0 - qt)

    freq = target.freq.astype(float)
    bigram = target.bigram_freq.astype(float)
    end = freq - bigram.sum(axis=1)

    per_char = (bigram * (hit + tau)).sum(axis=1) + end * (1.0 - s_other)
    skip = np.zeros_like(freq)
    with np.errstate(invalid="ignore", divide="ignore"):
        for _ in range(4):
            flow = ((1.0 - skip)[:, None] * bigram * tau).sum(axis=0)
            skip = np.where(freq > 0, flow / freq, 0.0)
    return float(((1.0 - skip) * per_char).sum() / n)


def expected_event_rate(
    model: NoiseModel, target: CharDistribution, coefficients: Coefficients
) -> float:
    """First-order rate: summed scaled event probabilities per character, no
    exclusivity and no clamping. Linear in the coefficients."""
    n = target.total
    if n == 0:
        raise EmptyDistributionError("target character distribution is empty")
    w = coefficients
    freq = target.freq.astype(float)
    per = (
        w.substitution * model.p_sub
        + w.insertion * model.p_ins
        + w.replication * model.p_repl
        + w.deletion * model.p_del
    )
    total = (freq * per).sum() + w.transposition * (target.bigram_freq * model.p_trans).sum()
    return float(total / n)


def _saturation_scale(model: NoiseModel, target: CharDistribution, mix: Coefficients) -> float:
    """Largest uniform multiplier of ``mix`` that clamps no probability in use."""
    present = target.freq > 0
    present_bigram = target.bigram_freq > 0
    peaks = [
        mix.substitution * model.p_sub[present].max(initial=0.0),
        mix.insertion * model.p_ins_before[present].max(initial=0.0),
        mix.insertion * model.p_ins_after[present].max(initial=0.0),
        mix.replication * model.p_repl[present].max(initial=0.0),
        mix.deletion * model.p_del[present].max(initial=0.0),
        mix.transposition * model.p_trans[present_bigram].max(initial=0.0),
    ]
    peak = max(peaks)
    return np.inf if peak == 0 else 1.0 / peak


def calibrate(
    model: NoiseModel,
    target: CharDistribution,
    target_char_error_rate: float,
    mix: Coefficients | None = None,
    method: str = "exact",
    allow_clamping: bool = False,
) -> Coefficients:
    """Find coefficients giving the requested expected corruption rate.

    The result is ``mix`` (uniform by default) times one scalar, which keeps
    the seed's relative category proportions. ``method="linear"`` solves the
    first-order rate instead and is exactly proportional to the request.
    With ``allow_clamping=False``, any rate that would push a scaled
    probability past 1 is refused.
    """
    r = float(target_char_error_rate)
    if not 0.0 <= r < 1.0:
        raise ValueError(f"target rate must be in [0, 1), got {r}")
    mix = mix or Coefficients()
    if r == 0.0:
        return mix.scaled(0.0)

    if method == "linear":
        base = expected_event_rate(model, target, mix)
        if base == 0:
            raise RateUnreachableError(r, 0.0)
        coeffs = mix.scaled(r / base)
        w_sat = _saturation_scale(model, target, mix)
        if r / base > w_sat:
            max_rate = expected_event_rate(model, target, mix.scaled(w_sat))
            if not allow_clamping:
                raise RateUnreachableError(r, max_rate)
            warnings.warn("calibrated coefficients clamp some probabilities", ClampWarning, stacklevel=2)
        return coeffs
    if method != "exact":
        raise ValueError(f"unknown calibration method {method!r}")

    def rate(w: float) -> float:
        return expected_error_rate(model, target, mix.scaled(w))

    w_sat = _saturation_scale(model, target, mix)
    if not np.isfinite(w_sat):
        raise RateUnreachableError(r, 0.0)
    hi = w_sat
    if rate(hi) < r:
        if not allow_clamping:
            raise RateUnreachableError(r, rate(hi))
        # beyond saturation the rate keeps rising until every term is clamped
        w_full = 1.0 / _min_positive(model, target, mix)
        max_rate = rate(w_full)
        if max_rate < r:
            raise RateUnreachableError(r, max_rate)
        hi = w_full
        warnings.warn("calibrated coefficients clamp some probabilities", ClampWarning, stacklevel=2)
    w = brentq(lambda x: rate(x) - r, 0.0, hi, xtol=1e-14, rtol=1e-14, maxiter=500)
    return mix.scaled(w)


def _min_positive(model: NoiseModel, target: CharDistribution, mix: Coefficients) -> float:
    present = target.freq > 0
    vals = []
    for coef, table, mask in (
        (mix.substitution, model.p_sub, present),
        (mix.insertion, model.p_ins_before, present),
        (mix.insertion, model.p_ins_after, present),
        (mix.replication, model.p_repl, present),
        (mix.deletion, model.p_del, present),
        (mix.transposition, model.p_trans, target.bigram_freq > 0),
    ):
        v = coef * table[mask]
        v = v[v > 0]
        if v.size:
            vals.append(v.min())
    return min(vals)


# ---------------------------------------------------------------------------
# serialization

_COUNT_KEYS = {
    "substitution": "sub_pair",
    "insertion_before": "ins_pair_before",
    "insertion_after": "ins_pair_after",
    "replication": "repl",
    "deletion": "deletion",
    "transposition": "trans",
}
_PROB_KEYS = (
    "p_sub",
    "p_sub_pair",
    "p_ins_before",
    "p_ins_after",
    "p_ins_pair_before",
    "p_ins_pair_after",
    "p_repl",
    "p_del",
    "p_trans",
)


def _compact(text: str) -> str:
    # one row of numbers per line keeps the file diffable
    return re.sub(r"\[\s+([^\[\]{}]*?)\s+\]", lambda m: "[" + " ".join(m.group(1).split()) + "]", text)


def dumps_model(model: NoiseModel) -> str:
    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "alphabet": model.alphabet,
        "provenance": model.provenance,
        "seed_char_total": model.seed_char_total,
        "seed_bigram_total": model.seed_bigram_total,
        "char_basis": model.char_basis.tolist(),
        "char_scale": str(model.char_scale),
        "bigram_basis": model.bigram_basis.tolist(),
        "bigram_scale": str(model.bigram_scale),
        "counts": {k: getattr(model, attr).tolist() for k, attr in _COUNT_KEYS.items()},
        # informational; recomputed from the counts on load
        "probabilities": {k: getattr(model, k).tolist() for k in _PROB_KEYS},
    }
    return _compact(json.dumps(doc, indent=1, sort_keys=True)) + "\n"


def loads_model(text: str) -> NoiseModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError("not a noise model file")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported model version {doc.get('version')!r}")
    try:
        alphabet = doc["alphabet"]
        a = len(alphabet)
        kw = {attr: np.array(doc["counts"][k], dtype=np.int64) for k, attr in _COUNT_KEYS.items()}
        model = NoiseModel(
            alphabet=alphabet,
            char_basis=np.array(doc["char_basis"], dtype=np.int64),
            bigram_basis=np.array(doc["bigram_basis"], dtype=np.int64),
            seed_char_total=int(doc["seed_char_total"]),
            seed_bigram_total=int(doc["seed_bigram_total"]),
            char_scale=Fraction(doc["char_scale"]),
            bigram_scale=Fraction(doc["bigram_scale"]),
            provenance=doc["provenance"],
            **kw,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid model file: {exc}") from exc
    shapes = [(model.char_basis, (a,)), (model.bigram_basis, (a, a))]
    shapes += [(getattr(model, attr), (a,) if attr in ("repl", "deletion") else (a, a)) for attr in _COUNT_KEYS.values()]
    if any(arr.shape != shape for arr, shape in shapes):
        raise ModelFormatError("table shapes do not match the alphabet")
    return model


def save_model(model: NoiseModel, fh: io.TextIOBase | str | os.PathLike) -> None:
    if isinstance(fh, (str, os.PathLike)):
        with open(fh, "w", encoding="utf-8") as out:
            out.write(dumps_model(model))
    else:
        fh.write(dumps_model(model))


def load_model(fh: io.TextIOBase | str | os.PathLike) -> NoiseModel:
    if isinstance(fh, (str, os.PathLike)):
        with open(fh, encoding="utf-8") as src:
            return loads_model(src.read())
    return loads_model(fh.read())
