"""Realistic typographical error generation from a seed corpus of typo pairs."""

__version__ = "0.1.0"

from .alignment import (
    ClassifiedEdit,
    EditKind,
    ErrorCounts,
    TypoPair,
    accumulate_counts,
    align_pair,
    apply_script,
    parse_seed_corpus,
)
from .dataset import LabeledDocument, LabeledToken, deserialize, emit, serialize
from .generator import Edit, ErrorGenerator, GenerationConfig, clean_corpus, corrupt_text, replay
from .keyboard import KeyboardLayout, Side, attribute_insertion, default_layout, key_distance
from .noise_model import (
    CharDistribution,
    Coefficients,
    NoiseModel,
    calibrate,
    expected_error_rate,
    induce,
    load_model,
    rebase_frequencies,
    save_model,
)
from .stats import StatsReport, category_distribution, corpus_bleu, corrupted_word_rate, export_tables
from .suggester import (
    ConfusionMode,
    Lexicon,
    SpellSuggester,
    build_lexicon,
    enforce_confusion,
    load_lexicon,
    resolve_split,
    suggest,
)

__all__ = [
    "__version__",
    "ClassifiedEdit",
    "EditKind",
    "ErrorCounts",
    "TypoPair",
    "accumulate_counts",
    "align_pair",
    "apply_script",
    "parse_seed_corpus",
    "LabeledDocument",
    "LabeledToken",
    "deserialize",
    "emit",
    "serialize",
    "Edit",
    "ErrorGenerator",
    "GenerationConfig",
    "clean_corpus",
    "corrupt_text",
    "replay",
    "KeyboardLayout",
    "Side",
    "attribute_insertion",
    "default_layout",
    "key_distance",
    "CharDistribution",
    "Coefficients",
    "NoiseModel",
    "calibrate",
    "expected_error_rate",
    "induce",
    "load_model",
    "rebase_frequencies",
    "save_model",
    "StatsReport",
    "category_distribution",
    "corpus_bleu",
    "corrupted_word_rate",
    "export_tables",
    "ConfusionMode",
    "Lexicon",
    "SpellSuggester",
    "build_lexicon",
    "enforce_confusion",
    "load_lexicon",
    "resolve_split",
    "suggest",
]
