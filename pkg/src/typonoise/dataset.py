"""Token-aligned labeled output for detection and correction."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import AlignmentViolation, DatasetFormatError

SCHEMA = "typonoise-labeled-dataset"
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class LabeledToken:
    surface: str
    original: str
    label: int


@dataclass(frozen=True)
class LabeledDocument:
    tokens: tuple[LabeledToken, ...]

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def originals(self) -> list[str]:
        return [t.original for t in self.tokens]

    @property
    def labels(self) -> list[int]:
        return [t.label for t in self.tokens]

    def __len__(self):
        return len(self.tokens)


def emit(original: Sequence[str], final: Sequence[str], placeholder: str = "<UNK>") -> LabeledDocument:
    """Label each final token against its original; vanished tokens get ``placeholder``."""
    if len(original) != len(final):
        raise AlignmentViolation(
            f"token count changed: {len(original)} original vs {len(final)} final"
        )
    tokens = []
    for orig, surf in zip(original, final):
        surf = surf or placeholder
        tokens.append(LabeledToken(surf, orig, int(surf != orig)))
    return LabeledDocument(tuple(tokens))


def header_line() -> str:
    return json.dumps(
        {"schema": SCHEMA, "version": SCHEMA_VERSION, "fields": ["surfaces", "originals", "labels"]},
        separators=(",", ":"),
    )


def record_line(doc: LabeledDocument) -> str:
    return json.dumps(
        {"surfaces": doc.surfaces, "originals": doc.originals, "labels": doc.labels},
        ensure_ascii=False,
        separators=(",", ":"),
    )


def serialize(docs: Iterable[LabeledDocument]) -> Iterator[str]:
    """Header line, then one JSON record per document (no trailing newlines)."""
    yield header_line()
    for doc in docs:
        yield record_line(doc)


def _parse_record(line: str, index: int) -> LabeledDocument:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid JSON: {exc}", index) from exc
    if not isinstance(rec, dict):
        raise DatasetFormatError("record is not an object", index)
    try:
        surfaces, originals, labels = rec["surfaces"], rec["originals"], rec["labels"]
    except KeyError as exc:
        raise DatasetFormatError(f"missing field {exc}", index) from None
    if not (isinstance(surfaces, list) and isinstance(originals, list) and isinstance(labels, list)):
        raise DatasetFormatError("fields must be arrays", index)
    if not len(surfaces) == len(originals) == len(labels):
        raise DatasetFormatError("parallel arrays differ in length", index)
    tokens = []
    for s, o, lab in zip(surfaces, originals, labels):
        if not isinstance(s, str) or not isinstance(o, str) or not s:
            raise DatasetFormatError("tokens must be non-empty strings", index)
        if lab not in (0, 1) or isinstance(lab, bool) or lab != int(s != o):
            raise DatasetFormatError(f"label {lab!r} inconsistent with {s!r}/{o!r}", index)
        tokens.append(LabeledToken(s, o, lab))
    return LabeledDocument(tuple(tokens))


def deserialize(lines: Iterable[str]) -> Iterator[LabeledDocument]:
    it = iter(lines)
    try:
        head = json.loads(next(it))
    except StopIteration:
        raise DatasetFormatError("missing header line") from None
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"invalid header: {exc}") from exc
    if not isinstance(head, dict) or head.get("schema") != SCHEMA:
        raise DatasetFormatError("not a labeled dataset stream")
    if head.get("version") != SCHEMA_VERSION:
        raise DatasetFormatError(f"unsupported dataset version {head.get('version')!r}")
    for i, line in enumerate(it):
        line = line.rstrip("\n")
        if line:
            yield _parse_record(line, i)
