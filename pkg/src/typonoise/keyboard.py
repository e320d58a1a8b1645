"""Virtual keyboard geometry used to attribute inserted characters."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping

import numpy as np

from .errors import CharacterNotInLayout, NoNeighborError


class Side(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


@dataclass(frozen=True)
class KeyboardLayout:
    """Staggered key grid. Columns already include the row stagger."""

    key_position: Mapping[str, tuple[int, float]]
    row_offsets: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        seen = {}
        for ch, pos in self.key_position.items():
            if len(ch) != 1:
                raise ValueError(f"layout keys must be single characters, got {ch!r}")
            if pos in seen:
                raise ValueError(f"{ch!r} and {seen[pos]!r} share position {pos}")
            seen[pos] = ch
        if not self.row_offsets:
            offsets: dict[int, float] = {}
            for row, col in self.key_position.values():
                offsets[row] = min(col, offsets.get(row, math.inf))
            object.__setattr__(self, "row_offsets", offsets)

    @property
    def characters(self) -> str:
        return "".join(sorted(self.key_position))

    def __contains__(self, ch: str) -> bool:
        return ch in self.key_position

    def position(self, ch: str) -> tuple[int, float]:
        try:
            return self.key_position[ch]
        except KeyError:
            raise CharacterNotInLayout(ch) from None

    def key_distance(self, a: str, b: str) -> float:
        """Euclidean distance between two keys in key-width units."""
        ra, ca = self.position(a)
        rb, cb = self.position(b)
        return math.hypot(ra - rb, ca - cb)

    def distance_matrix(self, alphabet: str) -> np.ndarray:
        coords = np.array([self.position(ch) for ch in alphabet], dtype=float)
        diff = coords[:, None, :] - coords[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))

    def attribute_insertion(
        self,
        left: str | None,
        inserted: str,
        right: str | None,
        rng: np.random.Generator | None = None,
    ) -> Side:
        """Pick the neighbor an inserted character most plausibly came from.

        The strictly nearer neighbor wins; a tie is settled by one fair draw
        from ``rng``. A missing neighbor forces the other side.
        """
        if left is None and right is None:
            raise NoNeighborError(f"inserted {inserted!r} has no neighbor")
        if left is None:
            return Side.RIGHT
        if right is None:
            return Side.LEFT
        dl = self.key_distance(inserted, left)
        dr = self.key_distance(inserted, right)
        if math.isclose(dl, dr, rel_tol=0.0, abs_tol=1e-12):
            if rng is None:
                raise ValueError("equidistant neighbors need an rng to break the tie")
            return Side.LEFT if rng.random() < 0.5 else Side.RIGHT
        return Side.LEFT if dl < dr else Side.RIGHT


def parse_layout(lines: Iterable[str]) -> KeyboardLayout:
    positions: dict[str, tuple[int, float]] = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"layout line {lineno}: expected 'char row column', got {raw!r}")
        ch, row, col = parts
        if ch in positions:
            raise ValueError(f"layout line {lineno}: duplicate character {ch!r}")
        positions[ch] = (int(row), float(col))
    return KeyboardLayout(positions)


def load_layout(path=None) -> KeyboardLayout:
    if path is None:
        text = resources.files("typonoise.data").joinpath("qwerty.tsv").read_text("utf-8")
        return parse_layout(text.splitlines())
    with open(path, encoding="utf-8") as fh:
        return parse_layout(fh)


_default: KeyboardLayout | None = None


def default_layout() -> KeyboardLayout:
    global _default
    if _default is None:
        _default = load_layout()
    return _default


def key_distance(a: str, b: str) -> float:
    return default_layout().key_distance(a, b)


def attribute_insertion(left, inserted, right, rng=None) -> Side:
    return default_layout().attribute_insertion(left, inserted, right, rng)
