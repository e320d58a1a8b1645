"""Code-point encoding shared by the distribution and corruption paths."""

from __future__ import annotations

import numpy as np


class Encoder:
    def __init__(self, alphabet: str):
        self.alphabet = alphabet
        self.code_points = np.array([ord(ch) for ch in alphabet], dtype=np.uint32)
        top = int(self.code_points.max(initial=0)) + 1
        self._lookup = np.full(max(top, 128), -1, dtype=np.int64)
        self._lookup[self.code_points] = np.arange(len(alphabet))

    def code_points_of(self, text: str) -> np.ndarray:
        return np.frombuffer(text.encode("utf-32-le"), dtype="<u4")

    def encode(self, cps: np.ndarray) -> np.ndarray:
        """Alphabet index per code point, -1 outside the alphabet."""
        codes = np.full(cps.shape, -1, dtype=np.int64)
        inside = cps < len(self._lookup)
        codes[inside] = self._lookup[cps[inside]]
        return codes
