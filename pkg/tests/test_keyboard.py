import math

import numpy as np
import pytest

from typonoise.errors import CharacterNotInLayout, NoNeighborError
from typonoise.keyboard import Side, attribute_insertion, default_layout, key_distance, parse_layout


def test_identity_distance():
    assert key_distance("a", "a") == 0.0


def test_same_row_neighbours():
    assert key_distance("q", "w") == 1.0


def test_row_offset():
    # home row is shifted half a key right of the top row
    assert key_distance("q", "a") == pytest.approx(math.sqrt(0.25 + 1.0), abs=1e-12)
    assert key_distance("w", "p") == 8.0


def test_symmetric_matrix():
    m = default_layout().distance_matrix("abcdefghijklmnopqrstuvwxyz")
    assert m.shape == (26, 26)
    assert np.allclose(m, m.T)
    assert np.all(np.diag(m) == 0)


def test_unknown_character():
    with pytest.raises(CharacterNotInLayout):
        key_distance("a", "!")


def test_attach_nearest():
    assert attribute_insertion("q", "w", "p") is Side.LEFT
    assert attribute_insertion("p", "w", "q") is Side.RIGHT


def test_single_neighbour():
    assert attribute_insertion(None, "x", "z") is Side.RIGHT
    assert attribute_insertion("z", "x", None) is Side.LEFT


def test_no_neighbours():
    with pytest.raises(NoNeighborError):
        attribute_insertion(None, "x", None)


def test_tie_needs_rng():
    with pytest.raises(ValueError):
        attribute_insertion("a", "s", "d")


def test_tie_is_fair():
    rng = np.random.default_rng(12345)
    left = sum(attribute_insertion("a", "s", "d", rng) is Side.LEFT for _ in range(10_000))
    assert abs(left / 10_000 - 0.5) <= 0.05


def test_parse_layout_rejects_duplicate_positions():
    with pytest.raises(ValueError):
        parse_layout(["a\t0\t0", "b\t0\t0"])


def test_parse_layout_comments():
    layout = parse_layout(["# row col", "a\t0\t0", "", "b\t0\t3"])
    assert layout.key_distance("a", "b") == 3.0


def test_triangle_inequality():
    m = default_layout().distance_matrix("abcdefghijklmnopqrstuvwxyz")
    # d(a, c) <= d(a, b) + d(b, c) for every triple
    assert np.all(m[:, None, :] <= m[:, :, None] + m[None, :, :] + 1e-12)


@pytest.mark.parametrize("left, right", [(None, "k"), ("k", None), ("a", "l"), ("f", "g")])
def test_never_attaches_to_missing_side(left, right):
    rng = np.random.default_rng(1)
    for ch in "abcdefghijklmnopqrstuvwxyz":
        side = attribute_insertion(left, ch, right, rng)
        assert (side is Side.LEFT and left is not None) or (side is Side.RIGHT and right is not None)
