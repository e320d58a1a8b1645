import random

import pytest

from typonoise.errors import EmptySuggestionError
from typonoise.suggester import (
    ConfusionMode,
    SpellSuggester,
    Suggestion,
    VocabularyScan,
    brute_force_suggest,
    build_lexicon,
    enforce_confusion,
    osa_distance,
    resolve_split,
    suggest,
)


def test_build_lexicon():
    lex = build_lexicon(["the\t100", "cat\t7"])
    assert lex.vocabulary == {"the", "cat"}
    assert lex.frequency["the"] == 100


def test_build_lexicon_sums_duplicates():
    assert build_lexicon(["a\t1", "a\t2"]).frequency["a"] == 3


def test_build_lexicon_skips_non_alphabet():
    assert len(build_lexicon(["Thé\t5"])) == 0


def test_bundled_lexicon(lexicon):
    assert len(lexicon) > 50_000
    assert "the" in lexicon and "teh" not in lexicon


def test_ranking(tiny_lexicon):
    got = suggest("teh", tiny_lexicon)
    assert got == [Suggestion("the", 1, 100), Suggestion("ten", 1, 5), Suggestion("tea", 1, 3)]


def test_identity_first(lexicon, suggester):
    assert suggester.suggest("cat")[0] == Suggestion("cat", 0, lexicon.frequency["cat"])


def test_nothing_in_radius(tiny_lexicon):
    assert suggest("zzzzzz", tiny_lexicon) == []


def test_ties_break_on_word():
    lex = build_lexicon(["bat\t5", "cat\t5"])
    assert [s.word for s in suggest("aat", lex)] == ["bat", "cat"]


def test_wider_radius_than_index(tiny_lexicon):
    sp = SpellSuggester(tiny_lexicon, max_distance=1)
    assert [s.word for s in sp.suggest("tqqx", 3)] == [s.word for s in brute_force_suggest("tqqx", tiny_lexicon, 3)]


def test_splits():
    lex = build_lexicon(["be\t10", "like\t20", "belike\t1"])
    sp = SpellSuggester(lex, splits=True)
    words = [s.word for s in sp.suggest("belikr")]
    assert "be like" not in words  # needs an exact split of the token itself
    assert "be like" in [s.word for s in sp.suggest("belike")]


@pytest.mark.parametrize("a, b, d", [("teh", "the", 1), ("", "abc", 3), ("ca", "abc", 3), ("kitten", "sitting", 3)])
def test_osa_distance(a, b, d):
    assert osa_distance(a, b) == d


def test_osa_distance_bound():
    assert osa_distance("aaaaaa", "bbbbbb", bound=2) == 3


def test_resolve_split():
    assert resolve_split("be like") == "like"
    assert resolve_split("a b") == "b"
    assert resolve_split("word") == "word"
    with pytest.raises(EmptySuggestionError):
        resolve_split("  ")


def test_enforce_skips_original(tiny_lexicon):
    sp = SpellSuggester(tiny_lexicon)
    assert enforce_confusion("teh", "the", sp) == "ten"


def test_enforce_best_mode(tiny_lexicon):
    sp = SpellSuggester(tiny_lexicon)
    assert enforce_confusion("teh", "the", sp, ConfusionMode.BEST) == "the"
    assert enforce_confusion("teh", "the", sp, "off") == "teh"


def test_enforce_without_suggestions(tiny_lexicon):
    assert enforce_confusion("zzzzzz", "the", SpellSuggester(tiny_lexicon)) == "zzzzzz"


def test_enforce_keeps_real_words(tiny_lexicon):
    assert enforce_confusion("ten", "the", SpellSuggester(tiny_lexicon)) == "ten"


def test_enforce_lone_suggestion():
    sp = SpellSuggester(build_lexicon(["the\t100"]))
    assert enforce_confusion("teh", "the", sp) == "the"


def test_real_word_error(suggester, lexicon):
    out = enforce_confusion("herv", "her", suggester)
    assert out in lexicon and out != "her"


def _perturb(rng, word, alphabet="abcdefghijklmnopqrstuvwxyz"):
    w = list(word)
    for _ in range(rng.randint(0, 3)):
        op = rng.randrange(4)
        i = rng.randrange(len(w) + 1)
        if op == 0:
            w.insert(i, rng.choice(alphabet))
        elif op == 1 and i < len(w):
            del w[i]
        elif op == 2 and i < len(w):
            w[i] = rng.choice(alphabet)
        elif i + 1 < len(w):
            w[i], w[i + 1] = w[i + 1], w[i]
    return "".join(w) or "a"


def test_index_equals_full_scan(lexicon, suggester):
    rng = random.Random(2024)
    words = sorted(lexicon.frequency)
    scan = VocabularyScan(lexicon)
    queries = [_perturb(rng, rng.choice(words)) for _ in range(1000)]
    for q in queries:
        assert suggester.suggest(q) == scan.suggest(q, 2), q


def test_scan_matches_python_distance(lexicon):
    scan = VocabularyScan(lexicon)
    words = scan.words[::997]
    dist = scan.distances("hello")
    for i in range(0, len(scan.words), 997):
        assert dist[i] == osa_distance("hello", scan.words[i])
    assert len(words) > 50


def test_replacements_come_from_lexicon(suggester, lexicon):
    rng = random.Random(9)
    words = sorted(lexicon.frequency)
    for _ in range(500):
        original = rng.choice(words)
        typo = _perturb(rng, original)
        out = enforce_confusion(typo, original, suggester)
        assert out in lexicon or out == typo


def test_rank_is_a_total_order(suggester):
    for token in ("teh", "recieve", "adress", "wrod", "a"):
        keys = [s.rank_key for s in suggester.suggest(token)]
        assert keys == sorted(keys)
        assert len(set(keys)) == len(keys)
        assert suggester.suggest(token) == suggester.suggest(token)


def test_single_edit_is_recovered(lexicon, suggester):
    rng = random.Random(31)
    words = [w for w in sorted(lexicon.frequency) if len(w) > 1]
    letters = "abcdefghijklmnopqrstuvwxyz"
    for _ in range(1000):
        w = rng.choice(words)
        i = rng.randrange(len(w))
        op = rng.randrange(4)
        if op == 0:
            typo = w[:i] + rng.choice(letters) + w[i:]
        elif op == 1:
            typo = w[:i] + w[i + 1 :]
        elif op == 2:
            typo = w[:i] + rng.choice(letters) + w[i + 1 :]
        else:
            i = min(i, len(w) - 2)
            typo = w[:i] + w[i + 1] + w[i] + w[i + 2 :]
        if not typo:
            continue
        assert w in {s.word for s in suggester.suggest(typo)}, (w, typo)
