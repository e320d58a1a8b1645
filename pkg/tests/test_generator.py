import numpy as np
import pytest

from typonoise.alignment import TypoPair, accumulate_counts
from typonoise.generator import (
    Edit,
    ErrorGenerator,
    GenerationConfig,
    clean_corpus,
    corrupt_text,
    replay,
)
from typonoise.noise_model import CharDistribution, Coefficients, induce, rebase_frequencies
from typonoise.suggester import build_lexicon

LEVEL_W = 0.4


@pytest.fixture(scope="module")
def review_model(seed_model, review_docs):
    dist = CharDistribution.from_texts(" ".join(d) for d in review_docs[:2000])
    return rebase_frequencies(seed_model, dist)


def _gen(model, w=LEVEL_W, seed=0):
    return ErrorGenerator(model, GenerationConfig(Coefficients.uniform(w), seed=seed))


def test_clean_keeps_known():
    lex = build_lexicon(["the\t1", "cat\t1", "sat\t1"])
    kept, report = clean_corpus([["the", "cat", "sat"]], lex)
    assert kept == [["the", "cat", "sat"]] and report.rejected == 0


def test_clean_rejects_unknown():
    lex = build_lexicon(["the\t1", "sat\t1"])
    kept, report = clean_corpus([["the", "qzx", "sat"]], lex)
    assert kept == [] and report.offenders == [(0, "qzx")]


def test_clean_empty():
    kept, report = clean_corpus([], build_lexicon([]))
    assert kept == [] and report.documents == 0 and report.offenders == []


def test_clean_skips_non_alphabetic_tokens():
    lex = build_lexicon(["the\t1"])
    kept, _ = clean_corpus([["the", "'80s", "12-part", "!"]], lex)
    assert len(kept) == 1


def test_zero_coefficients_is_identity(review_model, review_docs):
    gen = ErrorGenerator(review_model, GenerationConfig(Coefficients.uniform(0.0)))
    for i, doc in enumerate(review_docs[:200]):
        res = gen.corrupt(doc, i)
        assert res.tokens == doc and res.edits == [] and res.corrupted_chars == 0


def test_deterministic(review_model, review_docs):
    a = _gen(review_model, seed=5)
    b = _gen(review_model, seed=5)
    for i, doc in enumerate(review_docs[:100]):
        ra, rb = a.corrupt(doc, i), b.corrupt(doc, i)
        assert ra.tokens == rb.tokens and ra.edits == rb.edits


def test_seed_changes_output(review_model, review_docs):
    doc = [t for d in review_docs[:20] for t in d]
    assert _gen(review_model, seed=1).corrupt(doc).tokens != _gen(review_model, seed=2).corrupt(doc).tokens


def test_token_count_and_replay(review_model, review_docs):
    gen = _gen(review_model)
    for i, doc in enumerate(review_docs[:300]):
        res = gen.corrupt(doc, i)
        assert len(res.tokens) == len(doc)
        assert replay(doc, res.edits) == res.tokens
        assert all(e.doc == i for e in res.edits)


def test_one_event_per_position(review_model, review_docs):
    gen = _gen(review_model, w=1.0)
    for i, doc in enumerate(review_docs[:200]):
        edits = gen.corrupt(doc, i).edits
        spots = [(e.token, e.char) for e in edits]
        assert len(spots) == len(set(spots))
        # the second character of a transposed pair is never edited again
        trans = {(e.token, e.char + 1) for e in edits if e.category == "transposition"}
        assert not trans & set(spots)


def test_single_char_token_can_vanish():
    # one deleted 'a' out of one 'a' seen: p_del('a') = 1
    model = induce(accumulate_counts([TypoPair("b", "ab")]))
    gen = ErrorGenerator(model, GenerationConfig(Coefficients(0, 0, 0, 1, 0)))
    res = gen.corrupt(["a", "a"])
    assert res.tokens == ["", ""]
    assert [e.category for e in res.edits] == ["deletion", "deletion"]


def test_edit_line_round_trip():
    e = Edit(3, 4, 1, "substitution", "e>w")
    assert Edit.from_line(e.to_line()) == e


def test_corrupt_text_matches_generator(review_model, review_docs):
    cfg = GenerationConfig(Coefficients.uniform(LEVEL_W), seed=9)
    toks, edits = corrupt_text(review_docs[0], review_model, cfg, doc_index=4)
    res = ErrorGenerator(review_model, cfg).corrupt(review_docs[0], 4)
    assert toks == res.tokens and edits == res.edits


def test_invalid_tokens_rejected(review_model):
    with pytest.raises(ValueError):
        _gen(review_model).corrupt(["a b"])
    with pytest.raises(ValueError):
        _gen(review_model).corrupt([""])


def test_non_alphabet_characters_untouched(review_model):
    gen = _gen(review_model, w=2.0)
    res = gen.corrupt(["12-34", "'!?", "é"] * 50)
    assert res.edits == [] and res.alpha_chars == 0


def test_config_validation():
    with pytest.raises(ValueError):
        GenerationConfig(seed=-1)
    with pytest.raises(ValueError):
        GenerationConfig(placeholder="a b")


def test_observed_rate_near_expected(review_model, review_docs):
    from typonoise.noise_model import calibrate, expected_error_rate

    dist = CharDistribution.from_texts(" ".join(d) for d in review_docs[:2000])
    coeffs = calibrate(review_model, dist, 0.075)
    gen = ErrorGenerator(review_model, GenerationConfig(coeffs, seed=3))
    alpha = bad = 0
    for i, doc in enumerate(review_docs[:2000]):
        res = gen.corrupt(doc, i)
        alpha += res.alpha_chars
        bad += res.corrupted_chars
    assert expected_error_rate(review_model, dist, coeffs) == pytest.approx(0.075, abs=1e-9)
    # about 110k characters; four standard errors
    assert abs(bad / alpha - 0.075) < 4 * np.sqrt(0.075 * 0.925 / alpha) + 0.001


@pytest.fixture(scope="module")
def review_run(review_model, review_docs):
    """One medium-strength pass over 4000 review sentences."""
    gen = _gen(review_model, w=0.38, seed=11)
    return [(doc, gen.corrupt(doc, i)) for i, doc in enumerate(review_docs[:4000])]


def test_category_mix_follows_seed(review_run, seed_counts):
    from typonoise.stats import category_distribution

    observed = category_distribution([e for _, res in review_run for e in res.edits])
    seed = category_distribution(seed_counts)
    for k in seed:
        assert abs(observed[k] - seed[k]) <= 0.02, k


def test_length_drift_follows_model_mass(review_run, seed_counts):
    totals = {k.value: v for k, v in seed_counts.category_totals().items()}
    growth = totals["insertion"] + totals["replication"] - totals["deletion"]
    before = sum(len(t) for doc, _ in review_run for t in doc)
    after = sum(len(t) for _, res in review_run for t in res.tokens)
    assert np.sign(after - before) == np.sign(growth)


def test_length_grows_with_insertion_heavy_mix(review_model, review_docs):
    gen = ErrorGenerator(review_model, GenerationConfig(Coefficients(0.2, 1.0, 1.0, 0.2, 0.2), seed=1))
    docs = review_docs[:1000]
    before = sum(len(t) for d in docs for t in d)
    after = sum(len(t) for i, d in enumerate(docs) for t in gen.corrupt(d, i).tokens)
    assert after > before


@pytest.mark.parametrize("category", ["substitution", "insertion", "replication", "deletion", "transposition"])
def test_edits_monotone_in_each_coefficient(review_model, review_docs, category):
    from typonoise.noise_model import expected_error_rate

    dist = CharDistribution.from_texts(" ".join(d) for d in review_docs[:2000])
    docs = review_docs[:1500]
    expected, observed = [], []
    for w in (0.0, 0.25, 0.5, 1.0, 1.5):
        coeffs = Coefficients.from_mapping({**Coefficients.uniform(0.3).as_dict(), category: w})
        expected.append(expected_error_rate(review_model, dist, coeffs))
        gen = ErrorGenerator(review_model, GenerationConfig(coeffs, seed=4))
        observed.append(sum(len(gen.corrupt(d, i).edits) for i, d in enumerate(docs)))
    assert all(a <= b for a, b in zip(expected, expected[1:]))
    assert all(a <= b for a, b in zip(observed, observed[1:]))
