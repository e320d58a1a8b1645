from pathlib import Path

import pytest

from typonoise.alignment import accumulate_counts, parse_seed_corpus
from typonoise.noise_model import induce
from typonoise.suggester import SpellSuggester, build_lexicon, load_lexicon

DATA = Path(__file__).parent / "data"
PKG_DATA = Path(__file__).parents[1] / "src" / "typonoise" / "data"


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def seed_corpus_path():
    return PKG_DATA / "seed_pairs_en.tsv"


@pytest.fixture(scope="session")
def seed_pairs(seed_corpus_path):
    with open(seed_corpus_path, encoding="utf-8") as fh:
        return parse_seed_corpus(fh)


@pytest.fixture(scope="session")
def seed_counts(seed_pairs):
    return accumulate_counts(seed_pairs)


@pytest.fixture(scope="session")
def seed_model(seed_counts):
    return induce(seed_counts)


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


@pytest.fixture(scope="session")
def suggester(lexicon):
    return SpellSuggester(lexicon)


@pytest.fixture
def tiny_lexicon():
    return build_lexicon(["the\t100", "ten\t5", "tea\t3"])


@pytest.fixture(scope="session")
def review_docs():
    with open(DATA / "reviews_en.txt", encoding="utf-8") as fh:
        return [line.split() for line in fh]


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
