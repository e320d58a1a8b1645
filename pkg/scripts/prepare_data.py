"""Rebuild the bundled data files from public PyPI distributions.

    python scripts/prepare_data.py --download /tmp/typonoise-raw

Sources:
  seed pairs  nlpaug 1.1.11, nlpaug/res/word/spelling/spelling_en.txt (MIT)
  lexicon     symspellpy 6.10.0, frequency_dictionary_en_82_765.txt (MIT)
  reviews     pattern3 3.0.0 sdist, test/corpora/polarity-en-pang&lee1.csv
              (Pang & Lee movie review polarity data)
"""

import argparse
import csv
import glob
import random
import subprocess
import tarfile
import zipfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "src" / "typonoise" / "data"
TEST_DATA = ROOT / "tests" / "data"
ALPHABET = set("abcdefghijklmnopqrstuvwxyz")

REVIEW_SENTENCES = 20000
SAMPLE_PAIRS = 500


def fetch(dest: Path) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    for spec in ("nlpaug==1.1.11", "symspellpy==6.10.0"):
        subprocess.run(["pip", "download", "--no-deps", "-d", str(dest), spec], check=True)
    subprocess.run(
        ["pip", "download", "--no-deps", "--no-binary", ":all:", "-d", str(dest), "pattern3==3.0.0"],
        check=True,
    )


def member(pattern: str, dest: Path, name: str) -> bytes:
    (path,) = glob.glob(str(dest / pattern))
    if path.endswith(".whl"):
        return zipfile.ZipFile(path).read(name)
    with tarfile.open(path) as tf:
        return tf.extractfile(name).read()


def is_word(w: str) -> bool:
    return bool(w) and set(w) <= ALPHABET


def seed_pairs(raw: str) -> list[tuple[str, str]]:
    seen = set()
    pairs = []
    for line in raw.splitlines():
        parts = line.split()
        if len(parts) < 2:
            continue
        correct = parts[0].lower()
        if not is_word(correct):
            continue
        for typo in parts[1:]:
            typo = typo.lower()
            if is_word(typo) and typo != correct and (typo, correct) not in seen:
                seen.add((typo, correct))
                pairs.append((typo, correct))
    return pairs


def review_sentences(raw: str) -> list[str]:
    out = []
    for row in csv.reader(raw.lstrip("﻿").splitlines(keepends=True)):
        if len(row) < 2:
            continue
        for sent in row[1].split("\n"):
            tokens = [t for t in sent.split() if any(ch.isalnum() for ch in t)]
            if tokens:
                out.append(" ".join(tokens))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--download", type=Path, required=True, help="scratch dir for distributions")
    args = ap.parse_args()
    fetch(args.download)

    spelling = member("nlpaug-*.whl", args.download, "nlpaug/res/word/spelling/spelling_en.txt")
    pairs = seed_pairs(spelling.decode("utf-8"))
    with open(DATA / "seed_pairs_en.tsv", "w", encoding="utf-8") as fh:
        for typo, correct in pairs:
            fh.write(f"{typo}\t{correct}\n")
    rng = random.Random(0)
    with open(TEST_DATA / "seed_sample_500.tsv", "w", encoding="utf-8") as fh:
        for typo, correct in rng.sample(pairs, SAMPLE_PAIRS):
            fh.write(f"{typo}\t{correct}\n")

    freq = member("symspellpy-*.whl", args.download, "symspellpy/frequency_dictionary_en_82_765.txt")
    with open(DATA / "lexicon_en.tsv", "w", encoding="utf-8") as fh:
        for line in freq.decode("utf-8").splitlines():
            word, count = line.split()
            if is_word(word):
                fh.write(f"{word}\t{count}\n")

    reviews = member(
        "pattern3-*.tar.gz", args.download, "pattern3-3.0.0/test/corpora/polarity-en-pang&lee1.csv"
    )
    sents = review_sentences(reviews.decode("utf-8"))[:REVIEW_SENTENCES]
    with open(TEST_DATA / "reviews_en.txt", "w", encoding="utf-8") as fh:
        fh.write("\n".join(sents) + "\n")
    print(f"{len(pairs)} seed pairs, {len(sents)} review sentences")


if __name__ == "__main__":
    main()
