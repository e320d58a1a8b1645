import json
from pathlib import Path

import pytest

from typonoise.cli import main
from typonoise.pipeline import PipelineConfig, run_corrupt

DATA = Path(__file__).parent / "data"

# rebasing a 500-pair model onto a small corpus pushes a few rare bigram
# probabilities past 1; that is expected here
pytestmark = pytest.mark.filterwarnings("ignore::typonoise.noise_model.ClampWarning")


@pytest.fixture(scope="module")
def workspace(tmp_path_factory, review_docs):
    root = tmp_path_factory.mktemp("cli")
    corpus = root / "corpus.txt"
    corpus.write_text("".join(" ".join(d) + "\n" for d in review_docs[:400]), encoding="utf-8")
    model = root / "model.json"
    assert main(["induce", str(DATA / "seed_sample_500.tsv"), "-o", str(model)]) == 0
    return root, corpus, model


def _corrupt(workspace, out, *extra):
    root, corpus, model = workspace
    return main(["corrupt", "--model", str(model), "--corpus", str(corpus), "-o", str(root / out), *extra])


def test_induce_summary(workspace, capsys):
    root, _, _ = workspace
    assert main(["induce", str(DATA / "induction_fixture.tsv"), "-o", str(root / "fx.json")]) == 0
    out = capsys.readouterr().out
    assert "10 used, 0 rejected" in out


def test_induce_empty_file(tmp_path, capsys):
    empty = tmp_path / "empty.tsv"
    empty.write_text("")
    assert main(["induce", str(empty), "-o", str(tmp_path / "m.json")]) == 1
    assert "no usable seed pairs" in capsys.readouterr().err


def test_induce_missing_file(tmp_path):
    assert main(["induce", str(tmp_path / "nope.tsv")]) == 1


def test_corrupt_writes_everything(workspace):
    root = workspace[0]
    assert _corrupt(workspace, "run_a", "--level", "low", "--seed", "3") == 0
    names = {p.name for p in (root / "run_a").iterdir()}
    assert {"original.txt", "corrupted.txt", "final.txt", "edits.tsv", "dataset.jsonl",
            "rejected.tsv", "manifest.json"} <= names
    manifest = json.loads((root / "run_a" / "manifest.json").read_text())
    assert manifest["seed"] == 3
    assert manifest["config"]["level"] == "low"
    assert set(manifest["inputs"]) == {"model", "corpus"}
    assert len(manifest["config_sha256"]) == 64


def test_corrupt_is_byte_identical(workspace):
    root = workspace[0]
    assert _corrupt(workspace, "det_1", "--rate", "0.1", "--seed", "8") == 0
    assert _corrupt(workspace, "det_2", "--rate", "0.1", "--seed", "8", "--workers", "2") == 0
    for name in ("corrupted.txt", "final.txt", "edits.tsv", "dataset.jsonl"):
        assert (root / "det_1" / name).read_bytes() == (root / "det_2" / name).read_bytes()


def test_zero_coefficients_leave_text_alone(workspace):
    root = workspace[0]
    zero = "substitution=0,insertion=0,replication=0,deletion=0,transposition=0"
    assert _corrupt(workspace, "zero", "--coefficients", zero, "--seed", "1") == 0
    out = root / "zero"
    assert (out / "final.txt").read_text() == (out / "original.txt").read_text()
    records = [json.loads(x) for x in (out / "dataset.jsonl").read_text().splitlines()[1:]]
    assert all(set(r["labels"]) <= {0} for r in records)


def test_seed_required(workspace, capsys):
    assert _corrupt(workspace, "noseed", "--level", "low") == 1
    assert "error [config]" in capsys.readouterr().err


def test_level_or_rate_required(workspace):
    assert _corrupt(workspace, "nolevel", "--seed", "1") == 1


def test_stage_named_on_failure(workspace, tmp_path, capsys):
    _, corpus, _ = workspace
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "typonoise-noise-model", "version": 99}')
    code = main(["corrupt", "--model", str(bad), "--corpus", str(corpus), "-o", str(tmp_path / "o"),
                 "--level", "low", "--seed", "1"])
    assert code == 1
    assert "error [load-model]" in capsys.readouterr().err


def test_unreachable_rate(workspace, capsys):
    assert _corrupt(workspace, "hi", "--rate", "0.9", "--seed", "1") == 1
    assert "error [calibrate]" in capsys.readouterr().err


def test_config_file(workspace, tmp_path):
    root, corpus, model = workspace
    ini = tmp_path / "run.ini"
    ini.write_text(
        "[pipeline]\n"
        f"model = {model}\ncorpus = {corpus}\noutput_dir = {tmp_path / 'ini_out'}\n"
        "level = medium\nseed = 8\nconfusion = off\n"
    )
    cfg = PipelineConfig.from_file(ini)
    assert cfg.level == "medium" and cfg.seed == 8 and cfg.confusion == "off"
    assert main(["corrupt", "--config", str(ini)]) == 0
    assert (tmp_path / "ini_out" / "final.txt").read_text() == (tmp_path / "ini_out" / "corrupted.txt").read_text()
    # a command-line level overrides the file
    assert main(["corrupt", "--config", str(ini), "--level", "high", "-o", str(tmp_path / "ini_hi")]) == 0
    manifest = json.loads((tmp_path / "ini_hi" / "manifest.json").read_text())
    assert manifest["config"]["level"] == "high"


def test_pipeline_word_rate_matches_labels(workspace, tmp_path):
    _, corpus, model = workspace
    cfg = PipelineConfig(model=str(model), corpus=str(corpus), output_dir=str(tmp_path), level="high", seed=2)
    summary = run_corrupt(cfg, workers=1)
    records = [json.loads(x) for x in (tmp_path / "dataset.jsonl").read_text().splitlines()[1:]]
    labels = [x for r in records for x in r["labels"]]
    assert summary.corrupted_word_rate == sum(labels) / len(labels)


def test_stats_and_bleu(workspace, tmp_path, capsys):
    root = workspace[0]
    run = root / "run_a"
    if not run.exists():
        assert _corrupt(workspace, "run_a", "--level", "low", "--seed", "3") == 0
    assert main(["stats", "--seed-corpus", str(DATA / "seed_sample_500.tsv"), "--edit-log", str(run / "edits.tsv"),
                 "--original", str(run / "original.txt"), "--corrupted", str(run / "final.txt"),
                 "--out", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.csv"))) == 5
    assert main(["bleu", str(run / "original.txt"), str(run / "original.txt")]) == 0
    assert capsys.readouterr().out.strip().endswith("1.000000")


def test_stats_needs_input(capsys):
    assert main(["stats"]) == 1


def test_manifest_reproduces_run(workspace, tmp_path):
    root = workspace[0]
    if not (root / "run_a").exists():
        assert _corrupt(workspace, "run_a", "--level", "low", "--seed", "3") == 0
    manifest = json.loads((root / "run_a" / "manifest.json").read_text())
    cfg = PipelineConfig(**{**manifest["config"], "output_dir": str(tmp_path)})
    run_corrupt(cfg, workers=1)
    again = json.loads((tmp_path / "manifest.json").read_text())
    assert again["outputs"] == manifest["outputs"]
    assert again["inputs"] == manifest["inputs"]
